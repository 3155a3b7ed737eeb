#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adolf/error.hpp"
#include "adolf/topology.hpp"

namespace adolf {

/// f(x) = 1/2 x'Hx - g'x + offset.
struct QuadraticForm {
  Matrix hessian;
  Vector linear;
  double offset = 0.0;
};

/// A convex, continuously differentiable loss owned by one agent.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;

  virtual int dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Known strong-convexity lower bound, 0 when unknown.
  virtual double mu_hint() const { return 0.0; }

  /// Exact quadratic representation when the loss is quadratic.
  virtual std::optional<QuadraticForm> quadratic_form() const {
    return std::nullopt;
  }

 protected:
  void check_dimension(const Vector& x) const;
};

/// f(x) = (1/n) ||A x - b||^2 + (gamma/2) ||x||^2.
class RidgeObjective final : public LocalObjective {
 public:
  RidgeObjective(Matrix a, Vector b, double gamma);

  int dimension() const override { return static_cast<int>(a_.cols()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double mu_hint() const override { return gamma_; }
  std::optional<QuadraticForm> quadratic_form() const override;

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  double gamma() const noexcept { return gamma_; }
  int samples() const noexcept { return static_cast<int>(a_.rows()); }

 private:
  Matrix a_;
  Vector b_;
  double gamma_;
};

/// f(x) = (1/n) sum_j log(1 + exp(-b_j <x, a_j>)), labels in {-1, +1}.
class LogisticObjective final : public LocalObjective {
 public:
  LogisticObjective(Matrix features, Vector labels);

  int dimension() const override { return static_cast<int>(features_.cols()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;

  const Matrix& features() const noexcept { return features_; }
  const Vector& labels() const noexcept { return labels_; }
  int samples() const noexcept { return static_cast<int>(features_.rows()); }

 private:
  Matrix features_;
  Vector labels_;
};

/// f(x) = 1/2 x'Qx - c'x, Q symmetric positive semidefinite.
class QuadraticObjective final : public LocalObjective {
 public:
  QuadraticObjective(Matrix q, Vector c);

  int dimension() const override { return static_cast<int>(q_.cols()); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  double mu_hint() const override { return mu_; }
  std::optional<QuadraticForm> quadratic_form() const override;

 private:
  Matrix q_;
  Vector c_;
  double mu_;
};

/// m local objectives sharing one decision dimension d.
class ProblemInstance {
 public:
  explicit ProblemInstance(std::vector<std::shared_ptr<const LocalObjective>> objectives);

  int agents() const noexcept { return static_cast<int>(objectives_.size()); }
  int dimension() const noexcept { return d_; }
  const LocalObjective& local(int i) const { return *objectives_.at(i); }
  const std::vector<std::shared_ptr<const LocalObjective>>& objectives() const noexcept {
    return objectives_;
  }

  /// F(X) = sum_i f_i(x_i).
  double stacked_value(const Matrix& x) const;
  /// Row i holds grad f_i(x_i).
  Matrix stacked_gradient(const Matrix& x) const;

  /// f(x) = (1/m) sum_i f_i(x).
  double average_value(const Vector& x) const;
  Vector average_gradient(const Vector& x) const;

  bool all_quadratic() const;

 private:
  void check_stack(const Matrix& x) const;

  std::vector<std::shared_ptr<const LocalObjective>> objectives_;
  int d_;
};

/// Gaussian ridge data; agent i (0-based) gets gamma_i = 0.1 + 0.1 i.
ProblemInstance synth_ridge(int m, int n, int d, std::uint64_t seed);

/// Gaussian features with a planted separator and label-flip noise.
ProblemInstance synth_logistic(int m, int n, int d, std::uint64_t seed,
                               double noise);

/// Binary MNIST task: digit `positive` -> +1, `negative` -> -1, pixels in
/// [0, 1], shuffled with `seed` and split evenly over m agents.
ProblemInstance load_mnist_partition(const std::string& images_path,
                                     const std::string& labels_path, int m,
                                     std::pair<int, int> digit_pair,
                                     std::uint64_t seed);

/// Raw IDX contents after keeping one digit pair.
ProblemInstance partition_binary_digits(const std::vector<std::uint8_t>& pixels,
                                        const std::vector<std::uint8_t>& labels,
                                        int pixels_per_image, int m,
                                        std::pair<int, int> digit_pair,
                                        std::uint64_t seed);

/// Binary snapshot of a problem instance (ridge, logistic, quadratic).
void save_problem(std::ostream& os, const ProblemInstance& problem);
ProblemInstance load_problem(std::istream& is);

/// Carries the best iterate found when a solver runs out of iterations.
class NonConvergedError : public Error {
 public:
  NonConvergedError(const std::string& what, Vector best, double grad_norm)
      : Error(ErrorKind::NonConverged, what),
        best_(std::move(best)),
        grad_norm_(grad_norm) {}

  const Vector& best_iterate() const noexcept { return best_; }
  double gradient_norm() const noexcept { return grad_norm_; }

 private:
  Vector best_;
  double grad_norm_;
};

/// Minimizes the averaged objective with an accelerated gradient method whose
/// stepsize tracks a secant curvature estimate; stops at ||grad f|| <= tol.
Vector centralized_minimize(const ProblemInstance& problem, double tol,
                            int max_iter);

/// Exact minimizer of the averaged objective when every loss is quadratic.
Vector solve_quadratic_exact(const ProblemInstance& problem);

/// Exact solve for quadratic problems, iterative otherwise.
Vector reference_minimizer(const ProblemInstance& problem, double tol,
                           int max_iter);

}  // namespace adolf
