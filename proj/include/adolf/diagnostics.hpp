#pragma once

#include <optional>
#include <span>
#include <string>

#include "adolf/objectives.hpp"
#include "adolf/topology.hpp"

namespace adolf {

/// Reference saddle point (X*, Y*) of the lifted Lagrangian.
struct SaddlePoint {
  Vector x_star;
  Matrix X_star;   // 1 x*^T
  Matrix Y_star;   // minimum-norm solution of Ł Y* = -grad F(X*)
  Matrix LY_star;  // Ł Y*, cached
  double f_star = 0.0;
  /// True when the centralized solve stopped before reaching its tolerance.
  bool inexact = false;
};

/// x* from the centralized reference solver, Y* = -Ł^+ P grad F(X*), where P
/// removes the column means (the component outside range(Ł)).
SaddlePoint compute_saddle(const ProblemInstance& problem, const GossipMatrix& gossip,
                           double tol, int max_iter = 200000);

/// Builds the saddle from an externally supplied x*.
SaddlePoint saddle_from_minimizer(const ProblemInstance& problem, const GossipMatrix& gossip,
                                  const Vector& x_star);

/// L(X, Y) = F(X) + <Ł X, Y>  (the conjugate of the consensus indicator is 0).
double lagrangian(const ProblemInstance& problem, const Matrix& L_op, const Matrix& X,
                  const Matrix& Y);

/// F(X) - F(X*) + <Ł Y*, X - X*>.
double primal_gap(const ProblemInstance& problem, const Matrix& X, const SaddlePoint& saddle);

/// ||Ł X||^2 = <X, (I - W) X>.
double consensus_error(const GossipMatrix& gossip, const Matrix& X);

/// primal gap + ||Ł X||^2.
double merit(const ProblemInstance& problem, const GossipMatrix& gossip, const Matrix& X,
             const SaddlePoint& saddle);

/// (1/m) sum_i f(x_i) - f*, with f the network average.
double objective_gap(const ProblemInstance& problem, const Matrix& X, const SaddlePoint& saddle);

struct LyapunovInputs {
  const Matrix& x_now;
  const Matrix& x_prev;
  const Matrix& y;
  double sigma;
  double gamma;
  double alpha;
};

/// ||X^k - X*||^2 + ||Y^k - Y*||^2 / sigma^k + ||X^k - X^{k-1}||^2 / 2
///   + 2 gamma^k alpha^k (primal gap at X^{k-1}).
double lyapunov(const ProblemInstance& problem, const LyapunovInputs& in,
                const SaddlePoint& saddle);

/// gamma-weighted running average of iterates.
class ErgodicAccumulator {
 public:
  ErgodicAccumulator(int rows, int cols, int start_index = 0);

  void update(const Matrix& x, double gamma);
  bool empty() const noexcept { return theta_ == 0.0; }
  double theta() const noexcept { return theta_; }
  int start_index() const noexcept { return start_; }
  Matrix average() const;

 private:
  Matrix weighted_sum_;
  double theta_ = 0.0;
  int start_;
};

/// Trajectory estimates of the restricted smoothness / strong convexity
/// constants: running max of the secant curvature and running min of the
/// secant monotonicity ratio.
class RestrictedConstants {
 public:
  void observe(const Matrix& grad_now, const Matrix& grad_prev, const Matrix& x_now,
               const Matrix& x_prev);
  /// Same, from secant ratios computed elsewhere.
  void observe_secant(double curvature, double monotonicity);

  std::optional<double> L_tilde_hat() const { return L_; }
  std::optional<double> mu_tilde_hat() const { return mu_; }

 private:
  std::optional<double> L_;
  std::optional<double> mu_;
};

/// Largest alpha with alpha L / 2 + sigma alpha^2 ||I - W~|| < 1 (its root).
double classical_stepsize_bound(double L, double sigma, double w_tilde_norm);

/// 1 / (sqrt(L^2 + 2 sigma) + L): the network-free fixed-stepsize bound.
double network_free_stepsize_bound(double L, double sigma);

enum class RateKind { Linear, Sublinear };

struct RateFit {
  RateKind kind;
  double geometric_slope;  // d log(metric) / dk
  double geometric_r2;
  double power_slope;      // d log(metric) / d log(k)
  double power_r2;
};

/// Least-squares fits of log(metric) against k and log(k).
RateFit rate_fit(std::span<const double> k, std::span<const double> metric);

}  // namespace adolf
