#include "adolf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace adolf {

SaddlePoint saddle_from_minimizer(const ProblemInstance& problem, const GossipMatrix& gossip,
                                  const Vector& x_star) {
  const int m = problem.agents();
  if (gossip.size() != m) throw shape_error("gossip matrix and problem disagree on m");
  SaddlePoint s;
  s.x_star = x_star;
  s.X_star = Vector::Ones(m) * x_star.transpose();
  s.f_star = problem.average_value(x_star);

  Matrix grad = problem.stacked_gradient(s.X_star);
  // Stationarity of the average makes the column means vanish up to solver
  // error; project them out so grad lies in range(Ł).
  grad.rowwise() -= grad.colwise().mean();
  s.Y_star = -graph_laplacian_sqrt_pinv(gossip) * grad;
  s.LY_star = -grad;
  return s;
}

SaddlePoint compute_saddle(const ProblemInstance& problem, const GossipMatrix& gossip,
                           double tol, int max_iter) {
  if (problem.all_quadratic()) {
    return saddle_from_minimizer(problem, gossip, solve_quadratic_exact(problem));
  }
  return saddle_from_minimizer(problem, gossip, centralized_minimize(problem, tol, max_iter));
}

double lagrangian(const ProblemInstance& problem, const Matrix& L_op, const Matrix& X,
                  const Matrix& Y) {
  return problem.stacked_value(X) + (L_op * X).cwiseProduct(Y).sum();
}

double primal_gap(const ProblemInstance& problem, const Matrix& X, const SaddlePoint& saddle) {
  return problem.stacked_value(X) - problem.stacked_value(saddle.X_star) +
         saddle.LY_star.cwiseProduct(X - saddle.X_star).sum();
}

double consensus_error(const GossipMatrix& gossip, const Matrix& X) {
  return X.cwiseProduct(gossip.laplacian() * X).sum();
}

double merit(const ProblemInstance& problem, const GossipMatrix& gossip, const Matrix& X,
             const SaddlePoint& saddle) {
  return primal_gap(problem, X, saddle) + consensus_error(gossip, X);
}

double objective_gap(const ProblemInstance& problem, const Matrix& X, const SaddlePoint& saddle) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    total += problem.average_value(X.row(i).transpose());
  }
  return total / static_cast<double>(X.rows()) - saddle.f_star;
}

double lyapunov(const ProblemInstance& problem, const LyapunovInputs& in,
                const SaddlePoint& saddle) {
  return (in.x_now - saddle.X_star).squaredNorm() +
         (in.y - saddle.Y_star).squaredNorm() / in.sigma +
         0.5 * (in.x_now - in.x_prev).squaredNorm() +
         2.0 * in.gamma * in.alpha * primal_gap(problem, in.x_prev, saddle);
}

ErgodicAccumulator::ErgodicAccumulator(int rows, int cols, int start_index)
    : weighted_sum_(Matrix::Zero(rows, cols)), start_(start_index) {}

void ErgodicAccumulator::update(const Matrix& x, double gamma) {
  if (!(gamma > 0.0)) throw invalid_argument("ergodic weight must be positive");
  weighted_sum_ += gamma * x;
  theta_ += gamma;
}

Matrix ErgodicAccumulator::average() const {
  if (theta_ == 0.0) throw invalid_argument("ergodic average of no terms");
  return weighted_sum_ / theta_;
}

void RestrictedConstants::observe(const Matrix& grad_now, const Matrix& grad_prev,
                                  const Matrix& x_now, const Matrix& x_prev) {
  const Matrix dx = x_now - x_prev;
  const double dx2 = dx.squaredNorm();
  if (dx2 == 0.0) return;
  const Matrix dg = grad_now - grad_prev;
  observe_secant(std::sqrt(dg.squaredNorm() / dx2), dg.cwiseProduct(dx).sum() / dx2);
}

void RestrictedConstants::observe_secant(double curvature, double monotonicity) {
  L_ = L_ ? std::max(*L_, curvature) : curvature;
  mu_ = mu_ ? std::min(*mu_, monotonicity) : monotonicity;
}

double classical_stepsize_bound(double L, double sigma, double w_tilde_norm) {
  const double a = sigma * w_tilde_norm;
  if (a == 0.0) return 2.0 / L;
  // Positive root of a x^2 + (L/2) x - 1 = 0, in the cancellation-free form.
  return 2.0 / (L / 2.0 + std::sqrt(L * L / 4.0 + 4.0 * a));
}

double network_free_stepsize_bound(double L, double sigma) {
  return 1.0 / (std::sqrt(L * L + 2.0 * sigma) + L);
}

namespace {

struct LineFit {
  double slope;
  double r2;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double r2 = 1.0;
  if (syy > 0.0) {
    const double ss_res = syy - slope * sxy;
    r2 = 1.0 - std::max(0.0, ss_res) / syy;
  }
  return {slope, r2};
}

}  // namespace

RateFit rate_fit(std::span<const double> k, std::span<const double> metric) {
  if (k.size() != metric.size()) throw shape_error("rate_fit: length mismatch");
  if (k.size() < 3) throw Error(ErrorKind::Data, "rate_fit: fewer than 3 points");
  std::vector<double> ks;
  std::vector<double> log_k;
  std::vector<double> log_m;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(metric[i] > 0.0)) throw Error(ErrorKind::Data, "rate_fit: metric must be positive");
    if (!(k[i] > 0.0)) throw Error(ErrorKind::Data, "rate_fit: iteration index must be positive");
    ks.push_back(k[i]);
    log_k.push_back(std::log(k[i]));
    log_m.push_back(std::log(metric[i]));
  }
  const LineFit geo = least_squares(ks, log_m);
  const LineFit pow = least_squares(log_k, log_m);
  RateFit out;
  out.geometric_slope = geo.slope;
  out.geometric_r2 = geo.r2;
  out.power_slope = pow.slope;
  out.power_r2 = pow.r2;
  out.kind = geo.r2 >= pow.r2 ? RateKind::Linear : RateKind::Sublinear;
  return out;
}

}  // namespace adolf
