#include <cmath>

#include "adolf/objectives.hpp"

namespace adolf {

Vector solve_quadratic_exact(const ProblemInstance& problem) {
  const int d = problem.dimension();
  Matrix h = Matrix::Zero(d, d);
  Vector g = Vector::Zero(d);
  for (const auto& f : problem.objectives()) {
    const auto form = f->quadratic_form();
    if (!form) throw invalid_argument("exact solve requires quadratic local objectives");
    h += form->hessian;
    g += form->linear;
  }
  // The 1/m averaging cancels on both sides.
  Eigen::LDLT<Matrix> ldlt(h);
  if (ldlt.info() != Eigen::Success) throw numeric_error("normal equations are singular");
  Vector x = ldlt.solve(g);
  // One step of iterative refinement.
  x += ldlt.solve(g - h * x);
  return x;
}

// Accelerated gradient with adaptive restart. The stepsize is 1/L where L is
// grown whenever the secant curvature along the last step exceeds it and
// relaxed slowly otherwise, so no global constant is needed.
Vector centralized_minimize(const ProblemInstance& problem, double tol, int max_iter) {
  if (!(tol > 0.0)) throw invalid_argument("centralized_minimize: tol must be positive");
  const int d = problem.dimension();
  Vector x = Vector::Zero(d);
  Vector gx = problem.average_gradient(x);
  double best_norm = gx.norm();
  Vector best = x;
  if (best_norm <= tol) return x;

  // Initial curvature from a tiny probe step.
  double lip = 1.0;
  {
    const double h = 1e-6 / std::max(1.0, gx.norm());
    const Vector probe = x - h * gx;
    const Vector gp = problem.average_gradient(probe);
    const double s = (probe - x).norm();
    if (s > 0.0) lip = std::max(1e-8, (gp - gx).norm() / s);
  }

  Vector y = x;
  Vector gy = gx;
  double t = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    Vector x_new;
    Vector g_new;
    for (int tries = 0; tries < 60; ++tries) {
      x_new = y - gy / lip;
      g_new = problem.average_gradient(x_new);
      const double step = (x_new - y).norm();
      if (step == 0.0) break;
      const double secant = (g_new - gy).norm() / step;
      if (!std::isfinite(secant)) {
        lip *= 4.0;
        continue;
      }
      if (secant <= lip) break;
      lip = std::max(2.0 * lip, 1.1 * secant);
    }
    const double gnorm = g_new.norm();
    if (std::isfinite(gnorm) && gnorm < best_norm) {
      best_norm = gnorm;
      best = x_new;
    }
    if (gnorm <= tol) return x_new;

    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (gy.dot(x_new - x) > 0.0) {
      // Momentum points uphill: restart from the new iterate.
      t = 1.0;
      y = x_new;
      gy = g_new;
    } else {
      y = x_new + ((t - 1.0) / t_new) * (x_new - x);
      gy = problem.average_gradient(y);
      t = t_new;
    }
    x = std::move(x_new);
    lip *= 0.95;
  }
  throw NonConvergedError("centralized_minimize: gradient norm " +
                              std::to_string(best_norm) + " above tolerance after " +
                              std::to_string(max_iter) + " iterations",
                          best, best_norm);
}

Vector reference_minimizer(const ProblemInstance& problem, double tol, int max_iter) {
  if (problem.all_quadratic()) return solve_quadratic_exact(problem);
  return centralized_minimize(problem, tol, max_iter);
}

}  // namespace adolf
