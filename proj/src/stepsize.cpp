#include "adolf/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adolf/error.hpp"

namespace adolf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double min_present(double value, std::optional<double> other) {
  return other ? std::min(value, *other) : value;
}

}  // namespace

std::optional<double> growth_cap(const GrowthPolicy& policy, int k, double x) {
  return std::visit(
      overloaded{
          [](const UnboundedGrowth&) -> std::optional<double> { return std::nullopt; },
          [&](const AdditiveSummableGrowth& g) -> std::optional<double> {
            const double kk = std::max(1, k);
            return x + g.a / (kk * kk);
          },
          [&](const RatioPowerGrowth& g) -> std::optional<double> {
            return std::pow((k + g.beta1) / (k + 1.0), g.beta2) * x;
          },
      },
      policy);
}

double sigma_value(const SigmaSchedule& schedule, double alpha) {
  return std::visit(overloaded{
                        [](const ConstantSigma& s) { return s.sigma_bar; },
                        [&](const InverseAlphaSqSigma& s) { return s.sigma / (alpha * alpha); },
                    },
                    schedule);
}

double sigma_alpha_product(const SigmaSchedule& schedule, double alpha) {
  return std::visit(overloaded{
                        [&](const ConstantSigma& s) { return s.sigma_bar * alpha; },
                        [&](const InverseAlphaSqSigma& s) { return s.sigma / alpha; },
                    },
                    schedule);
}

StepsizeParams StepsizeParams::convex_defaults() { return StepsizeParams{}; }

StepsizeParams StepsizeParams::strongly_convex_defaults() {
  StepsizeParams p;
  p.c1 = 0.5;
  p.c2 = 0.99;
  p.sigma = InverseAlphaSqSigma{0.2};
  p.growth = RatioPowerGrowth{10.0, 1.0};
  p.mode = StepsizeMode::StronglyConvexGlobal;
  return p;
}

StepsizeParams StepsizeParams::local_defaults(bool strongly_convex) {
  StepsizeParams p = strongly_convex ? strongly_convex_defaults() : convex_defaults();
  p.mode = StepsizeMode::Local;
  p.eta = 0.9;
  p.growth = AdditiveSummableGrowth{kUnitSummableIncrement};
  return p;
}

bool uses_strongly_convex_candidate(const StepsizeParams& params) {
  return std::holds_alternative<InverseAlphaSqSigma>(params.sigma);
}

void validate(const StepsizeParams& p) {
  if (!(p.c1 > 0.0 && p.c1 <= 1.0)) throw config_error("c1 must lie in (0, 1]");
  if (!(p.c2 > 0.0 && p.c2 <= 1.0)) throw config_error("c2 must lie in (0, 1]");
  if (!(p.alpha0 > 0.0)) throw config_error("alpha0 must be positive");

  if (const auto* g = std::get_if<AdditiveSummableGrowth>(&p.growth)) {
    if (!(g->a >= 0.0)) throw config_error("additive growth increment must be nonnegative");
  }
  if (const auto* g = std::get_if<RatioPowerGrowth>(&p.growth)) {
    if (!(g->beta1 >= 1.0)) throw config_error("ratio growth needs beta1 >= 1 so that pi(x) >= x");
    if (!(g->beta2 > 0.0)) throw config_error("ratio growth needs beta2 > 0");
  }
  if (const auto* s = std::get_if<ConstantSigma>(&p.sigma)) {
    if (!(s->sigma_bar > 0.0)) throw config_error("sigma_bar must be positive");
  }
  if (const auto* s = std::get_if<InverseAlphaSqSigma>(&p.sigma)) {
    if (!(s->sigma > 0.0 && s->sigma < p.c1 / 2.0)) {
      throw config_error("sigma must lie in (0, c1/2) for the inverse-square schedule");
    }
  }

  switch (p.mode) {
    case StepsizeMode::ConvexGlobal:
      if (!std::holds_alternative<ConstantSigma>(p.sigma)) {
        throw config_error("convex mode requires a constant sigma schedule");
      }
      break;
    case StepsizeMode::StronglyConvexGlobal:
      if (!std::holds_alternative<InverseAlphaSqSigma>(p.sigma)) {
        throw config_error("strongly convex mode requires the inverse-square sigma schedule");
      }
      if (std::holds_alternative<UnboundedGrowth>(p.growth)) {
        throw config_error("strongly convex mode requires a bounded growth policy");
      }
      break;
    case StepsizeMode::Local:
      if (!(p.eta > 0.0 && p.eta < 1.0)) throw config_error("eta must lie in (0, 1)");
      if (!std::holds_alternative<AdditiveSummableGrowth>(p.growth)) {
        throw config_error("local mode requires the additive summable growth policy");
      }
      break;
  }
}

double curvature_global(const Matrix& grad_now, const Matrix& grad_prev,
                        const Matrix& x_now, const Matrix& x_prev) {
  if (grad_now.rows() != grad_prev.rows() || grad_now.cols() != grad_prev.cols() ||
      x_now.rows() != x_prev.rows() || x_now.cols() != x_prev.cols() ||
      grad_now.rows() != x_now.rows() || grad_now.cols() != x_now.cols()) {
    throw shape_error("curvature_global: shape mismatch");
  }
  const double dx = (x_now - x_prev).norm();
  const double dg = (grad_now - grad_prev).norm();
  if (!std::isfinite(dx) || !std::isfinite(dg)) {
    throw numeric_error("curvature_global: non-finite input");
  }
  if (dx == 0.0) return 0.0;
  return dg / dx;
}

Vector curvature_local(const Matrix& grad_now, const Matrix& grad_prev,
                       const Matrix& x_now, const Matrix& x_prev) {
  if (grad_now.rows() != x_now.rows() || grad_now.cols() != x_now.cols() ||
      grad_prev.rows() != x_prev.rows() || x_now.rows() != x_prev.rows() ||
      x_now.cols() != x_prev.cols()) {
    throw shape_error("curvature_local: shape mismatch");
  }
  Vector out(x_now.rows());
  for (Eigen::Index i = 0; i < x_now.rows(); ++i) {
    const double dx = (x_now.row(i) - x_prev.row(i)).norm();
    const double dg = (grad_now.row(i) - grad_prev.row(i)).norm();
    if (!std::isfinite(dx) || !std::isfinite(dg)) {
      throw numeric_error("curvature_local: non-finite input at agent " + std::to_string(i));
    }
    out(i) = dx == 0.0 ? 0.0 : dg / dx;
  }
  return out;
}

double curvature_bound(double curvature, double sigma, double c1) {
  return 1.0 / (std::sqrt(curvature * curvature + 2.0 * sigma / c1) + curvature);
}

namespace {

double momentum_cap(const StepsizeState& state, const StepsizeParams& params) {
  return std::sqrt(1.0 + params.c2 * state.gamma_prev) * state.alpha_prev;
}

}  // namespace

StepChoice select_alpha_convex(double curvature, double sigma, const StepsizeState& state,
                               const StepsizeParams& params) {
  double alpha = std::min(curvature_bound(curvature, sigma, params.c1),
                          momentum_cap(state, params));
  alpha = min_present(alpha, growth_cap(params.growth, state.k, state.alpha_prev));
  return {alpha, alpha / state.alpha_prev};
}

StepChoice select_alpha_strongly_convex(double curvature, const StepsizeState& state,
                                        const StepsizeParams& params) {
  const auto* schedule = std::get_if<InverseAlphaSqSigma>(&params.sigma);
  if (params.mode != StepsizeMode::StronglyConvexGlobal || schedule == nullptr) {
    throw config_error("strongly convex selection needs the inverse-square sigma schedule");
  }
  double alpha = momentum_cap(state, params);
  alpha = min_present(alpha, growth_cap(params.growth, state.k, state.alpha_prev));
  alpha = min_present(alpha, local_candidate_strongly_convex(curvature, schedule->sigma, params.c1));
  return {alpha, alpha / state.alpha_prev};
}

StepChoice select_alpha(double curvature, const StepsizeState& state,
                        const StepsizeParams& params) {
  switch (params.mode) {
    case StepsizeMode::ConvexGlobal:
      return select_alpha_convex(curvature, std::get<ConstantSigma>(params.sigma).sigma_bar,
                                 state, params);
    case StepsizeMode::StronglyConvexGlobal:
      return select_alpha_strongly_convex(curvature, state, params);
    case StepsizeMode::Local:
      break;
  }
  throw config_error("select_alpha: local mode has no global selection rule");
}

std::optional<double> local_candidate(double curvature, double sigma, double c1) {
  return curvature_bound(curvature, sigma, c1);
}

std::optional<double> local_candidate_strongly_convex(double curvature, double sigma,
                                                      double c1) {
  if (curvature <= 0.0) return std::nullopt;
  return (0.5 - sigma / c1) / curvature;
}

LocalTilde local_tilde(std::optional<double> alpha_hat, double alpha_prev,
                       double gamma_prev, const StepsizeParams& params, int k) {
  const std::optional<double> cap = growth_cap(params.growth, k, alpha_prev);
  // An absent value stands for +infinity on either side of the comparison.
  bool shrink = false;
  if (alpha_hat) {
    shrink = !cap || *alpha_hat <= *cap;
  } else {
    shrink = !cap;
  }
  if (shrink) {
    return {min_present(params.eta * alpha_prev, alpha_hat), true};
  }
  const double grow = std::sqrt(1.0 + params.c2 * gamma_prev) * alpha_prev;
  return {min_present(grow, cap), false};
}

LocalChoice local_min_consensus(const Vector& alpha_tilde, const Graph& graph,
                                const Vector& alpha_prev) {
  const int m = graph.size();
  if (alpha_tilde.size() != m || alpha_prev.size() != m) {
    throw shape_error("local_min_consensus: vectors must have one entry per agent");
  }
  LocalChoice out{Vector(m), Vector(m)};
  for (int i = 0; i < m; ++i) {
    double best = alpha_tilde(i);
    for (int j : graph.neighbors(i)) best = std::min(best, alpha_tilde(j));
    out.alpha(i) = best;
    out.gamma(i) = alpha_tilde(i) / alpha_prev(i);
  }
  return out;
}

double gamma_ceiling(double c2) { return 0.5 * (c2 + std::sqrt(c2 * c2 + 4.0)); }

}  // namespace adolf
