#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "adolf/topology.hpp"

namespace adolf {

// Growth policies cap how fast the stepsize may increase between iterations.
// An absent cap is returned as std::nullopt and simply drops out of minima.

/// No cap (convex mode only).
struct UnboundedGrowth {
  bool operator==(const UnboundedGrowth&) const = default;
};

/// x + a / k^2: increments are summable.
struct AdditiveSummableGrowth {
  double a = 0.0;
  bool operator==(const AdditiveSummableGrowth&) const = default;
};

/// ((k + beta1) / (k + 1))^beta2 * x.
struct RatioPowerGrowth {
  double beta1 = 10.0;
  double beta2 = 1.0;
  bool operator==(const RatioPowerGrowth&) const = default;
};

using GrowthPolicy = std::variant<UnboundedGrowth, AdditiveSummableGrowth, RatioPowerGrowth>;

/// pi^k(x), or nullopt for the unbounded policy.
std::optional<double> growth_cap(const GrowthPolicy& policy, int k, double x);

/// Additive increment a / k^2 with sum 1 over k >= 1.
inline constexpr double kUnitSummableIncrement = 0.60792710185402662866;  // 6 / pi^2

struct ConstantSigma {
  double sigma_bar = 1.0;
  bool operator==(const ConstantSigma&) const = default;
};

/// sigma^k = sigma / (alpha^k)^2.
struct InverseAlphaSqSigma {
  double sigma = 0.2;
  bool operator==(const InverseAlphaSqSigma&) const = default;
};

using SigmaSchedule = std::variant<ConstantSigma, InverseAlphaSqSigma>;

/// sigma^k evaluated at the stepsize of the update being formed.
double sigma_value(const SigmaSchedule& schedule, double alpha);

/// sigma^k * alpha^k, computed without forming sigma^k for the inverse schedule.
double sigma_alpha_product(const SigmaSchedule& schedule, double alpha);

enum class StepsizeMode { ConvexGlobal, StronglyConvexGlobal, Local };

struct StepsizeParams {
  double c1 = 0.99;
  double c2 = 0.99;
  double alpha0 = 1e-3;
  double eta = 0.9;
  GrowthPolicy growth = UnboundedGrowth{};
  SigmaSchedule sigma = ConstantSigma{1.0};
  StepsizeMode mode = StepsizeMode::ConvexGlobal;

  bool operator==(const StepsizeParams&) const = default;

  static StepsizeParams convex_defaults();
  static StepsizeParams strongly_convex_defaults();
  static StepsizeParams local_defaults(bool strongly_convex);
};

/// Throws a config error when the parameter block is inconsistent with its mode.
void validate(const StepsizeParams& params);

/// Local mode with sigma_i = sigma / alpha_i^2 uses the strongly convex candidate.
bool uses_strongly_convex_candidate(const StepsizeParams& params);

struct StepsizeState {
  double alpha_prev;  // alpha^{k-1}
  double gamma_prev;  // gamma^{k-1}, 1 at start
  int k;
};

struct StepChoice {
  double alpha;
  double gamma;
};

/// ||G_now - G_prev||_F / ||X_now - X_prev||_F, 0 when the iterate did not move.
double curvature_global(const Matrix& grad_now, const Matrix& grad_prev,
                        const Matrix& x_now, const Matrix& x_prev);

/// Per-row secant ratios, 0 for rows that did not move.
Vector curvature_local(const Matrix& grad_now, const Matrix& grad_prev,
                       const Matrix& x_now, const Matrix& x_prev);

/// 1 / (sqrt(L^2 + 2 sigma / c1) + L).
double curvature_bound(double curvature, double sigma, double c1);

/// min{curvature_bound, sqrt(1 + c2 gamma^{k-1}) alpha^{k-1}, pi^k(alpha^{k-1})}.
StepChoice select_alpha_convex(double curvature, double sigma, const StepsizeState& state,
                               const StepsizeParams& params);

/// min{(1/2 - sigma/c1) / L, sqrt(1 + c2 gamma^{k-1}) alpha^{k-1}, pi^k(alpha^{k-1})}.
StepChoice select_alpha_strongly_convex(double curvature, const StepsizeState& state,
                                        const StepsizeParams& params);

/// Dispatches on params.mode (global modes only).
StepChoice select_alpha(double curvature, const StepsizeState& state,
                        const StepsizeParams& params);

/// Per-agent curvature candidate; nullopt means +infinity.
std::optional<double> local_candidate(double curvature, double sigma, double c1);
std::optional<double> local_candidate_strongly_convex(double curvature, double sigma,
                                                      double c1);

struct LocalTilde {
  double alpha_tilde;
  bool decreased;  // the sufficient-decrease branch fired
};

/// Sufficient-decrease rule: shrink by eta when the candidate does not
/// exceed the growth cap, otherwise grow within both caps. Ties shrink.
LocalTilde local_tilde(std::optional<double> alpha_hat, double alpha_prev,
                       double gamma_prev, const StepsizeParams& params, int k);

struct LocalChoice {
  Vector alpha;
  Vector gamma;
};

/// alpha_i = min over the closed neighborhood of alpha_tilde;
/// gamma_i = alpha_tilde_i / alpha_prev_i.
LocalChoice local_min_consensus(const Vector& alpha_tilde, const Graph& graph,
                                const Vector& alpha_prev);

/// Upper bound on gamma^k implied by gamma^0 = 1: the fixed point of
/// g -> sqrt(1 + c2 g).
double gamma_ceiling(double c2);

}  // namespace adolf
