#pragma once

#include <memory>
#include <optional>
#include <string>

#include "adolf/objectives.hpp"
#include "adolf/stepsize.hpp"
#include "adolf/topology.hpp"

namespace adolf {

/// What one iteration did, as seen from the iterate it started at (X^k).
struct StepReport {
  int k = 0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double gamma_min = 1.0;
  double gamma_max = 1.0;
  double gamma_mean = 1.0;
  std::optional<double> sigma;      // sigma^k; min over agents in local mode
  std::optional<double> curvature;  // Frobenius secant ratio L^k (k >= 1)
  std::optional<double> secant_mu;  // <dG, dX> / ||dX||^2 (k >= 1, iterate moved)
  /// Z^k with D^{k+1} = D^k + (I - W) Z^k; empty for primal-only methods.
  Matrix dual_argument;
  int decrease_events = 0;
};

/// Fixed alpha, sigma, gamma (selection disabled).
struct FixedParameters {
  double alpha = 1e-2;
  double sigma = 1.0;
  double gamma = 1.0;
  bool operator==(const FixedParameters&) const = default;
};

struct AdolfOptions {
  StepsizeParams stepsize = StepsizeParams::convex_defaults();
  std::optional<FixedParameters> fixed;
  bool operator==(const AdolfOptions&) const = default;
};

struct AdolfState {
  Matrix X_now;      // X^k
  Matrix X_prev;     // X^{k-1}
  Matrix D;          // D^k
  Matrix grad_prev;  // grad F(X^{k-1}); empty before initialization
  StepsizeState step{};  // alpha^{k-1}, gamma^{k-1}
  double sigma_prev = 0.0;
  int k = 0;
  long comm_vector = 0;
  long comm_scalar = 0;
  StepReport last;
};

/// State at k = 0, before the initialization step.
AdolfState adolf_start(const Matrix& X_minus1, const Matrix& X0, const AdolfOptions& options);

/// Initialization: D^1 and X^1 from (X^{-1}, X^0) with gamma^0 = 1.
AdolfState adolf_init(const ProblemInstance& problem, const GossipMatrix& gossip,
                      const Matrix& X_minus1, const Matrix& X0, const AdolfOptions& options);

/// One synchronous round; at k = 0 performs the initialization step.
AdolfState adolf_step(AdolfState state, const ProblemInstance& problem,
                      const GossipMatrix& gossip, const AdolfOptions& options);

struct AdolfLocalOptions {
  StepsizeParams stepsize = StepsizeParams::local_defaults(false);
  bool operator==(const AdolfLocalOptions&) const = default;
};

struct AdolfLocalState {
  Matrix X_now;
  Matrix X_prev;
  Matrix D;
  Matrix grad_prev;
  Vector alpha_prev;  // diag(Lambda^{k-1})
  Vector gamma_prev;  // diag(Gamma^{k-1})
  int k = 0;
  long comm_vector = 0;
  long comm_scalar = 0;
  long decrease_events = 0;
  StepReport last;
};

AdolfLocalState adolf_local_start(const Matrix& X_minus1, const Matrix& X0,
                                  const AdolfLocalOptions& options);

AdolfLocalState adolf_local_step(AdolfLocalState state, const ProblemInstance& problem,
                                 const GossipMatrix& gossip, const AdolfLocalOptions& options);

struct CondatVuOptions {
  FixedParameters parameters;
  bool operator==(const CondatVuOptions&) const = default;
};

struct CondatVuState {
  Matrix X_now;
  Matrix X_prev;
  Matrix Y;
  Matrix L_op;  // Ł = (I - W)^{1/2}
  double alpha = 0.0;
  double sigma = 0.0;
  double gamma = 1.0;
  int k = 0;
  long comm_vector = 0;
  StepReport last;
};

CondatVuState condat_vu_start(const Matrix& X_minus1, const Matrix& X0,
                              const GossipMatrix& gossip, const CondatVuOptions& options);

/// Y^{k+1} = Y^k + sigma alpha Ł((1+gamma) X^k - gamma X^{k-1});
/// X^{k+1} = X^k - alpha (grad F(X^k) + Ł Y^{k+1}).
CondatVuState condat_vu_step(CondatVuState state, const ProblemInstance& problem);

struct ExtraOptions {
  double alpha = 1e-2;
  bool operator==(const ExtraOptions&) const = default;
};

/// EXTRA with mixing matrix W and W~ = (I + W) / 2.
struct ExtraState {
  Matrix X_now;
  Matrix X_prev;
  Matrix grad_prev;
  Matrix WX_prev;  // W X^{k-1}, cached so each round needs one exchange
  double alpha = 0.0;
  int k = 0;
  long comm_vector = 0;
  StepReport last;
};

ExtraState extra_start(const Matrix& X0, const ExtraOptions& options);

ExtraState extra_step(ExtraState state, const ProblemInstance& problem,
                      const GossipMatrix& gossip);

/// Uniform driver over the engines above, used by the run loop.
class Method {
 public:
  virtual ~Method() = default;

  virtual std::string name() const = 0;
  virtual int iteration() const = 0;
  virtual const Matrix& current() const = 0;   // X^k
  virtual const Matrix& previous() const = 0;  // X^{k-1}
  virtual const Matrix* dual() const { return nullptr; }  // D^k
  virtual long comm_vector() const = 0;
  virtual long comm_scalar() const { return 0; }
  /// Moves from X^k to X^{k+1} and reports the step taken at X^k.
  virtual StepReport advance() = 0;
};

std::unique_ptr<Method> make_adolf(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X_minus1, const Matrix& X0,
                                   const AdolfOptions& options);
std::unique_ptr<Method> make_adolf_local(const ProblemInstance& problem,
                                         const GossipMatrix& gossip, const Matrix& X_minus1,
                                         const Matrix& X0, const AdolfLocalOptions& options);
std::unique_ptr<Method> make_condat_vu(const ProblemInstance& problem,
                                       const GossipMatrix& gossip, const Matrix& X_minus1,
                                       const Matrix& X0, const CondatVuOptions& options);
std::unique_ptr<Method> make_extra(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X0, const ExtraOptions& options);

}  // namespace adolf
