#include "adolf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adolf/error.hpp"

namespace adolf {

namespace {

void check_shapes(const ProblemInstance& problem, const GossipMatrix& gossip, const Matrix& X) {
  if (gossip.size() != problem.agents()) {
    throw shape_error("gossip matrix is " + std::to_string(gossip.size()) + " x " +
                      std::to_string(gossip.size()) + " but the problem has " +
                      std::to_string(problem.agents()) + " agents");
  }
  if (X.rows() != problem.agents() || X.cols() != problem.dimension()) {
    throw shape_error("iterate must be " + std::to_string(problem.agents()) + " x " +
                      std::to_string(problem.dimension()));
  }
}

void check_pair(const Matrix& X_minus1, const Matrix& X0) {
  if (X_minus1.rows() != X0.rows() || X_minus1.cols() != X0.cols()) {
    throw shape_error("X^{-1} and X^0 must have the same shape");
  }
}

void check_finite(const Matrix& X, const char* what) {
  if (!X.allFinite()) throw numeric_error(std::string(what) + " produced non-finite values");
}

std::optional<double> secant_mu(const Matrix& grad_now, const Matrix& grad_prev,
                                const Matrix& x_now, const Matrix& x_prev) {
  const Matrix dx = x_now - x_prev;
  const double dx2 = dx.squaredNorm();
  if (dx2 == 0.0) return std::nullopt;
  return (grad_now - grad_prev).cwiseProduct(dx).sum() / dx2;
}

}  // namespace

// ---------------------------------------------------------------------------
// ADOLF, global stepsize

AdolfState adolf_start(const Matrix& X_minus1, const Matrix& X0, const AdolfOptions& options) {
  check_pair(X_minus1, X0);
  if (options.fixed) {
    if (!(options.fixed->alpha > 0.0 && options.fixed->sigma > 0.0 && options.fixed->gamma > 0.0)) {
      throw config_error("fixed alpha, sigma and gamma must be positive");
    }
  } else {
    validate(options.stepsize);
    if (options.stepsize.mode == StepsizeMode::Local) {
      throw config_error("ADOLF with a global stepsize cannot run in local mode");
    }
  }
  AdolfState s;
  s.X_now = X0;
  s.X_prev = X_minus1;
  s.D = Matrix::Zero(X0.rows(), X0.cols());
  s.step = {0.0, 1.0, 0};
  return s;
}

AdolfState adolf_init(const ProblemInstance& problem, const GossipMatrix& gossip,
                      const Matrix& X_minus1, const Matrix& X0, const AdolfOptions& options) {
  return adolf_step(adolf_start(X_minus1, X0, options), problem, gossip, options);
}

AdolfState adolf_step(AdolfState s, const ProblemInstance& problem, const GossipMatrix& gossip,
                      const AdolfOptions& options) {
  check_shapes(problem, gossip, s.X_now);
  const Matrix grad = problem.stacked_gradient(s.X_now);
  check_finite(grad, "gradient");

  StepReport report;
  report.k = s.k;
  double alpha = 0.0;
  double gamma = 1.0;
  double sigma = 0.0;
  double sigma_alpha = 0.0;
  if (s.k > 0) {
    report.curvature = curvature_global(grad, s.grad_prev, s.X_now, s.X_prev);
    report.secant_mu = secant_mu(grad, s.grad_prev, s.X_now, s.X_prev);
  }

  if (options.fixed) {
    alpha = options.fixed->alpha;
    gamma = options.fixed->gamma;
    sigma = options.fixed->sigma;
    sigma_alpha = sigma * alpha;
  } else if (s.k == 0) {
    alpha = options.stepsize.alpha0;
    sigma = sigma_value(options.stepsize.sigma, alpha);
    sigma_alpha = sigma_alpha_product(options.stepsize.sigma, alpha);
  } else {
    s.step.k = s.k;
    const StepChoice choice = select_alpha(*report.curvature, s.step, options.stepsize);
    alpha = choice.alpha;
    gamma = choice.gamma;
    sigma = sigma_value(options.stepsize.sigma, alpha);
    sigma_alpha = sigma_alpha_product(options.stepsize.sigma, alpha);
    ++s.comm_scalar;
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw numeric_error("stepsize selection produced alpha = " + std::to_string(alpha));
  }

  Matrix Z = sigma_alpha * ((1.0 + gamma) * s.X_now - gamma * s.X_prev);
  s.D.noalias() += gossip.laplacian() * Z;
  ++s.comm_vector;
  Matrix X_next = s.X_now - alpha * (grad + s.D);
  check_finite(X_next, "ADOLF step");

  report.alpha_min = report.alpha_max = alpha;
  report.gamma_min = report.gamma_max = report.gamma_mean = gamma;
  report.sigma = sigma;
  report.dual_argument = std::move(Z);

  s.X_prev = std::move(s.X_now);
  s.X_now = std::move(X_next);
  s.grad_prev = grad;
  s.step.alpha_prev = alpha;
  s.step.gamma_prev = gamma;
  s.sigma_prev = sigma;
  ++s.k;
  s.last = std::move(report);
  return s;
}

// ---------------------------------------------------------------------------
// ADOLF, local stepsizes

AdolfLocalState adolf_local_start(const Matrix& X_minus1, const Matrix& X0,
                                  const AdolfLocalOptions& options) {
  check_pair(X_minus1, X0);
  validate(options.stepsize);
  if (options.stepsize.mode != StepsizeMode::Local) {
    throw config_error("local ADOLF requires stepsize mode 'local'");
  }
  AdolfLocalState s;
  s.X_now = X0;
  s.X_prev = X_minus1;
  s.D = Matrix::Zero(X0.rows(), X0.cols());
  s.alpha_prev = Vector::Zero(X0.rows());
  s.gamma_prev = Vector::Ones(X0.rows());
  return s;
}

AdolfLocalState adolf_local_step(AdolfLocalState s, const ProblemInstance& problem,
                                 const GossipMatrix& gossip, const AdolfLocalOptions& options) {
  check_shapes(problem, gossip, s.X_now);
  const StepsizeParams& p = options.stepsize;
  const int m = problem.agents();
  const Matrix grad = problem.stacked_gradient(s.X_now);
  check_finite(grad, "gradient");

  StepReport report;
  report.k = s.k;
  Vector alpha(m);
  Vector gamma(m);
  if (s.k == 0) {
    alpha.setConstant(p.alpha0);
    gamma.setOnes();
  } else {
    const Vector L = curvature_local(grad, s.grad_prev, s.X_now, s.X_prev);
    Vector alpha_tilde(m);
    const bool sc = uses_strongly_convex_candidate(p);
    for (int i = 0; i < m; ++i) {
      std::optional<double> hat;
      if (sc) {
        hat = local_candidate_strongly_convex(L(i), std::get<InverseAlphaSqSigma>(p.sigma).sigma,
                                              p.c1);
      } else {
        hat = local_candidate(L(i), std::get<ConstantSigma>(p.sigma).sigma_bar, p.c1);
      }
      const LocalTilde t = local_tilde(hat, s.alpha_prev(i), s.gamma_prev(i), p, s.k);
      alpha_tilde(i) = t.alpha_tilde;
      if (t.decreased) ++report.decrease_events;
    }
    const LocalChoice choice = local_min_consensus(alpha_tilde, gossip.graph(), s.alpha_prev);
    alpha = choice.alpha;
    gamma = choice.gamma;
    report.curvature = curvature_global(grad, s.grad_prev, s.X_now, s.X_prev);
    report.secant_mu = secant_mu(grad, s.grad_prev, s.X_now, s.X_prev);
    ++s.comm_scalar;
  }
  if (!(alpha.minCoeff() > 0.0) || !alpha.allFinite()) {
    throw numeric_error("local stepsize selection produced a nonpositive or non-finite alpha");
  }

  Vector sigma_alpha(m);
  double sigma_min = 0.0;
  for (int i = 0; i < m; ++i) {
    sigma_alpha(i) = sigma_alpha_product(p.sigma, alpha(i));
    const double sg = sigma_value(p.sigma, alpha(i));
    sigma_min = i == 0 ? sg : std::min(sigma_min, sg);
  }

  Matrix Z = (sigma_alpha.asDiagonal() *
              ((Vector::Ones(m) + gamma).asDiagonal() * s.X_now - gamma.asDiagonal() * s.X_prev))
                 .eval();
  s.D.noalias() += gossip.laplacian() * Z;
  ++s.comm_vector;
  Matrix X_next = s.X_now - alpha.asDiagonal() * (grad + s.D);
  check_finite(X_next, "local ADOLF step");

  report.alpha_min = alpha.minCoeff();
  report.alpha_max = alpha.maxCoeff();
  report.gamma_min = gamma.minCoeff();
  report.gamma_max = gamma.maxCoeff();
  report.gamma_mean = gamma.mean();
  report.sigma = sigma_min;
  report.dual_argument = std::move(Z);

  s.X_prev = std::move(s.X_now);
  s.X_now = std::move(X_next);
  s.grad_prev = grad;
  s.alpha_prev = alpha;
  s.gamma_prev = gamma;
  s.decrease_events += report.decrease_events;
  ++s.k;
  s.last = std::move(report);
  return s;
}

// ---------------------------------------------------------------------------
// Condat-Vu with explicit dual variable

CondatVuState condat_vu_start(const Matrix& X_minus1, const Matrix& X0,
                              const GossipMatrix& gossip, const CondatVuOptions& options) {
  check_pair(X_minus1, X0);
  const FixedParameters& f = options.parameters;
  if (!(f.alpha > 0.0 && f.sigma > 0.0 && f.gamma > 0.0)) {
    throw config_error("Condat-Vu alpha, sigma and gamma must be positive");
  }
  if (X0.rows() != gossip.size()) throw shape_error("iterate rows must match the gossip size");
  CondatVuState s;
  s.X_now = X0;
  s.X_prev = X_minus1;
  s.Y = Matrix::Zero(X0.rows(), X0.cols());
  s.L_op = graph_laplacian_sqrt(gossip);
  s.alpha = f.alpha;
  s.sigma = f.sigma;
  s.gamma = f.gamma;
  return s;
}

CondatVuState condat_vu_step(CondatVuState s, const ProblemInstance& problem) {
  if (s.X_now.rows() != problem.agents() || s.X_now.cols() != problem.dimension()) {
    throw shape_error("Condat-Vu iterate does not match the problem");
  }
  const Matrix grad = problem.stacked_gradient(s.X_now);
  check_finite(grad, "gradient");
  Matrix Z = s.sigma * s.alpha * ((1.0 + s.gamma) * s.X_now - s.gamma * s.X_prev);
  s.Y.noalias() += s.L_op * Z;
  Matrix X_next = s.X_now - s.alpha * (grad + s.L_op * s.Y);
  check_finite(X_next, "Condat-Vu step");
  ++s.comm_vector;

  StepReport report;
  report.k = s.k;
  report.alpha_min = report.alpha_max = s.alpha;
  report.gamma_min = report.gamma_max = report.gamma_mean = s.gamma;
  report.sigma = s.sigma;
  report.dual_argument = std::move(Z);

  s.X_prev = std::move(s.X_now);
  s.X_now = std::move(X_next);
  ++s.k;
  s.last = std::move(report);
  return s;
}

// ---------------------------------------------------------------------------
// EXTRA

ExtraState extra_start(const Matrix& X0, const ExtraOptions& options) {
  if (!(options.alpha > 0.0) || !std::isfinite(options.alpha)) {
    throw config_error("EXTRA stepsize must be positive");
  }
  ExtraState s;
  s.X_now = X0;
  s.X_prev = X0;
  s.alpha = options.alpha;
  return s;
}

ExtraState extra_step(ExtraState s, const ProblemInstance& problem, const GossipMatrix& gossip) {
  check_shapes(problem, gossip, s.X_now);
  const Matrix grad = problem.stacked_gradient(s.X_now);
  check_finite(grad, "gradient");
  Matrix WX = gossip.w() * s.X_now;
  ++s.comm_vector;

  StepReport report;
  report.k = s.k;
  Matrix X_next;
  if (s.k == 0) {
    X_next = WX - s.alpha * grad;
  } else {
    // W~ X^{k-1} = (X^{k-1} + W X^{k-1}) / 2 reuses last round's exchange.
    X_next = s.X_now + WX - 0.5 * (s.X_prev + s.WX_prev) - s.alpha * (grad - s.grad_prev);
    report.curvature = curvature_global(grad, s.grad_prev, s.X_now, s.X_prev);
    report.secant_mu = secant_mu(grad, s.grad_prev, s.X_now, s.X_prev);
  }
  check_finite(X_next, "EXTRA step");
  report.alpha_min = report.alpha_max = s.alpha;

  s.X_prev = std::move(s.X_now);
  s.X_now = std::move(X_next);
  s.WX_prev = std::move(WX);
  s.grad_prev = grad;
  ++s.k;
  s.last = std::move(report);
  return s;
}

// ---------------------------------------------------------------------------
// Method adapters

namespace {

class AdolfMethod final : public Method {
 public:
  AdolfMethod(const ProblemInstance& problem, const GossipMatrix& gossip, AdolfState state,
              AdolfOptions options)
      : problem_(problem), gossip_(gossip), state_(std::move(state)), options_(std::move(options)) {
    check_shapes(problem_, gossip_, state_.X_now);
  }
  std::string name() const override { return options_.fixed ? "adolf_fixed" : "adolf"; }
  int iteration() const override { return state_.k; }
  const Matrix& current() const override { return state_.X_now; }
  const Matrix& previous() const override { return state_.X_prev; }
  const Matrix* dual() const override { return &state_.D; }
  long comm_vector() const override { return state_.comm_vector; }
  long comm_scalar() const override { return state_.comm_scalar; }
  StepReport advance() override {
    state_ = adolf_step(std::move(state_), problem_, gossip_, options_);
    return state_.last;
  }

 private:
  const ProblemInstance& problem_;
  const GossipMatrix& gossip_;
  AdolfState state_;
  AdolfOptions options_;
};

class AdolfLocalMethod final : public Method {
 public:
  AdolfLocalMethod(const ProblemInstance& problem, const GossipMatrix& gossip,
                   AdolfLocalState state, AdolfLocalOptions options)
      : problem_(problem), gossip_(gossip), state_(std::move(state)), options_(std::move(options)) {
    check_shapes(problem_, gossip_, state_.X_now);
  }
  std::string name() const override { return "adolf_local"; }
  int iteration() const override { return state_.k; }
  const Matrix& current() const override { return state_.X_now; }
  const Matrix& previous() const override { return state_.X_prev; }
  const Matrix* dual() const override { return &state_.D; }
  long comm_vector() const override { return state_.comm_vector; }
  long comm_scalar() const override { return state_.comm_scalar; }
  StepReport advance() override {
    state_ = adolf_local_step(std::move(state_), problem_, gossip_, options_);
    return state_.last;
  }

 private:
  const ProblemInstance& problem_;
  const GossipMatrix& gossip_;
  AdolfLocalState state_;
  AdolfLocalOptions options_;
};

class CondatVuMethod final : public Method {
 public:
  CondatVuMethod(const ProblemInstance& problem, const GossipMatrix& gossip, CondatVuState state)
      : problem_(problem), state_(std::move(state)), D_(state_.L_op * state_.Y) {
    check_shapes(problem_, gossip, state_.X_now);
  }
  std::string name() const override { return "condat_vu"; }
  int iteration() const override { return state_.k; }
  const Matrix& current() const override { return state_.X_now; }
  const Matrix& previous() const override { return state_.X_prev; }
  const Matrix* dual() const override { return &D_; }
  long comm_vector() const override { return state_.comm_vector; }
  StepReport advance() override {
    state_ = condat_vu_step(std::move(state_), problem_);
    D_.noalias() = state_.L_op * state_.Y;
    return state_.last;
  }

 private:
  const ProblemInstance& problem_;
  CondatVuState state_;
  Matrix D_;
};

class ExtraMethod final : public Method {
 public:
  ExtraMethod(const ProblemInstance& problem, const GossipMatrix& gossip, ExtraState state)
      : problem_(problem), gossip_(gossip), state_(std::move(state)) {
    check_shapes(problem_, gossip_, state_.X_now);
  }
  std::string name() const override { return "extra"; }
  int iteration() const override { return state_.k; }
  const Matrix& current() const override { return state_.X_now; }
  const Matrix& previous() const override { return state_.X_prev; }
  long comm_vector() const override { return state_.comm_vector; }
  StepReport advance() override {
    state_ = extra_step(std::move(state_), problem_, gossip_);
    return state_.last;
  }

 private:
  const ProblemInstance& problem_;
  const GossipMatrix& gossip_;
  ExtraState state_;
};

}  // namespace

std::unique_ptr<Method> make_adolf(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X_minus1, const Matrix& X0,
                                   const AdolfOptions& options) {
  return std::make_unique<AdolfMethod>(problem, gossip, adolf_start(X_minus1, X0, options),
                                       options);
}

std::unique_ptr<Method> make_adolf_local(const ProblemInstance& problem,
                                         const GossipMatrix& gossip, const Matrix& X_minus1,
                                         const Matrix& X0, const AdolfLocalOptions& options) {
  return std::make_unique<AdolfLocalMethod>(problem, gossip,
                                            adolf_local_start(X_minus1, X0, options), options);
}

std::unique_ptr<Method> make_condat_vu(const ProblemInstance& problem,
                                       const GossipMatrix& gossip, const Matrix& X_minus1,
                                       const Matrix& X0, const CondatVuOptions& options) {
  return std::make_unique<CondatVuMethod>(problem, gossip,
                                          condat_vu_start(X_minus1, X0, gossip, options));
}

std::unique_ptr<Method> make_extra(const ProblemInstance& problem, const GossipMatrix& gossip,
                                   const Matrix& X0, const ExtraOptions& options) {
  return std::make_unique<ExtraMethod>(problem, gossip, extra_start(X0, options));
}

}  // namespace adolf
