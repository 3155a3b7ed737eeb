#include <doctest.h>

#include <cmath>
#include <vector>

#include "adolf/diagnostics.hpp"
#include "adolf/error.hpp"
#include "adolf/trace.hpp"
#include "generators.hpp"
#include "instances.hpp"

using namespace adolf;
using adolf::testing::Gen;
using adolf::testing::Instance;
using adolf::testing::kPropertyCases;

TEST_CASE("saddle point conditions") {
  Gen gen(41);
  for (int t = 0; t < kPropertyCases / 4; ++t) {
    const GossipMatrix w = gen.gossip(2, 10);
    const int m = w.size();
    const int d = gen.integer(1, 5);
    const ProblemInstance p =
        gen.coin() ? synth_ridge(m, 8, d, gen.seed()) : synth_logistic(m, 20, d, gen.seed(), 0.1);
    const SaddlePoint s = compute_saddle(p, w, 1e-12, 300000);
    const Matrix L = graph_laplacian_sqrt(w);
    CHECK((L * s.X_star).norm() <= 1e-9);
    const Matrix G = p.stacked_gradient(s.X_star);
    CHECK((G + L * s.Y_star).norm() <= std::max(1e-8, 1e-12 * G.norm()));
    CHECK(s.Y_star.colwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((s.LY_star - L * s.Y_star).norm() <= 1e-12);
    CHECK_FALSE(s.inexact);
  }
}

TEST_CASE("identical agents have a zero dual solution") {
  Gen gen(42);
  const auto f = std::make_shared<QuadraticObjective>(gen.spd(3, 0.5, 2.0), gen.gaussian_vector(3));
  const ProblemInstance p(std::vector<std::shared_ptr<const LocalObjective>>(5, f));
  const GossipMatrix w = psd_shift(metropolis_hastings(make_ring_graph(5)), 0.4);
  const SaddlePoint s = compute_saddle(p, w, 1e-12);
  CHECK(s.Y_star.norm() <= 1e-10);
}

TEST_CASE("primal gap, merit and Lyapunov at and around the saddle") {
  const Instance inst = adolf::testing::line_ridge();
  const SaddlePoint& s = inst.saddle;
  const Matrix L = graph_laplacian_sqrt(inst.gossip);
  CHECK(std::abs(primal_gap(inst.problem, s.X_star, s)) <= 1e-12);
  CHECK(std::abs(merit(inst.problem, inst.gossip, s.X_star, s)) <= 1e-12);
  const LyapunovInputs at{s.X_star, s.X_star, s.Y_star, 1.0, 1.0, 0.1};
  CHECK(lyapunov(inst.problem, at, s) == 0.0);
  const Matrix moved = s.X_star + 1e-3 * Matrix::Ones(s.X_star.rows(), s.X_star.cols());
  const LyapunovInputs off{moved, s.X_star, s.Y_star, 1.0, 1.0, 0.1};
  CHECK(lyapunov(inst.problem, off, s) > 0.0);
}

TEST_CASE("property: gap identities on random points") {
  Gen gen(43);
  const Instance inst = adolf::testing::logistic10();
  const SaddlePoint& s = inst.saddle;
  const Matrix L = graph_laplacian_sqrt(inst.gossip);
  const double L_star = lagrangian(inst.problem, L, s.X_star, s.Y_star);
  for (int t = 0; t < kPropertyCases; ++t) {
    const Matrix X = s.X_star + gen.uniform(0.01, 2.0) * gen.gaussian(10, 5);
    const double gap = primal_gap(inst.problem, X, s);
    CHECK(gap >= -1e-10);
    CHECK(gap == doctest::Approx(lagrangian(inst.problem, L, X, s.Y_star) - L_star).epsilon(1e-10));
    const double mer = merit(inst.problem, inst.gossip, X, s);
    const double cons = (L * X).squaredNorm();
    CHECK(std::abs(mer - (gap + cons)) <= 1e-12 * (1.0 + std::abs(mer)));
    CHECK(consensus_error(inst.gossip, X) == doctest::Approx(cons).epsilon(1e-12));

    // Consensual points: the dual term vanishes and the merit is the objective-sum gap.
    const Matrix C = Vector::Ones(10) * gen.gaussian_vector(5).transpose();
    const double sum_gap = inst.problem.stacked_value(C) - inst.problem.stacked_value(s.X_star);
    CHECK(merit(inst.problem, inst.gossip, C, s) == doctest::Approx(sum_gap).epsilon(1e-9));
  }
}

TEST_CASE("objective gap averages the network objective over agents") {
  const Instance inst = adolf::testing::ring_ridge();
  Gen gen(44);
  const Matrix X = gen.gaussian(5, 3);
  double total = 0.0;
  for (int i = 0; i < 5; ++i) total += inst.problem.average_value(X.row(i).transpose());
  CHECK(objective_gap(inst.problem, X, inst.saddle) ==
        doctest::Approx(total / 5 - inst.saddle.f_star));
  CHECK(std::abs(objective_gap(inst.problem, inst.saddle.X_star, inst.saddle)) <= 1e-12);
}

TEST_CASE("ergodic accumulator") {
  Gen gen(45);
  ErgodicAccumulator acc(2, 3);
  CHECK(acc.empty());
  const Matrix a = gen.gaussian(2, 3);
  acc.update(a, 1.0);
  CHECK(acc.average() == a);

  ErgodicAccumulator plain(2, 3);
  ErgodicAccumulator weighted(2, 3);
  Matrix sum = Matrix::Zero(2, 3);
  Matrix wsum = Matrix::Zero(2, 3);
  double theta = 0.0;
  for (int t = 0; t < 7; ++t) {
    const Matrix x = gen.gaussian(2, 3);
    const double g = gen.uniform(0.5, 1.6);
    plain.update(x, 1.0);
    weighted.update(x, g);
    sum += x;
    wsum += g * x;
    theta += g;
  }
  CHECK((plain.average() - sum / 7.0).norm() <= 1e-14);
  CHECK((weighted.average() - wsum / theta).norm() <= 1e-14);
  CHECK(weighted.theta() == doctest::Approx(theta));
}

TEST_CASE("restricted constants") {
  RestrictedConstants rc;
  CHECK_FALSE(rc.L_tilde_hat());
  rc.observe_secant(3.0, 1.0);
  rc.observe_secant(2.0, 0.5);
  rc.observe_secant(4.0, 0.7);
  CHECK(*rc.L_tilde_hat() == 4.0);
  CHECK(*rc.mu_tilde_hat() == 0.5);
}

TEST_CASE("fixed-stepsize bounds") {
  CHECK(classical_stepsize_bound(2.0, 1.0, 2.0) == doctest::Approx(0.5));
  CHECK(classical_stepsize_bound(2.0, 1e-12, 2.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(network_free_stepsize_bound(0.0, 2.0) == doctest::Approx(0.5));
  CHECK(network_free_stepsize_bound(3.0, 8.0) == doctest::Approx(0.125));
}

TEST_CASE("rate fits on synthetic sequences") {
  std::vector<double> k, geo, pow;
  for (int i = 1; i <= 40; ++i) {
    k.push_back(i);
    geo.push_back(std::pow(0.5, i));
    pow.push_back(1.0 / i);
  }
  const RateFit g = rate_fit(k, geo);
  CHECK(g.geometric_slope == doctest::Approx(std::log(0.5)));
  CHECK(g.geometric_r2 == doctest::Approx(1.0));
  CHECK(g.kind == RateKind::Linear);
  const RateFit p = rate_fit(k, pow);
  CHECK(p.power_slope == doctest::Approx(-1.0));
  CHECK(p.power_r2 == doctest::Approx(1.0));
  CHECK(p.kind == RateKind::Sublinear);

  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(rate_fit(two, two), Error);

  Trace t;
  for (int i = 0; i <= 20; ++i) {
    TraceRecord r;
    r.k = i;
    r.distance_sq = std::pow(0.9, i);
    t.records.push_back(r);
  }
  CHECK(rate_fit(t, Metric::DistanceSq, 5, 20).geometric_slope == doctest::Approx(std::log(0.9)));
  CHECK_THROWS_AS(rate_fit(t, Metric::Lyapunov, 0, 20), Error);
}
