#pragma once

// Fixed instances shared by the acceptance runner and the unit tests.

#include <cstdint>

#include "adolf/diagnostics.hpp"
#include "adolf/objectives.hpp"
#include "adolf/run.hpp"
#include "adolf/topology.hpp"

namespace adolf::testing {

struct Instance {
  GossipMatrix gossip;
  ProblemInstance problem;
  SaddlePoint saddle;
  Matrix X0;
};

inline Instance make_instance(const Graph& graph, ProblemInstance problem, std::uint64_t init_seed,
                              double c = kDefaultShift) {
  GossipMatrix gossip = psd_shift(metropolis_hastings(graph), c);
  SaddlePoint saddle = compute_saddle(problem, gossip, 1e-12, 500000);
  Matrix X0 = initial_point(problem.agents(), problem.dimension(), init_seed);
  return Instance{std::move(gossip), std::move(problem), std::move(saddle), std::move(X0)};
}

/// 5-agent ring, ridge with d = 3.
inline Instance ring_ridge() {
  return make_instance(make_ring_graph(5), synth_ridge(5, 10, 3, 11), 12);
}

/// 6-agent line, ridge with d = 4.
inline Instance line_ridge() {
  return make_instance(make_line_graph(6), synth_ridge(6, 10, 4, 21), 22);
}

/// 10-agent Erdos-Renyi graph, noisy synthetic logistic regression.
inline Instance logistic10() {
  return make_instance(make_erdos_renyi(10, 0.4, 31), synth_logistic(10, 30, 5, 32, 0.1), 33);
}

/// m = 20, n = 20, d = 50 ridge on Erdos-Renyi p = 0.9.
inline Instance ridge20() {
  return make_instance(make_erdos_renyi(20, 0.9, 41), synth_ridge(20, 20, 50, 42), 43);
}

}  // namespace adolf::testing
