#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace adolf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected, connected communication graph over agents 0..m-1.
///
/// Edges are stored as sorted pairs (i < j) without duplicates. Construction
/// rejects self-loops, out-of-range endpoints and disconnected edge sets.
class Graph {
 public:
  Graph(int m, std::vector<std::pair<int, int>> edges);

  int size() const noexcept { return m_; }
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }
  bool has_edge(int i, int j) const;

  /// Longest shortest-path length (in hops) between any two agents.
  int diameter() const;

  bool operator==(const Graph& other) const {
    return m_ == other.m_ && edges_ == other.edges_;
  }

 private:
  int m_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// True when every agent is reachable from agent 0.
bool is_connected(int m, const std::vector<std::pair<int, int>>& edges);

Graph make_line_graph(int m);
Graph make_ring_graph(int m);
Graph make_complete_graph(int m);

/// Erdos-Renyi G(m, p), resampled as a whole until connected.
Graph make_erdos_renyi(int m, double p, std::uint64_t seed,
                       int max_attempts = 100000);

/// Edge-list text format: first line "m", then one "i j" pair per line.
void write_edge_list(std::ostream& os, const Graph& graph);
Graph read_edge_list(std::istream& is);

/// Gossip weights W~ compliant with a graph, optionally with the
/// positive-definite shift W = (1-c) I + c W~.
class GossipMatrix {
 public:
  GossipMatrix(Graph graph, Matrix w_tilde);

  const Graph& graph() const noexcept { return graph_; }
  int size() const noexcept { return graph_.size(); }
  const Matrix& w_tilde() const noexcept { return w_tilde_; }

  bool is_shifted() const noexcept { return shift_.has_value(); }
  /// Shift coefficient c; throws if the matrix has not been shifted.
  double c() const;
  /// Shifted matrix W; throws if the matrix has not been shifted.
  const Matrix& w() const;
  /// I - W, the operator applied in every dual update.
  const Matrix& laplacian() const;

  friend GossipMatrix psd_shift(const GossipMatrix& gossip, double c);

 private:
  struct Shift {
    double c;
    Matrix w;
    Matrix i_minus_w;
  };

  Graph graph_;
  Matrix w_tilde_;
  std::optional<Shift> shift_;
};

GossipMatrix metropolis_hastings(const Graph& graph);

/// W = (1-c) I + c W~ for c in (0, 1/2).
GossipMatrix psd_shift(const GossipMatrix& gossip, double c);

inline constexpr double kDefaultShift = 0.4;

struct SpectralSummary {
  double lambda2;
  double lambda_m;
  double spectral_gap;
  Vector eigenvalues;  // nonincreasing
};

SpectralSummary spectral_summary(const GossipMatrix& gossip);

/// Symmetric PSD square root of I - W (the matrix Ł).
Matrix graph_laplacian_sqrt(const GossipMatrix& gossip);

/// Moore-Penrose pseudoinverse of Ł = (I - W)^{1/2}.
Matrix graph_laplacian_sqrt_pinv(const GossipMatrix& gossip);

struct GossipCheck {
  double symmetry_error;
  double row_sum_error;
  bool pattern_matches;
  bool diagonal_positive;
};

/// Measures the doubly-stochastic / graph-compliance invariants of a matrix.
GossipCheck check_gossip(const Graph& graph, const Matrix& w);

}  // namespace adolf
