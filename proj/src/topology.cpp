#include "adolf/topology.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "adolf/error.hpp"

namespace adolf {

namespace {

std::vector<std::vector<int>> build_adjacency(
    int m, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj,
                               int source) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<int> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

std::vector<std::pair<int, int>> normalize_edges(
    int m, std::vector<std::pair<int, int>> edges) {
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= m || j >= m) {
      throw invalid_argument("edge (" + std::to_string(i) + "," +
                             std::to_string(j) + ") out of range for m=" +
                             std::to_string(m));
    }
    if (i == j) {
      throw invalid_argument("self-loop at agent " + std::to_string(i));
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw invalid_argument("duplicate edge in graph");
  }
  return edges;
}

}  // namespace

Graph::Graph(int m, std::vector<std::pair<int, int>> edges) : m_(m) {
  if (m < 1) {
    throw invalid_argument("graph needs at least 1 agent, got " +
                           std::to_string(m));
  }
  edges_ = normalize_edges(m, std::move(edges));
  adjacency_ = build_adjacency(m, edges_);
  const auto dist = bfs_distances(adjacency_, 0);
  if (std::find(dist.begin(), dist.end(), -1) != dist.end()) {
    throw invalid_argument("graph is not connected");
  }
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
}

int Graph::diameter() const {
  int best = 0;
  for (int s = 0; s < m_; ++s) {
    const auto dist = bfs_distances(adjacency_, s);
    best = std::max(best, *std::max_element(dist.begin(), dist.end()));
  }
  return best;
}

bool is_connected(int m, const std::vector<std::pair<int, int>>& edges) {
  if (m < 1) return false;
  const auto dist = bfs_distances(build_adjacency(m, edges), 0);
  return std::find(dist.begin(), dist.end(), -1) == dist.end();
}

Graph make_line_graph(int m) {
  if (m < 2) throw invalid_argument("line graph needs m >= 2");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  return Graph(m, std::move(edges));
}

Graph make_ring_graph(int m) {
  if (m < 3) throw invalid_argument("ring graph needs m >= 3");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(0, m - 1);
  return Graph(m, std::move(edges));
}

Graph make_complete_graph(int m) {
  if (m < 2) throw invalid_argument("complete graph needs m >= 2");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  return Graph(m, std::move(edges));
}

Graph make_erdos_renyi(int m, double p, std::uint64_t seed, int max_attempts) {
  if (m < 2) throw invalid_argument("Erdos-Renyi graph needs m >= 2");
  if (!(p > 0.0 && p <= 1.0)) {
    throw invalid_argument("edge probability must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (coin(rng) < p) edges.emplace_back(i, j);
      }
    }
    if (is_connected(m, edges)) return Graph(m, std::move(edges));
  }
  throw Error(ErrorKind::Data, "failed to sample a connected Erdos-Renyi graph after " +
                                   std::to_string(max_attempts) + " attempts");
}

void write_edge_list(std::ostream& os, const Graph& graph) {
  os << graph.size() << '\n';
  for (const auto& [i, j] : graph.edges()) os << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& is) {
  std::string line;
  int m = -1;
  std::vector<std::pair<int, int>> edges;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (m < 0) {
      if (!(ls >> m)) throw data_error("edge list: bad agent count on line 1");
      continue;
    }
    int i = 0;
    int j = 0;
    if (!(ls >> i >> j)) {
      throw data_error("edge list: malformed pair on line " +
                       std::to_string(line_no));
    }
    edges.emplace_back(i, j);
  }
  if (m < 0) throw data_error("edge list: empty input");
  return Graph(m, std::move(edges));
}

GossipMatrix::GossipMatrix(Graph graph, Matrix w_tilde)
    : graph_(std::move(graph)), w_tilde_(std::move(w_tilde)) {
  if (w_tilde_.rows() != graph_.size() || w_tilde_.cols() != graph_.size()) {
    throw shape_error("gossip matrix must be m x m");
  }
}

double GossipMatrix::c() const {
  if (!shift_) throw invalid_argument("gossip matrix has no PSD shift applied");
  return shift_->c;
}

const Matrix& GossipMatrix::w() const {
  if (!shift_) throw invalid_argument("gossip matrix has no PSD shift applied");
  return shift_->w;
}

const Matrix& GossipMatrix::laplacian() const {
  if (!shift_) throw invalid_argument("gossip matrix has no PSD shift applied");
  return shift_->i_minus_w;
}

GossipMatrix metropolis_hastings(const Graph& graph) {
  const int m = graph.size();
  Matrix w = Matrix::Zero(m, m);
  for (const auto& [i, j] : graph.edges()) {
    const double weight =
        1.0 / (1.0 + std::max(graph.degree(i), graph.degree(j)));
    w(i, j) = weight;
    w(j, i) = weight;
  }
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    for (int j : graph.neighbors(i)) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return GossipMatrix(graph, std::move(w));
}

GossipMatrix psd_shift(const GossipMatrix& gossip, double c) {
  if (!(c > 0.0 && c < 0.5)) {
    throw invalid_argument("c must lie in (0, 1/2), got " + std::to_string(c));
  }
  const int m = gossip.size();
  GossipMatrix out(gossip.graph(), gossip.w_tilde());
  Matrix w = (1.0 - c) * Matrix::Identity(m, m) + c * gossip.w_tilde();
  Matrix i_minus_w = Matrix::Identity(m, m) - w;
  out.shift_ = GossipMatrix::Shift{c, std::move(w), std::move(i_minus_w)};
  return out;
}

SpectralSummary spectral_summary(const GossipMatrix& gossip) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gossip.w());
  if (solver.info() != Eigen::Success) {
    throw numeric_error("eigensolver failed on gossip matrix");
  }
  // Eigen returns ascending order.
  Vector ev = solver.eigenvalues().reverse();
  SpectralSummary s;
  s.eigenvalues = ev;
  s.lambda2 = ev.size() > 1 ? ev(1) : ev(0);
  s.lambda_m = ev(ev.size() - 1);
  s.spectral_gap = 1.0 - s.lambda2;
  return s;
}

namespace {

Matrix laplacian_root(const GossipMatrix& gossip, bool pseudo_inverse) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gossip.laplacian());
  if (solver.info() != Eigen::Success) {
    throw numeric_error("eigensolver failed on I - W");
  }
  Vector ev = solver.eigenvalues();
  // I - W has exactly one zero eigenvalue (connected graph); everything at
  // rounding level is treated as that null direction.
  const double zero_tol = 1e-12;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double lam = ev(i) > zero_tol ? ev(i) : 0.0;
    if (pseudo_inverse) {
      ev(i) = lam > 0.0 ? 1.0 / std::sqrt(lam) : 0.0;
    } else {
      ev(i) = std::sqrt(lam);
    }
  }
  const Matrix& v = solver.eigenvectors();
  Matrix root = v * ev.asDiagonal() * v.transpose();
  return 0.5 * (root + root.transpose());
}

}  // namespace

Matrix graph_laplacian_sqrt(const GossipMatrix& gossip) {
  return laplacian_root(gossip, false);
}

Matrix graph_laplacian_sqrt_pinv(const GossipMatrix& gossip) {
  return laplacian_root(gossip, true);
}

GossipCheck check_gossip(const Graph& graph, const Matrix& w) {
  GossipCheck out{0.0, 0.0, true, true};
  const int m = graph.size();
  out.symmetry_error = (w - w.transpose()).cwiseAbs().maxCoeff();
  out.row_sum_error = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  for (int i = 0; i < m; ++i) {
    if (!(w(i, i) > 0.0)) out.diagonal_positive = false;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const bool nonzero = w(i, j) != 0.0;
      if (nonzero != graph.has_edge(i, j) || w(i, j) < 0.0) {
        out.pattern_matches = false;
      }
    }
  }
  return out;
}

}  // namespace adolf
