#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace flockswitch {

// Edge direction convention, used everywhere in this library:
//   an edge {from = j, to = i} means "agent j influences agent i",
//   i.e. j is a neighbour of i and chi(i, j) = 1.
// Vertices are 0-based in the API and 1-based in config files and CSV output.
struct Edge {
  int from;
  int to;
};

/// Directed graph on vertices {0, ..., N-1}. Every vertex carries a self-loop;
/// loops are inserted on construction. Immutable after construction.
class Digraph {
 public:
  Digraph(int n_vertices, std::span<const Edge> edges);
  explicit Digraph(int n_vertices) : Digraph(n_vertices, {}) {}

  static Digraph complete(int n_vertices);
  /// Edges given as 1-based [j, i] pairs, as they appear in config files.
  static Digraph from_one_based(int n_vertices, std::span<const std::pair<int, int>> pairs);

  int size() const { return n_; }
  bool has_edge(int from, int to) const { return chi_[index(to, from)] != 0; }
  /// chi_ij: 1 iff (j, i) is an edge.
  bool chi(int i, int j) const { return chi_[index(i, j)] != 0; }

  /// All edges, self-loops included, sorted by (from, to).
  std::vector<Edge> edges() const;
  /// Edges without the implicit self-loops, 1-based, for serialization.
  std::vector<std::pair<int, int>> one_based_pairs() const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<std::uint8_t> chi_;  // row-major, chi_[i*N + j]
};

/// 0-1 adjacency matrix chi with chi(i, j) = 1 iff (j, i) is an edge.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> adjacency_matrix(const Digraph& g) {
  const int n = g.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g.chi(i, j) ? Scalar(1) : Scalar(0);
  return a;
}

/// Vertices reachable from `root` along directed edges (root included).
std::vector<bool> reachable_from(const Digraph& g, int root);

/// True iff some vertex reaches every other vertex (the graph is rooted).
bool has_spanning_tree(const Digraph& g);

/// Edge-set union. Throws std::invalid_argument on an empty list ("empty window")
/// or mismatched vertex counts.
Digraph union_graph(std::span<const Digraph> graphs);
Digraph union_graph(std::span<const Digraph* const> graphs);

/// The admissible set S_G together with its choice probabilities p_k.
class TopologyEnsemble {
 public:
  static constexpr double kProbabilityTolerance = 1e-12;

  TopologyEnsemble(std::vector<Digraph> graphs, std::vector<double> probs);

  int n_vertices() const { return graphs_.front().size(); }
  int n_graphs() const { return static_cast<int>(graphs_.size()); }
  const Digraph& graph(int k) const { return graphs_.at(static_cast<std::size_t>(k)); }
  const std::vector<Digraph>& graphs() const { return graphs_; }
  const std::vector<double>& probs() const { return probs_; }

  /// Union of every admissible graph; rooted iff the framework's connectivity
  /// assumption holds.
  Digraph union_of_all() const;

  friend bool operator==(const TopologyEnsemble&, const TopologyEnsemble&) = default;

 private:
  std::vector<Digraph> graphs_;
  std::vector<double> probs_;
};

}  // namespace flockswitch
