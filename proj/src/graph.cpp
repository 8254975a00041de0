#include "flockswitch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace flockswitch {

Digraph::Digraph(int n_vertices, std::span<const Edge> edges) : n_(n_vertices) {
  if (n_vertices < 1) throw std::invalid_argument("digraph needs at least one vertex");
  chi_.assign(static_cast<std::size_t>(n_) * n_, 0);
  for (int i = 0; i < n_; ++i) chi_[index(i, i)] = 1;
  for (const Edge& e : edges) {
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
      throw std::invalid_argument("edge (" + std::to_string(e.from) + ", " + std::to_string(e.to) +
                                  ") out of range for " + std::to_string(n_) + " vertices");
    chi_[index(e.to, e.from)] = 1;
  }
}

Digraph Digraph::complete(int n_vertices) {
  std::vector<Edge> edges;
  for (int j = 0; j < n_vertices; ++j)
    for (int i = 0; i < n_vertices; ++i) edges.push_back({j, i});
  return Digraph(n_vertices, edges);
}

Digraph Digraph::from_one_based(int n_vertices, std::span<const std::pair<int, int>> pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [j, i] : pairs) {
    if (j < 1 || j > n_vertices || i < 1 || i > n_vertices)
      throw std::invalid_argument("edge [" + std::to_string(j) + ", " + std::to_string(i) +
                                  "] outside 1.." + std::to_string(n_vertices));
    edges.push_back({j - 1, i - 1});
  }
  return Digraph(n_vertices, edges);
}

std::vector<Edge> Digraph::edges() const {
  std::vector<Edge> out;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      if (has_edge(j, i)) out.push_back({j, i});
  return out;
}

std::vector<std::pair<int, int>> Digraph::one_based_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const Edge& e : edges())
    if (e.from != e.to) out.emplace_back(e.from + 1, e.to + 1);
  return out;
}

std::vector<bool> reachable_from(const Digraph& g, int root) {
  const int n = g.size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{root};
  seen[static_cast<std::size_t>(root)] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)] && g.has_edge(u, v)) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

bool has_spanning_tree(const Digraph& g) {
  for (int root = 0; root < g.size(); ++root) {
    const auto seen = reachable_from(g, root);
    if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return true;
  }
  return false;
}

Digraph union_graph(std::span<const Digraph* const> graphs) {
  if (graphs.empty()) throw std::invalid_argument("empty window");
  const int n = graphs.front()->size();
  std::vector<Edge> edges;
  for (const Digraph* g : graphs) {
    if (g->size() != n) throw std::invalid_argument("union of graphs with different vertex sets");
    const auto e = g->edges();
    edges.insert(edges.end(), e.begin(), e.end());
  }
  return Digraph(n, edges);
}

Digraph union_graph(std::span<const Digraph> graphs) {
  std::vector<const Digraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const Digraph& g : graphs) ptrs.push_back(&g);
  return union_graph(std::span<const Digraph* const>(ptrs));
}

TopologyEnsemble::TopologyEnsemble(std::vector<Digraph> graphs, std::vector<double> probs)
    : graphs_(std::move(graphs)), probs_(std::move(probs)) {
  if (graphs_.empty()) throw std::invalid_argument("topology ensemble needs at least one graph");
  if (graphs_.size() != probs_.size())
    throw std::invalid_argument("topology ensemble: " + std::to_string(graphs_.size()) +
                                " graphs but " + std::to_string(probs_.size()) + " probabilities");
  for (const Digraph& g : graphs_)
    if (g.size() != graphs_.front().size())
      throw std::invalid_argument("topology ensemble graphs must share the vertex set");
  for (double p : probs_)
    if (!(p > 0.0)) throw std::invalid_argument("choice probabilities p_k must be positive");
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw std::invalid_argument("choice probabilities must sum to 1 (got " +
                                std::to_string(total) + ")");
}

Digraph TopologyEnsemble::union_of_all() const { return union_graph(std::span<const Digraph>(graphs_)); }

}  // namespace flockswitch
