#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "flockswitch/graph.hpp"
#include "flockswitch/rng.hpp"

namespace fst {

using flockswitch::Digraph;
using flockswitch::Edge;
using flockswitch::Rng;

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random spanning arborescence rooted at a random vertex, plus extra random edges.
inline Digraph planted_rooted(int n, Rng& rng, double extra = 0.1) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) edges.push_back({order[uniform_int(rng, 0, k - 1)], order[k]});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && rng.uniform() < extra) edges.push_back({j, i});
  return Digraph(n, edges);
}

inline Digraph random_digraph(int n, Rng& rng, double density) {
  std::vector<Edge> edges;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && rng.uniform() < density) edges.push_back({j, i});
  return Digraph(n, edges);
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = rng.uniform(lo, hi);
  return m;
}

// Row-normalized random weights on the support of `g` (diagonal included).
inline Eigen::MatrixXd random_stochastic_on(const Digraph& g, Rng& rng) {
  const int n = g.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (g.chi(i, j)) m(i, j) = 0.05 + rng.uniform();
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// Random stochastic matrix with each entry zeroed with probability `sparsity`.
inline Eigen::MatrixXd random_stochastic(int n, Rng& rng, double sparsity = 0.0) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform() < sparsity ? 0.0 : rng.uniform();
    if (m.row(i).sum() == 0.0) m(i, uniform_int(rng, 0, n - 1)) = 1.0;
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

}  // namespace fst
