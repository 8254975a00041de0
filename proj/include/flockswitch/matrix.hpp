#pragma once

// Stochastic-matrix algebra for the velocity update V[t+1] = M[t] V[t].
// All routines are dense and templated on the Eigen scalar type.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "flockswitch/graph.hpp"
#include "flockswitch/weight.hpp"

namespace flockswitch {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row-sum tolerance for a freshly built update matrix.
inline constexpr double kFreshStochasticTol = 1e-12;
/// Row-sum tolerance for long flow products.
inline constexpr double kProductStochasticTol = 1e-10;

template <typename Derived>
bool is_nonnegative(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol = 0) {
  return (a.array() >= -tol).all();
}

template <typename Derived>
bool is_stochastic(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol) {
  using std::abs;
  if (a.rows() != a.cols()) return false;
  if (!is_nonnegative(a, tol)) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (abs(a.row(i).sum() - typename Derived::Scalar(1)) > tol) return false;
  return true;
}

/// mu(A) = min_{i,j} sum_k min(a_ik, a_jk). For a 1x1 matrix this is a_11.
template <typename Derived>
typename Derived::Scalar ergodicity_coefficient(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw std::invalid_argument("ergodicity coefficient of a non-square matrix");
  if (!is_nonnegative(a)) throw std::invalid_argument("not nonnegative");
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar s = a.row(i).cwiseMin(a.row(j)).sum();
      if (s < best) best = s;
    }
  return best;
}

/// Every pair of rows (including a row with itself) shares a positive column.
template <typename Derived>
bool is_scrambling(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw std::invalid_argument("scrambling test of a non-square matrix");
  if (!is_nonnegative(a)) throw std::invalid_argument("not nonnegative");
  const Eigen::Index n = a.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      bool shared = false;
      for (Eigen::Index k = 0; k < n && !shared; ++k) shared = a(i, k) > Scalar(0) && a(j, k) > Scalar(0);
      if (!shared) return false;
    }
  return true;
}

/// The one-step velocity map Id - (h/N) L with L = D - A,
/// a_ij = chi_ij phi(|x_i - x_j|), d_i = sum_j a_ij.
/// Requires 0 < h*kappa < 1, which makes the result stochastic and nonnegative.
template <typename Derived>
MatrixX<typename Derived::Scalar> update_matrix(const Eigen::MatrixBase<Derived>& positions,
                                                const Digraph& g, double h,
                                                const CommunicationWeight& w) {
  using Scalar = typename Derived::Scalar;
  const double hk = h * w.kappa();
  if (!(h > 0.0) || !(hk < 1.0)) throw std::domain_error("stability condition violated: need 0 < h*kappa < 1");
  const Eigen::Index n = positions.rows();
  if (n != g.size()) throw std::invalid_argument("update_matrix: positions and graph disagree on N");
  const Scalar scale = Scalar(h) / Scalar(n);
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar off = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || !g.chi(static_cast<int>(i), static_cast<int>(j))) continue;
      const Scalar a_ij = w((positions.row(i) - positions.row(j)).norm());
      m(i, j) = scale * a_ij;
      off += m(i, j);
    }
    // the self-loop term a_ii appears in both D and A and cancels
    m(i, i) = Scalar(1) - off;
  }
  return m;
}

/// Ordered product of one-step maps. `ms` is in time order (ms[0] acts first),
/// so the result is ms.back() * ... * ms[0], mapping V[s0] to V[s1].
template <typename Scalar>
MatrixX<Scalar> flow_product(std::span<const MatrixX<Scalar>> ms) {
  if (ms.empty()) throw std::invalid_argument("flow_product of an empty window");
  MatrixX<Scalar> acc = ms.front();
  for (std::size_t k = 1; k < ms.size(); ++k) {
    if (ms[k].rows() != acc.rows() || ms[k].cols() != acc.cols())
      throw std::invalid_argument("flow_product: dimension mismatch");
    acc = ms[k] * acc;
  }
  return acc;
}

/// Running Phi[s, s0]. Starts at the identity (Phi[s0, s0] = Id); each push
/// multiplies the new one-step map on the left.
template <typename Scalar>
class FlowAccumulator {
 public:
  explicit FlowAccumulator(Eigen::Index n) : phi_(MatrixX<Scalar>::Identity(n, n)), steps_(0) {}

  void push(const MatrixX<Scalar>& m) {
    phi_ = m * phi_;
    ++steps_;
  }
  void reset() {
    phi_.setIdentity();
    steps_ = 0;
  }
  const MatrixX<Scalar>& value() const { return phi_; }
  std::size_t steps() const { return steps_; }

 private:
  MatrixX<Scalar> phi_;
  std::size_t steps_;
};

/// Maximum Euclidean distance between rows; 0 for a single row.
template <typename Derived>
typename Derived::Scalar diameter(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  Scalar best = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      const Scalar d = (rows.row(i) - rows.row(j)).squaredNorm();
      if (d > best) best = d;
    }
  using std::sqrt;
  return sqrt(best);
}

template <typename Scalar>
struct ContractionCheck {
  Scalar lhs;  // diameter(A Z + B)
  Scalar rhs;  // (1 - mu(A)) diameter(Z) + sqrt(2) |B|_F
  bool holds(Scalar tol = 0) const { return lhs <= rhs + tol; }
};

/// Evaluates both sides of diameter(AZ + B) <= (1 - mu(A)) diameter(Z) + sqrt(2)|B|_F.
template <typename DA, typename DZ, typename DB>
ContractionCheck<typename DA::Scalar> contraction_check(const Eigen::MatrixBase<DA>& a,
                                                        const Eigen::MatrixBase<DZ>& z,
                                                        const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  if (!is_stochastic(a, Scalar(kProductStochasticTol)))
    throw std::invalid_argument("contraction_check: A is not stochastic");
  if (z.rows() != a.cols() || b.rows() != a.rows() || b.cols() != z.cols())
    throw std::invalid_argument("contraction_check: dimension mismatch");
  const MatrixX<Scalar> w = a * z + b;
  const Scalar mu = ergodicity_coefficient(a);
  using std::sqrt;
  return {diameter(w), (Scalar(1) - mu) * diameter(z) + sqrt(Scalar(2)) * b.norm()};
}

}  // namespace flockswitch
