#pragma once

#include <cmath>
#include <stdexcept>

namespace flockswitch {

/// Communication weight phi. Constant: phi(r) = kappa.
/// PowerLaw: phi(r) = kappa * (1 + r^2)^(-beta).
/// Both are positive, bounded by phi(0) = kappa, nonincreasing and Lipschitz.
class CommunicationWeight {
 public:
  enum class Kind { Constant, PowerLaw };

  static CommunicationWeight constant(double kappa) { return {Kind::Constant, kappa, 0.0}; }
  static CommunicationWeight power_law(double kappa, double beta) {
    return {Kind::PowerLaw, kappa, beta};
  }

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double beta() const { return beta_; }

  template <typename Scalar>
  Scalar operator()(Scalar r) const {
    using std::pow;
    if (kind_ == Kind::Constant) return Scalar(kappa_);
    return Scalar(kappa_) * pow(Scalar(1) + r * r, Scalar(-beta_));
  }

  /// Smallest eps with 1/phi(r) = O(r^eps) as r -> infinity.
  double tail_exponent() const { return kind_ == Kind::Constant ? 0.0 : 2.0 * beta_; }

  /// Lipschitz constant of phi on [0, inf).
  double lipschitz() const {
    if (kind_ == Kind::Constant || beta_ == 0.0) return 0.0;
    // |phi'(r)| = 2 kappa beta r (1+r^2)^(-beta-1), maximized at r^2 = 1/(2 beta + 1)
    const double r = 1.0 / std::sqrt(2.0 * beta_ + 1.0);
    return 2.0 * kappa_ * beta_ * r * std::pow(1.0 + r * r, -beta_ - 1.0);
  }

  friend bool operator==(const CommunicationWeight&, const CommunicationWeight&) = default;

 private:
  CommunicationWeight(Kind kind, double kappa, double beta) : kind_(kind), kappa_(kappa), beta_(beta) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("weight: kappa must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("weight: beta must be >= 0");
  }

  Kind kind_;
  double kappa_;
  double beta_;
};

}  // namespace flockswitch
