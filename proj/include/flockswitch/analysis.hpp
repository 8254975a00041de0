#pragma once

// Closed-form conditions and bounds of the switching-topology flocking
// framework, evaluated numerically. Infinite series are truncated with an
// analytic tail bound folded in on the conservative side: added for upper
// bounds, and for lower bounds added to the quantity being exponentiated away.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flockswitch/graph.hpp"
#include "flockswitch/weight.hpp"

namespace flockswitch {

struct FrameworkParams {
  int n_agents = 2;             // N
  std::vector<double> probs;    // p_k, one per admissible graph
  double h = 0.1;               // time step
  CommunicationWeight weight = CommunicationWeight::constant(1.0);  // kappa = phi(0)
  double M = 1.0;               // dwell-sum bound
  std::int64_t n = 1;           // base window length
  double c = 1.0;               // log coefficient of the window growth
  double epsilon = 0.0;         // 1/phi(r) = O(r^epsilon)
  std::optional<double> delta;  // exponent in the spatial-bound series
  std::optional<double> x_inf;  // candidate uniform bound on D(X)

  double kappa() const { return weight.kappa(); }
  double h_kappa() const { return h * weight.kappa(); }
};

struct BoundEntry {
  std::string label;
  double value = 0.0;
  std::optional<bool> pass;      // empty for informational rows
  std::optional<double> margin;  // positive when the condition holds
  std::string note;
};

/// Truncated series: value = partial + tail_bound.
struct SeriesValue {
  double value = 0.0;
  double partial = 0.0;
  double tail_bound = 0.0;
  std::int64_t terms = 0;  // index where summation stopped
};

struct SeriesDiagnostics {
  std::string label;
  SeriesValue series;
};

struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<BoundEntry> entries;
  std::vector<SeriesDiagnostics> series;

  /// True iff no entry failed.
  bool passed() const;
  const BoundEntry* find(const std::string& label) const;
};

// --- framework conditions ----------------------------------------------------

/// min_k log(1/(1 - p_k)).
double min_log_inverse_complement(std::span<const double> probs);
/// (M+N-1) log(1/(1-h kappa)) / min_k log(1/(1-p_k)).
double theorem_3_1_ratio(const FrameworkParams& p);
/// Admissibility of 0 < h kappa < 1, the ratio condition, the epsilon window,
/// and the tail exponent of phi against epsilon.
BoundReport check_theorem_3_1(const FrameworkParams& p);
/// The log coefficient picked in the proof: midpoint of the admissible c range.
double theorem_3_1_c(const FrameworkParams& p);

/// 1 + c (M+N-1) log(1 - h kappa); must be positive for the decay envelope.
double envelope_exponent(const FrameworkParams& p);
/// Open interval (1/A, 1/((N-1) eps)) for delta; the upper end is +inf when eps = 0.
std::pair<double, double> delta_window(const FrameworkParams& p);
/// Midpoint of delta_window, or lower end + 1 when the window is unbounded.
double default_delta(const FrameworkParams& p);
/// Reports the delta window and the epsilon window the window implies, next to
/// the epsilon window of check_theorem_3_1, and flags when they disagree.
BoundReport check_delta_window(const FrameworkParams& p);

// --- pathwise bounds -------------------------------------------------------------

/// Lower bound on mu(Phi) over a window of `window_length` steps whose N-1
/// sub-windows all have rooted union graphs, with D(X) <= x_inf throughout:
/// (1-h kappa)^L (h phi(x_inf) / (N (1-h kappa)))^(N-1).
double ergodicity_lower_bound(std::int64_t window_length, const FrameworkParams& p);
double ergodicity_lower_bound(std::int64_t window_length, const FrameworkParams& p, double phi_at_xinf);

/// Envelope e(r) with D(V[t]) <= D(V0) e(r) on the r-th window of N-1 sub-windows.
/// Throws std::domain_error("divergent envelope exponent") when envelope_exponent <= 0.
double velocity_decay_envelope(std::int64_t r, const FrameworkParams& p);
double velocity_decay_envelope(std::int64_t r, const FrameworkParams& p, double phi_at_xinf);

/// Both sides of exp(-x) <= (delta/e)^delta x^(-delta).
std::pair<double, double> exp_inequality_check(double x, double delta);

struct XinfResult {
  std::optional<double> x_inf;
  double lhs_at_x = 0.0;   // LHS evaluated at the returned x_inf
  double delta = 0.0;
  SeriesValue series;      // the x-independent series inside the LHS
};

/// sum_{r>=1} (n + c log((r+1)(N-1))) ((r+1)^A - 1)^(-delta).
SeriesValue xinf_series(const FrameworkParams& p, double delta);
/// Left-hand side of the spatial-bound condition at candidate x.
double xinf_lhs(const FrameworkParams& p, double init_dx, double init_dv, double x);
/// Smallest x on a geometric grid (refined by bisection) with LHS(x) < x, or
/// empty when none exists below `ceiling`. Throws std::domain_error when delta
/// lies outside its window.
XinfResult xinf_exists(const FrameworkParams& p, double init_dx, double init_dv, double ceiling = 1e300);

// --- probabilistic bounds --------------------------------------------------------------

/// sum_{l>=0} q^floor(c log(l+1)), summed in blocks of equal exponent.
SeriesValue p1_inner_series(double q, double c);
/// Lower bound p1(n) on P(every window union is rooted). Throws
/// std::domain_error naming the failing k when a hypothesis is violated.
double p1_lower_bound(std::int64_t n, double c, std::span<const double> probs);
double p1_lower_bound(std::int64_t n, double c, const TopologyEnsemble& ens);
BoundReport p1_report(std::int64_t n, double c, std::span<const double> probs);

/// Upper bound on sum_{i>=1} i^(-s), s > 1 (Euler-Maclaurin with a one-sided remainder).
SeriesValue zeta_upper(double s);

/// Upper bound p2(n) on P(some window dwell sum exceeds its threshold), Poisson dwelling.
double p2_poisson(std::int64_t n, double c, double M, int n_agents, double lambda_max);
/// First integer M meeting both convergence conditions; empty when none below 1e6.
std::optional<std::int64_t> smallest_valid_M_poisson(double c, int n_agents, double lambda_max);
BoundReport poisson_report(std::int64_t n, double c, double M, int n_agents, double lambda_max);

/// C(M) = (1+(N-1)/M)^(1+(N-1)/M) (M/(N-1))^((N-1)/M) (1-p_min)/p_min.
double geometric_C(double M, int n_agents, double p_min);
double p2_geometric(std::int64_t n, double c, double M, int n_agents, double p_min);
std::optional<std::int64_t> smallest_valid_M_geometric(double c, int n_agents, double p_min);
BoundReport geometric_report(std::int64_t n, double c, double M, int n_agents, double p_min);

/// Parameter inequalities of the continuous-time analogue (dwell = a + T_l).
BoundReport check_theorem_5_1(int n_agents, double kappa, double a, double M, std::span<const double> probs,
                              double epsilon);

}  // namespace flockswitch
