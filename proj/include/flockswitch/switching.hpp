#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flockswitch/graph.hpp"
#include "flockswitch/rng.hpp"

namespace flockswitch {

/// a_l(n, c): a_0 = 0, a_{l+1} = a_l + n + floor(c log(l+1)), natural log.
std::int64_t a_sequence(std::int64_t n, double c, std::int64_t ell);
/// a_0, ..., a_{count-1}.
std::vector<std::int64_t> a_prefix(std::int64_t n, double c, std::size_t count);

/// Law of the dwelling-time surplus T_l (t_{l+1} - t_l = 1 + T_l).
class DwellingProcess {
 public:
  enum class Kind { Poisson, Geometric, Deterministic };
  using Sequence = std::function<double(std::uint64_t)>;

  static DwellingProcess poisson(double rate);
  /// Rates cycled periodically: lambda_l = rates[l mod size].
  static DwellingProcess poisson(std::vector<double> rates);
  /// Arbitrary rate sequence; lambda_max must bound it from above.
  static DwellingProcess poisson(Sequence rates, double lambda_max);
  static DwellingProcess geometric(double p);
  static DwellingProcess geometric(std::vector<double> ps);
  /// Arbitrary success-probability sequence; p_min must bound it from below.
  static DwellingProcess geometric(Sequence ps, double p_min);
  static DwellingProcess deterministic(std::int64_t value);

  Kind kind() const { return kind_; }
  /// lambda_l (Poisson) or p_l (Geometric); validated against bound().
  double parameter(std::uint64_t ell) const;
  /// lambda_max for Poisson, p_min for Geometric, the value for Deterministic.
  double bound() const { return bound_; }
  std::int64_t deterministic_value() const { return value_; }
  /// The periodic parameter list, empty for an arbitrary sequence.
  const std::vector<double>& periodic_values() const { return values_; }

 private:
  DwellingProcess(Kind kind, std::vector<double> values, Sequence seq, double bound, std::int64_t value);

  Kind kind_;
  std::vector<double> values_;
  Sequence seq_;
  double bound_;
  std::int64_t value_;
};

std::int64_t sample_poisson(double lambda, Rng& rng);
std::int64_t sample_geometric(double p, Rng& rng);
std::int64_t sample_dwelling(const DwellingProcess& p, std::uint64_t ell, Rng& rng);

/// One realized switching path: instants t_0 = 0 < t_1 < ..., the topology
/// index chosen at each instant (0-based), and the dwell draws T_l.
/// dwell_draws[l] = t_{l+1} - t_l - 1 for every l < instants.size() - 1; it may
/// run further ahead than the instants when extended for window checks.
struct SwitchingSchedule {
  std::vector<std::int64_t> instants;
  std::vector<int> choices;
  std::vector<std::int64_t> dwell_draws;

  std::int64_t last_instant() const { return instants.back(); }
};

/// Lazily grows one sample path. Dwell draws and topology choices consume
/// independent sub-streams of the path seed, so extending never reshuffles
/// earlier draws.
class ScheduleSampler {
 public:
  ScheduleSampler(const TopologyEnsemble& ens, DwellingProcess process, std::uint64_t seed);

  /// Until the last instant is >= horizon.
  void extend_to_time(std::int64_t horizon);
  /// Until at least `count` instants exist.
  void extend_to_instants(std::size_t count);
  /// Until at least `count` dwell draws exist (instants are not advanced).
  void extend_draws(std::size_t count);

  const SwitchingSchedule& schedule() const { return sched_; }
  SwitchingSchedule take() && { return std::move(sched_); }

 private:
  void push_instant();
  int draw_choice();

  const TopologyEnsemble* ens_;
  DwellingProcess process_;
  Rng dwell_rng_;
  Rng choice_rng_;
  std::vector<double> cumulative_;
  SwitchingSchedule sched_;
};

/// Instants from t_0 = 0 up to and including the first instant >= horizon.
SwitchingSchedule generate_schedule(const TopologyEnsemble& ens, const DwellingProcess& p,
                                    std::int64_t horizon, std::uint64_t seed);

/// Only the dwell draws T_0 .. T_{count-1} of the path with this seed.
std::vector<std::int64_t> generate_dwell_draws(const DwellingProcess& p, std::size_t count,
                                               std::uint64_t seed);

/// sigma[t]: choice of the unique l with t_l <= t < t_{l+1}.
/// Throws std::out_of_range unless 0 <= t < last instant.
int topology_at(const SwitchingSchedule& s, std::int64_t t);

/// Sum of T_l over l in [a_{(i-1)(N-1)}, a_{i(N-1)} - 1], i >= 1.
/// Throws std::out_of_range("insufficient schedule") when draws run out.
std::int64_t window_dwell_sum(std::span<const std::int64_t> draws, std::int64_t i, std::int64_t n,
                              double c, int n_agents);
std::int64_t window_dwell_sum(const SwitchingSchedule& s, std::int64_t i, std::int64_t n, double c,
                              int n_agents);

/// M (n + floor(c log(i (N-1)))); a window sum at or above this violates the
/// dwell-time bound.
double dwell_threshold(std::int64_t i, std::int64_t n, double c, double M, int n_agents);

struct DwellBoundCheck {
  bool holds = true;                          // every checked window is strictly below threshold
  std::optional<std::int64_t> first_violation;
  std::int64_t windows_checked = 0;           // largest fully covered window index
};

/// Checks windows i = 1 .. i_max (or as many as the draws cover when i_max is empty).
DwellBoundCheck check_dwell_bound(std::span<const std::int64_t> draws, std::int64_t n, double c,
                                  double M, int n_agents, std::optional<std::int64_t> i_max);

/// Union of the graphs active on [t*_l, t*_{l+1}), i.e. the choices at instants
/// a_l .. a_{l+1} - 1.
Digraph window_union(const TopologyEnsemble& ens, std::span<const int> choices, std::int64_t ell,
                     std::int64_t n, double c);

/// True iff the window unions for l = 0 .. n_windows - 1 are all rooted.
bool windows_rooted(const TopologyEnsemble& ens, std::span<const int> choices,
                    std::int64_t n_windows, std::int64_t n, double c);

}  // namespace flockswitch
