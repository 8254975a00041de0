#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flockswitch/analysis.hpp"
#include "flockswitch/audit.hpp"
#include "flockswitch/dynamics.hpp"
#include "flockswitch/graph.hpp"
#include "flockswitch/switching.hpp"
#include "flockswitch/weight.hpp"

namespace flockswitch {

/// Initial data: a fixed configuration, or i.i.d. uniform draws per coordinate.
struct InitSpec {
  int n_agents = 1;
  int dim = 1;
  std::optional<Configuration> fixed;
  double position_lo = -1.0, position_hi = 1.0;
  double velocity_lo = -1.0, velocity_hi = 1.0;

  Configuration sample(std::uint64_t path_seed) const;
};

struct EnsembleSpec {
  TopologyEnsemble ensemble;
  DwellingProcess process;
  CommunicationWeight weight;
  double h = 0.1;
  InitSpec init;
  std::int64_t n_runs = 1;
  std::uint64_t root_seed = 0;
  std::int64_t horizon = 1000;
  double v_tol_rel = 1e-8;     // stop once D(V) <= v_tol_rel * D(V0)
  double x_cap_factor = 1e6;   // diverged once D(X) >= x_cap_factor * (D(X0) + 1)
  std::optional<FrameworkParams> audit;  // audit every path against the pathwise bounds
  int jobs = 1;
  std::int64_t snapshot_stride = 0;  // only used when run_path returns the trajectory
};

struct RunOutcome {
  std::int64_t run = 0;
  std::uint64_t seed = 0;
  bool flocked = false;
  std::optional<std::int64_t> steps_to_tolerance;
  std::int64_t steps = 0;
  double initial_dv = 0.0;
  double final_dx = 0.0;
  double final_dv = 0.0;
  double max_dx = 0.0;
  std::int64_t monotonicity_violations = 0;
  std::int64_t bound_violations = 0;
  bool audit_a1 = true;
  bool audit_a2 = true;
  std::string error;  // non-empty when the path failed
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = 1.96);

struct EnsembleResult {
  std::vector<RunOutcome> runs;  // ordered by run index
  std::int64_t flocked = 0;
  double fraction = 0.0;
  Interval ci;
};

/// Seed of path `run` under `root_seed`.
std::uint64_t run_seed(std::uint64_t root_seed, std::int64_t run);

/// One path with the given seed; the building block of run_ensemble.
RunOutcome run_path(const EnsembleSpec& spec, std::uint64_t seed, std::int64_t run_index = 0,
                    Trajectory* traj_out = nullptr, PathAudit* audit_out = nullptr);

/// Runs spec.n_runs paths on spec.jobs threads. The result depends only on the
/// spec, never on the number of workers.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

struct FrequencyEstimate {
  std::int64_t hits = 0;
  std::int64_t samples = 0;
  double fraction = 0.0;
  double standard_error = 0.0;
  Interval ci;
};

FrequencyEstimate make_estimate(std::int64_t hits, std::int64_t samples);

/// Fraction of dwell sequences with some window i <= i_max whose sum is
/// >= M(n + floor(c log(i(N-1)))).
FrequencyEstimate estimate_a2_violation(const DwellingProcess& process, std::int64_t n, double c, double M,
                                        int n_agents, std::int64_t i_max, std::int64_t n_samples,
                                        std::uint64_t root_seed, int jobs = 1);

/// Fraction of topology sequences whose first `n_windows` window unions are all rooted.
FrequencyEstimate estimate_windows_rooted(const TopologyEnsemble& ens, std::int64_t n, double c,
                                          std::int64_t n_windows, std::int64_t n_samples,
                                          std::uint64_t root_seed, int jobs = 1);

/// Runs body(i) for i in [0, count) on `jobs` threads; the first exception is rethrown.
void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& body);

}  // namespace flockswitch
