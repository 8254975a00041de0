#include "flockswitch/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "flockswitch/rng.hpp"

namespace flockswitch {

Configuration InitSpec::sample(std::uint64_t path_seed) const {
  if (fixed) return *fixed;
  Rng rng(derive_seed(path_seed, Stream::Init));
  Configuration cfg{Eigen::MatrixXd(n_agents, dim), Eigen::MatrixXd(n_agents, dim), 0};
  for (int i = 0; i < n_agents; ++i)
    for (int k = 0; k < dim; ++k) cfg.positions(i, k) = rng.uniform(position_lo, position_hi);
  for (int i = 0; i < n_agents; ++i)
    for (int k = 0; k < dim; ++k) cfg.velocities(i, k) = rng.uniform(velocity_lo, velocity_hi);
  return cfg;
}

Interval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

std::uint64_t run_seed(std::uint64_t root_seed, std::int64_t run) {
  return derive_seed(root_seed, 0x1000'0000ULL + static_cast<std::uint64_t>(run));
}

void parallel_for(std::int64_t count, int jobs, const std::function<void(std::int64_t)>& body) {
  const int workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(jobs, count)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::int64_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

RunOutcome run_path(const EnsembleSpec& spec, std::uint64_t seed, std::int64_t run_index, Trajectory* traj_out,
                    PathAudit* audit_out) {
  RunOutcome out;
  out.run = run_index;
  out.seed = seed;
  try {
    const Configuration init = spec.init.sample(seed);
    const StopCriteria stop = StopCriteria::relative_to(init, spec.v_tol_rel, spec.x_cap_factor);
    const SwitchingSchedule sched = generate_schedule(spec.ensemble, spec.process, std::max<std::int64_t>(spec.horizon, 1), seed);
    Trajectory traj;
    if (spec.audit) {
      const PathAudit audit =
          audit_path(init, spec.ensemble, sched, spec.h, spec.weight, spec.horizon, stop, *spec.audit, &traj);
      out.bound_violations = audit.violations();
      out.audit_a1 = audit.a1_holds;
      out.audit_a2 = audit.a2_holds;
      if (audit_out) *audit_out = audit;
    } else {
      SimulationOptions opts;
      opts.snapshot_stride = traj_out ? spec.snapshot_stride : 0;
      traj = simulate(init, spec.ensemble, sched, spec.h, spec.weight, spec.horizon, stop, opts);
    }
    out.steps = traj.final_state.t;
    out.initial_dv = traj.records.front().dv;
    out.final_dx = traj.records.back().dx;
    out.final_dv = traj.records.back().dv;
    out.max_dx = traj.max_dx;
    out.monotonicity_violations = traj.monotonicity_violations;
    out.steps_to_tolerance = traj.steps_to_tolerance;
    out.flocked = traj.flocked && !traj.diverged && traj.max_dx <= stop.x_cap;
    if (traj_out) *traj_out = std::move(traj);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec) {
  if (spec.n_runs < 1) throw std::invalid_argument("ensemble needs n_runs >= 1");
  EnsembleResult res;
  res.runs.resize(static_cast<std::size_t>(spec.n_runs));
  parallel_for(spec.n_runs, spec.jobs, [&](std::int64_t i) {
    res.runs[static_cast<std::size_t>(i)] = run_path(spec, run_seed(spec.root_seed, i), i);
  });
  for (const RunOutcome& r : res.runs) res.flocked += r.flocked ? 1 : 0;
  res.fraction = static_cast<double>(res.flocked) / static_cast<double>(spec.n_runs);
  res.ci = wilson_interval(res.flocked, spec.n_runs);
  return res;
}

FrequencyEstimate make_estimate(std::int64_t hits, std::int64_t samples) {
  FrequencyEstimate e;
  e.hits = hits;
  e.samples = samples;
  if (samples > 0) {
    e.fraction = static_cast<double>(hits) / static_cast<double>(samples);
    e.standard_error = std::sqrt(e.fraction * (1.0 - e.fraction) / static_cast<double>(samples));
  }
  e.ci = wilson_interval(hits, samples);
  return e;
}

FrequencyEstimate estimate_a2_violation(const DwellingProcess& process, std::int64_t n, double c, double M,
                                        int n_agents, std::int64_t i_max, std::int64_t n_samples,
                                        std::uint64_t root_seed, int jobs) {
  if (n_agents < 2) throw std::invalid_argument("dwell bound needs N >= 2");
  if (i_max < 1 || n_samples < 1) throw std::invalid_argument("need i_max >= 1 and n_samples >= 1");
  const auto draws_needed = static_cast<std::size_t>(a_sequence(n, c, i_max * (n_agents - 1)));
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(n_samples), 0);
  parallel_for(n_samples, jobs, [&](std::int64_t s) {
    const auto draws = generate_dwell_draws(process, draws_needed, run_seed(root_seed, s));
    hit[static_cast<std::size_t>(s)] = check_dwell_bound(draws, n, c, M, n_agents, i_max).holds ? 0 : 1;
  });
  std::int64_t hits = 0;
  for (auto h : hit) hits += h;
  return make_estimate(hits, n_samples);
}

FrequencyEstimate estimate_windows_rooted(const TopologyEnsemble& ens, std::int64_t n, double c,
                                          std::int64_t n_windows, std::int64_t n_samples,
                                          std::uint64_t root_seed, int jobs) {
  const auto instants_needed = static_cast<std::size_t>(a_sequence(n, c, n_windows)) + 1;
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(n_samples), 0);
  parallel_for(n_samples, jobs, [&](std::int64_t s) {
    // dwell times do not affect which graphs are active; switch every step
    ScheduleSampler sampler(ens, DwellingProcess::deterministic(0), run_seed(root_seed, s));
    sampler.extend_to_instants(instants_needed);
    hit[static_cast<std::size_t>(s)] = windows_rooted(ens, sampler.schedule().choices, n_windows, n, c) ? 1 : 0;
  });
  std::int64_t hits = 0;
  for (auto h : hit) hits += h;
  return make_estimate(hits, n_samples);
}

}  // namespace flockswitch
