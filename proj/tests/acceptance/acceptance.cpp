#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "flockswitch/analysis.hpp"
#include "flockswitch/audit.hpp"
#include "flockswitch/config.hpp"
#include "flockswitch/dynamics.hpp"
#include "flockswitch/matrix.hpp"
#include "flockswitch/montecarlo.hpp"
#include "flockswitch/switching.hpp"
#include "../unit/support.hpp"

using namespace flockswitch;
using fst::uniform_int;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int jobs() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

std::string config_path(const char* name) { return std::string(FLOCKSWITCH_SOURCE_DIR) + "/configs/" + name; }

bool within_mono(double next, double bound) { return next <= bound + 1e-12 * std::max(1.0, std::abs(bound)); }

TopologyEnsemble random_ensemble(int n, Rng& rng) {
  const int k = uniform_int(rng, 1, 4);
  std::vector<Digraph> graphs;
  std::vector<double> w;
  for (int i = 0; i < k; ++i) {
    graphs.push_back(fst::random_digraph(n, rng, rng.uniform(0.0, 0.5)));
    w.push_back(0.1 + rng.uniform());
  }
  double total = 0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return TopologyEnsemble(std::move(graphs), std::move(w));
}

DwellingProcess random_process(Rng& rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0: return DwellingProcess::poisson(rng.uniform(0.05, 3.0));
    case 1: return DwellingProcess::geometric(rng.uniform(0.51, 1.0));
    default: return DwellingProcess::deterministic(uniform_int(rng, 0, 3));
  }
}

// criteria 1 and 2 share the instances
void monotonicity_suite() {
  const auto t0 = Clock::now();
  Rng rng(0x5eed0001);
  std::int64_t v_bad = 0, x_bad = 0, lib_bad = 0, steps = 0;
  std::int64_t fresh = 0, fresh_bad = 0, windows = 0, window_bad = 0;
  for (int inst = 0; inst < 500; ++inst) {
    const int N = uniform_int(rng, 2, 20);
    const int d = uniform_int(rng, 1, 3);
    const TopologyEnsemble ens = random_ensemble(N, rng);
    const DwellingProcess proc = random_process(rng);
    const double kappa = rng.uniform(0.1, 5.0);
    const CommunicationWeight w = rng.uniform() < 0.5 ? CommunicationWeight::constant(kappa)
                                                      : CommunicationWeight::power_law(kappa, rng.uniform(0.0, 2.0));
    const double h = rng.uniform(0.01, 0.999) / kappa;
    Configuration init;
    init.positions = fst::random_matrix(N, d, rng, -10.0, 10.0);
    init.velocities = fst::random_matrix(N, d, rng, -3.0, 3.0);
    const std::int64_t horizon = 1000;
    const SwitchingSchedule sched = generate_schedule(ens, proc, horizon, rng.next());

    const std::int64_t n = uniform_int(rng, 1, 6);
    const double c = rng.uniform(0.1, 2.0);
    std::vector<std::int64_t> bounds;
    for (std::int64_t l = 1;; ++l) {
      const auto a = static_cast<std::size_t>(a_sequence(n, c, l));
      if (a >= sched.instants.size()) break;
      bounds.push_back(sched.instants[a]);
    }
    std::size_t next = 0;
    FlowAccumulator<double> phi(N);
    auto close = [&] {
      ++windows;
      if (!is_stochastic(phi.value(), kProductStochasticTol)) ++window_bad;
      phi.reset();
    };

    SimulationOptions opts;
    opts.stop_early = false;
    opts.snapshot_stride = 0;
    opts.observer = [&](const Configuration& before, int, const Eigen::MatrixXd& m) {
      while (next < bounds.size() && before.t == bounds[next]) {
        close();
        ++next;
      }
      ++fresh;
      const bool rows_ok = ((m.rowwise().sum().array() - 1.0).abs() <= 1e-12).all();
      if (!is_nonnegative(m) || !rows_ok) ++fresh_bad;
      phi.push(m);
    };
    const Trajectory traj = simulate(init, ens, sched, h, w, horizon, StopCriteria{}, opts);
    if (next < bounds.size() && traj.final_state.t == bounds[next]) close();

    lib_bad += traj.monotonicity_violations;
    for (std::size_t t = 0; t + 1 < traj.records.size(); ++t) {
      const StepRecord& a = traj.records[t];
      const StepRecord& b = traj.records[t + 1];
      if (!within_mono(b.dv, a.dv)) ++v_bad;
      if (!within_mono(b.dx, a.dx + h * a.dv)) ++x_bad;
      ++steps;
    }
  }
  const double secs = seconds_since(t0);
  report(1, v_bad == 0 && x_bad == 0 && lib_bad == 0 && steps == 500 * 1000 && secs < 30.0,
         fmt("500 instances, %lld steps: %lld velocity and %lld position violations beyond 1e-12 "
             "(library count %lld); %.1f s of 30",
             (long long)steps, (long long)v_bad, (long long)x_bad, (long long)lib_bad, secs));
  report(2, fresh_bad == 0 && window_bad == 0 && fresh == steps,
         fmt("%lld update matrices, %lld outside 1e-12; %lld window products, %lld outside 1e-10",
             (long long)fresh, (long long)fresh_bad, (long long)windows, (long long)window_bad));
}

void scrambling_products() {
  const auto t0 = Clock::now();
  Rng rng(0x5eed0003);
  int scrambling = 0;
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) {
    const int N = uniform_int(rng, 3, 6);
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(N, N);
    for (int j = 0; j < N - 1; ++j)
      prod = fst::random_stochastic_on(fst::planted_rooted(N, rng, rng.uniform(0.0, 0.3)), rng) * prod;
    if (is_scrambling(prod)) ++scrambling;
  }
  const double secs = seconds_since(t0);
  report(3, scrambling == trials && secs < 10.0,
         fmt("%d of %d products of N-1 rooted positive-diagonal matrices scrambling; %.2f s of 10", scrambling,
             trials, secs));
}

void contraction_oracle() {
  Rng rng(0x5eed0004);
  int bad = 0;
  double worst = -1e300;
  const int trials = 10000;
  for (int k = 0; k < trials; ++k) {
    const int N = uniform_int(rng, 1, 8);
    const int d = uniform_int(rng, 1, 4);
    const Eigen::MatrixXd a = fst::random_stochastic(N, rng, rng.uniform(0.0, 0.8));
    const Eigen::MatrixXd z = fst::random_matrix(N, d, rng, -5.0, 5.0);
    const double scale = rng.uniform() < 0.3 ? 0.0 : std::pow(10.0, rng.uniform(-4.0, 1.0));
    const Eigen::MatrixXd b = scale * fst::random_matrix(N, d, rng);
    const auto chk = contraction_check(a, z, b);
    worst = std::max(worst, chk.lhs - chk.rhs);
    if (!chk.holds(1e-10)) ++bad;
  }
  report(4, bad == 0, fmt("%d random triples, %d violations beyond 1e-10 (max lhs - rhs = %.3g)", trials, bad, worst));
}

EnsembleSpec positive_control_spec() {
  EnsembleSpec spec = load_config(config_path("positive_control.json")).ensemble_spec();
  spec.jobs = jobs();
  return spec;
}

void positive_control() {
  const auto t0 = Clock::now();
  EnsembleSpec spec = positive_control_spec();
  spec.n_runs = 200;
  spec.horizon = 100000;
  const EnsembleResult res = run_ensemble(spec);
  std::int64_t ok = 0, errors = 0;
  for (const RunOutcome& r : res.runs) {
    if (!r.error.empty()) ++errors;
    if (r.flocked && std::isfinite(r.max_dx) && r.max_dx < 1e6 * (1.0 + r.final_dx)) ++ok;
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(res.runs.size());
  const double secs = seconds_since(t0);
  report(5, frac >= 0.99 && errors == 0 && secs < 60.0,
         fmt("%lld of %zu runs reach D(V) <= 1e-8 D(V0) with bounded D(X), fraction %.3f (>= 0.99), "
             "Wilson 95%% [%.3f, %.3f]; %.1f s of 60 on %d thread(s)",
             (long long)ok, res.runs.size(), frac, res.ci.lo, res.ci.hi, secs, spec.jobs));
}

void negative_control() {
  EnsembleSpec spec = load_config(config_path("negative_control.json")).ensemble_spec();
  spec.jobs = jobs();
  spec.n_runs = 100;
  const EnsembleResult res = run_ensemble(spec);
  double min_dv = 1e300;
  std::int64_t errors = 0;
  for (const RunOutcome& r : res.runs) {
    min_dv = std::min(min_dv, r.final_dv);
    if (!r.error.empty()) ++errors;
  }
  const bool union_rooted = has_spanning_tree(spec.ensemble.union_of_all());
  report(6, res.flocked == 0 && min_dv >= 1.0 - 1e-9 && errors == 0 && !union_rooted,
         fmt("union rooted: %s; %lld of %zu runs flocked; min final D(V) = %.12f (>= 1 - 1e-9)",
             union_rooted ? "yes" : "no", (long long)res.flocked, res.runs.size(), min_dv));
}

void bound_envelopes() {
  EnsembleSpec spec = positive_control_spec();
  spec.audit = load_config(config_path("positive_control.json")).framework_params();
  spec.v_tol_rel = 0.0;
  spec.horizon = 100000;
  std::vector<PathAudit> audits(100);
  std::vector<RunOutcome> outs(100);
  parallel_for(100, spec.jobs, [&](std::int64_t i) {
    outs[i] = run_path(spec, run_seed(spec.root_seed, i), i, nullptr, &audits[i]);
  });
  std::int64_t kept = 0, mu_checked = 0, mu_bad = 0, env_checked = 0, env_bad = 0, errors = 0;
  for (std::size_t i = 0; i < audits.size(); ++i) {
    if (!outs[i].error.empty()) ++errors;
    const PathAudit& a = audits[i];
    if (!a.a1_holds || !a.a2_holds) continue;
    ++kept;
    mu_checked += a.lemma_checked;
    mu_bad += a.lemma_violations;
    env_checked += a.envelope_checked;
    env_bad += a.envelope_violations;
  }
  report(7, kept > 0 && mu_checked > 0 && env_checked > 0 && mu_bad == 0 && env_bad == 0 && errors == 0,
         fmt("%lld of 100 paths satisfy both window conditions; %lld window mu checks, %lld below bound; "
             "%lld envelope checks, %lld above envelope",
             (long long)kept, (long long)mu_checked, (long long)mu_bad, (long long)env_checked, (long long)env_bad));
}

void tail_bounds() {
  const auto t0 = Clock::now();
  const int N = 3;
  const double c = 1.0;
  const std::int64_t ns[] = {10, 20, 40};
  struct Case {
    const char* name;
    DwellingProcess process;
    std::int64_t M;
    std::function<double(std::int64_t)> p2;
  };
  const std::int64_t Mp = smallest_valid_M_poisson(c, N, 1.0).value();
  const std::int64_t Mg = smallest_valid_M_geometric(c, N, 0.9).value();
  const Case cases[] = {
      {"poisson", DwellingProcess::poisson(1.0), Mp,
       [&](std::int64_t n) { return p2_poisson(n, c, double(Mp), N, 1.0); }},
      {"geometric", DwellingProcess::geometric(0.9), Mg,
       [&](std::int64_t n) { return p2_geometric(n, c, double(Mg), N, 0.9); }},
  };
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 0x5eed0008;
  for (const Case& cs : cases) {
    double prev = std::numeric_limits<double>::infinity();
    detail += fmt("%s M=%lld:", cs.name, (long long)cs.M);
    for (std::int64_t n : ns) {
      const double p2 = cs.p2(n);
      const FrequencyEstimate e = estimate_a2_violation(cs.process, n, c, double(cs.M), N, 50, 10000, seed++, jobs());
      ok = ok && e.fraction <= p2 + 3.0 * e.standard_error && p2 < prev;
      prev = p2;
      detail += fmt(" n=%lld %.4g<=%.3g", (long long)n, e.fraction, p2);
    }
    detail += "; ";
  }
  const double secs = seconds_since(t0);
  report(8, ok && secs < 60.0, detail + fmt("p2 strictly decreasing; %.1f s of 60", secs));
}

void spanning_probability() {
  const EnsembleSpec spec = positive_control_spec();
  const std::int64_t n = 15;
  const double c = 3.0;
  const BoundReport rep = p1_report(n, c, spec.ensemble.probs());
  const double p1 = p1_lower_bound(n, c, spec.ensemble);
  const FrequencyEstimate e = estimate_windows_rooted(spec.ensemble, n, c, 50, 10000, 0x5eed0009, jobs());
  report(9, rep.passed() && e.fraction >= p1 - 3.0 * e.standard_error,
         fmt("n=%lld c=%.1f: empirical %.4f (SE %.2g) >= p1 %.4f - 3 SE over 10000 schedules, 50 windows",
             (long long)n, c, e.fraction, e.standard_error, p1));
}

void analytic_spot_checks() {
  std::int64_t grid = 0, exp_bad = 0;
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 60; ++j) {
      const double x = std::pow(10.0, -3.0 + 6.0 * i / 200.0);
      const double delta = std::pow(10.0, -2.0 + 3.0 * j / 60.0);
      const auto [lhs, rhs] = exp_inequality_check(x, delta);
      ++grid;
      if (!(lhs <= rhs * (1.0 + 1e-12))) ++exp_bad;
    }

  bool a_ok = a_sequence(2, 3.0, 2) == 6 && a_sequence(7, 0.5, 0) == 0;
  for (std::int64_t n = 1; n <= 50; ++n)
    for (double c : {0.3, 0.7, 3.0}) a_ok = a_ok && a_sequence(n, c, 1) == n;
  a_ok = a_ok && a_sequence(2, 1.0, 3) == 2 + 2 + 2 + 0 + 1;  // floor(log 2) = 0, floor(log 3) = 1

  Rng rng(0x5eed0010);
  double form_gap = 0.0, abs_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int N = uniform_int(rng, 2, 12);
    const int d = uniform_int(rng, 1, 3);
    const TopologyEnsemble ens = random_ensemble(N, rng);
    const CommunicationWeight w = CommunicationWeight::power_law(1.0, rng.uniform(0.0, 1.5));
    const double h = rng.uniform(0.05, 0.95);
    Configuration init;
    init.positions = fst::random_matrix(N, d, rng, -5.0, 5.0);
    init.velocities = fst::random_matrix(N, d, rng);
    const SwitchingSchedule sched = generate_schedule(ens, random_process(rng), 500, rng.next());
    SimulationOptions mat, comp;
    mat.stop_early = comp.stop_early = false;
    mat.snapshot_stride = comp.snapshot_stride = 1;
    comp.form = UpdateForm::Component;
    const Trajectory a = simulate(init, ens, sched, h, w, 500, StopCriteria{}, mat);
    const Trajectory b = simulate(init, ens, sched, h, w, 500, StopCriteria{}, comp);
    if (a.snapshots.size() != b.snapshots.size() || a.snapshots.size() != 501) form_gap = INFINITY;
    for (std::size_t t = 0; t < std::min(a.snapshots.size(), b.snapshots.size()); ++t) {
      const Configuration& p = a.snapshots[t];
      const Configuration& q = b.snapshots[t];
      const double gx = (p.positions - q.positions).cwiseAbs().maxCoeff();
      const double gv = (p.velocities - q.velocities).cwiseAbs().maxCoeff();
      abs_gap = std::max({abs_gap, gx, gv});
      form_gap = std::max({form_gap, gx / std::max(1.0, p.positions.cwiseAbs().maxCoeff()),
                           gv / std::max(1.0, p.velocities.cwiseAbs().maxCoeff())});
    }
  }

  double drift = 0.0;
  {
    const int N = 6;
    std::vector<Digraph> graphs;
    for (int k = 0; k < 3; ++k) {
      std::vector<Edge> edges;
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
          if (rng.uniform() < 0.4) {
            edges.push_back({i, j});
            edges.push_back({j, i});
          }
      graphs.emplace_back(N, edges);
    }
    const TopologyEnsemble ens(graphs, {0.2, 0.3, 0.5});
    const CommunicationWeight w = CommunicationWeight::power_law(2.0, 0.5);
    Configuration init;
    init.positions = fst::random_matrix(N, 2, rng, -3.0, 3.0);
    init.velocities = fst::random_matrix(N, 2, rng, -2.0, 2.0);
    const Eigen::RowVectorXd mean0 = init.velocities.colwise().mean();
    const SwitchingSchedule sched = generate_schedule(ens, DwellingProcess::poisson(2.0), 10000, 0x5eed0011);
    SimulationOptions opts;
    opts.stop_early = false;
    opts.snapshot_stride = 0;
    opts.observer = [&](const Configuration& before, int, const Eigen::MatrixXd&) {
      drift = std::max(drift, (before.velocities.colwise().mean() - mean0).cwiseAbs().maxCoeff());
    };
    const Trajectory traj = simulate(init, ens, sched, 0.3, w, 10000, StopCriteria{}, opts);
    drift = std::max(drift, (traj.final_state.velocities.colwise().mean() - mean0).cwiseAbs().maxCoeff());
  }

  report(10, exp_bad == 0 && a_ok && form_gap <= 1e-12 && drift <= 1e-10,
         fmt("exp inequality %lld grid points, %lld violations; a-sequence hand values %s; "
             "matrix vs component gap %.2g relative to state scale (<= 1e-12, absolute %.2g); mean-velocity drift %.2g over 1e4 steps (<= 1e-10)",
             (long long)grid, (long long)exp_bad, a_ok ? "match" : "MISMATCH", form_gap, abs_gap, drift));
}

}  // namespace

int main() {
  monotonicity_suite();
  scrambling_products();
  contraction_oracle();
  positive_control();
  negative_control();
  bound_envelopes();
  tail_bounds();
  spanning_probability();
  analytic_spot_checks();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
