#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "flockswitch/analysis.hpp"
#include "flockswitch/audit.hpp"
#include "flockswitch/config.hpp"
#include "flockswitch/io.hpp"
#include "flockswitch/montecarlo.hpp"

namespace fs = std::filesystem;
using namespace flockswitch;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> runs;
  std::optional<int> jobs;
  std::optional<std::int64_t> horizon;
  std::optional<std::string> out;
  bool assert_bounds = false;
};

struct Context {
  ExperimentConfig cfg;
  std::string hash;
  fs::path out;
};

Context load(const Options& o) {
  Context ctx{load_config(o.config), "", ""};
  ExperimentConfig& c = ctx.cfg;
  if (o.seed) {
    c.run.seed = *o.seed;
  } else if (const char* env = std::getenv("FLOCKSWITCH_SEED")) {
    try {
      std::size_t used = 0;
      c.run.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError("FLOCKSWITCH_SEED", "expected a nonnegative integer");
    }
  }
  if (o.runs) c.run.runs = *o.runs;
  if (o.jobs) c.run.jobs = *o.jobs;
  if (o.horizon) c.run.horizon = *o.horizon;
  if (o.out) c.run.out = *o.out;
  validate_config(c);
  ctx.hash = config_hash(c);
  ctx.out = c.run.out;
  return ctx;
}

Json provenance(const Context& ctx) {
  return {{"config_hash", ctx.hash}, {"root_seed", ctx.cfg.run.seed}};
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

// Runs `make` and folds a thrown precondition error into a failed report.
template <typename F>
BoundReport guarded(const std::string& name, F make) {
  try {
    return make();
  } catch (const std::exception& e) {
    BoundReport r;
    r.name = name;
    r.entries.push_back({"evaluation", 0.0, false, std::nullopt, e.what()});
    return r;
  }
}

std::vector<BoundReport> all_reports(const ExperimentConfig& c) {
  const FrameworkParams p = c.framework_params();
  std::vector<BoundReport> reps;
  reps.push_back(guarded("discrete flocking conditions", [&] { return check_theorem_3_1(p); }));
  reps.push_back(guarded("delta window for the spatial-bound series", [&] { return check_delta_window(p); }));
  reps.push_back(guarded("rooted window unions (p1)", [&] { return p1_report(p.n, p.c, p.probs); }));

  const DwellingProcess proc = c.dwelling.process();
  if (proc.kind() == DwellingProcess::Kind::Poisson) {
    reps.push_back(guarded("Poisson dwelling tail (p2)",
                           [&] { return poisson_report(p.n, p.c, p.M, p.n_agents, proc.bound()); }));
  } else if (proc.kind() == DwellingProcess::Kind::Geometric) {
    reps.push_back(guarded("geometric dwelling tail (p2)",
                           [&] { return geometric_report(p.n, p.c, p.M, p.n_agents, proc.bound()); }));
  }
  if (c.continuous_time_a) {
    reps.push_back(guarded("continuous-time flocking conditions", [&] {
      return check_theorem_5_1(p.n_agents, p.kappa(), *c.continuous_time_a, p.M, p.probs, p.epsilon);
    }));
  }
  if (c.positions) {
    reps.push_back(guarded("spatial bound x_inf", [&] {
      const XinfResult x = xinf_exists(p, diameter(*c.positions), diameter(*c.velocities));
      BoundReport r;
      r.name = "spatial bound x_inf";
      r.inputs = {{"D(X0)", diameter(*c.positions)}, {"D(V0)", diameter(*c.velocities)}, {"delta", x.delta}};
      r.entries.push_back({"some x with LHS(x) < x", x.x_inf.value_or(0.0), x.x_inf.has_value(), std::nullopt,
                           x.x_inf ? "" : "no admissible x found"});
      if (x.x_inf) r.entries.push_back({"LHS(x_inf)", x.lhs_at_x, std::nullopt, std::nullopt, ""});
      r.series.push_back({"window series", x.series});
      return r;
    }));
  }
  return reps;
}

int cmd_check(const Options& o) {
  const Context ctx = load(o);
  const auto reps = all_reports(ctx.cfg);
  bool ok = true;
  Json out = provenance(ctx);
  out["reports"] = Json::array();
  for (const BoundReport& r : reps) {
    std::cout << render_report(r) << '\n';
    out["reports"].push_back(report_to_json(r));
    ok = ok && r.passed();
  }
  out["passed"] = ok;
  if (o.out) write_json(ctx.out / "check.json", out);
  std::cout << "config " << ctx.hash << ": " << (ok ? "all checks pass" : "some checks fail") << '\n';
  return ok ? kPass : kFail;
}

int cmd_simulate(const Options& o) {
  const Context ctx = load(o);
  EnsembleSpec spec = ctx.cfg.ensemble_spec();
  const std::uint64_t seed = run_seed(ctx.cfg.run.seed, 0);
  if (o.assert_bounds) spec.audit = ctx.cfg.framework_params();

  Trajectory traj;
  PathAudit audit;
  const RunOutcome outcome = run_path(spec, seed, 0, &traj, &audit);
  if (!outcome.error.empty()) throw std::domain_error(outcome.error);

  Json summary = provenance(ctx);
  summary["path_seed"] = seed;
  summary["outcome"] = outcome_to_json(outcome);
  summary["trajectory"] = trajectory_summary(traj);
  if (o.assert_bounds) summary["audit"] = audit_to_json(audit);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_file(ctx.out / "trajectory.csv", csv.str());
  write_json(ctx.out / "summary.json", summary);
  write_json(ctx.out / "snapshots.json", snapshots_to_json(traj));
  std::cout << summary["outcome"].dump(2) << '\n';

  if (o.assert_bounds) {
    const std::int64_t bad = audit.violations() + traj.monotonicity_violations;
    std::cout << "bound checks: " << audit.lemma_checked << " ergodicity, " << audit.envelope_checked
              << " envelope; violations " << bad << '\n';
    if (bad > 0) return kFail;
  }
  return kPass;
}

int cmd_ensemble(const Options& o) {
  const Context ctx = load(o);
  EnsembleSpec spec = ctx.cfg.ensemble_spec();
  if (o.assert_bounds) spec.audit = ctx.cfg.framework_params();
  const EnsembleResult res = run_ensemble(spec);

  Json j = provenance(ctx);
  j.update(ensemble_to_json(res));
  write_json(ctx.out / "ensemble.json", j);
  std::ostringstream csv;
  write_runs_csv(csv, res);
  write_file(ctx.out / "runs.csv", csv.str());

  std::cout << "flocked " << res.flocked << " / " << res.runs.size() << " (fraction " << res.fraction
            << ", 95% Wilson [" << res.ci.lo << ", " << res.ci.hi << "]; finite-horizon surrogate)\n";
  if (o.assert_bounds && (j["bound_violations"].get<std::int64_t>() > 0 ||
                          j["monotonicity_violations"].get<std::int64_t>() > 0))
    return kFail;
  return kPass;
}

int cmd_bounds(const Options& o) {
  const Context ctx = load(o);
  const ExperimentConfig& c = ctx.cfg;
  const FrameworkParams p = c.framework_params();
  const DwellingProcess proc = c.dwelling.process();

  std::vector<std::int64_t> n_grid = c.run.n_grid;
  if (n_grid.empty()) n_grid = {p.n};
  std::vector<std::int64_t> r_grid = c.run.r_grid;
  if (r_grid.empty())
    for (std::int64_t r = 0; r <= 10; ++r) r_grid.push_back(r);

  auto attempt = [](auto f) -> std::optional<double> {
    try {
      return f();
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  auto cell = [](std::optional<double> v) { return v ? format_real(*v) : std::string("nan"); };

  Json j = provenance(ctx);
  std::ostringstream ncsv;
  ncsv << "n,p1,p2\n";
  std::cout << "n          p1(n)                  p2(n)\n";
  j["n_grid"] = Json::array();
  for (std::int64_t n : n_grid) {
    const auto p1 = attempt([&] { return p1_lower_bound(n, p.c, p.probs); });
    std::optional<double> p2;
    if (proc.kind() == DwellingProcess::Kind::Poisson)
      p2 = attempt([&] { return p2_poisson(n, p.c, p.M, p.n_agents, proc.bound()); });
    else if (proc.kind() == DwellingProcess::Kind::Geometric)
      p2 = attempt([&] { return p2_geometric(n, p.c, p.M, p.n_agents, proc.bound()); });
    ncsv << n << ',' << cell(p1) << ',' << cell(p2) << '\n';
    std::cout << std::left << std::setw(11) << n << std::setw(23) << cell(p1) << cell(p2) << '\n';
    j["n_grid"].push_back({{"n", n}, {"p1", p1 ? Json(*p1) : Json(nullptr)}, {"p2", p2 ? Json(*p2) : Json(nullptr)}});
  }

  std::optional<double> x_inf;
  if (c.positions) {
    x_inf = attempt([&] {
      const XinfResult res = xinf_exists(p, diameter(*c.positions), diameter(*c.velocities));
      if (!res.x_inf) throw std::domain_error("no x_inf");
      return *res.x_inf;
    });
    j["x_inf"] = x_inf ? Json(*x_inf) : Json(nullptr);
  }
  // the envelope needs phi(x_inf); fall back to the computed bound
  FrameworkParams pe = p;
  if (!pe.x_inf) pe.x_inf = x_inf;

  std::ostringstream rcsv;
  rcsv << "r,envelope\n";
  std::cout << "\nr          envelope(r)\n";
  j["r_grid"] = Json::array();
  for (std::int64_t r : r_grid) {
    const auto e = attempt([&] { return velocity_decay_envelope(r, pe); });
    rcsv << r << ',' << cell(e) << '\n';
    std::cout << std::left << std::setw(11) << r << cell(e) << '\n';
    j["r_grid"].push_back({{"r", r}, {"envelope", e ? Json(*e) : Json(nullptr)}});
  }
  if (c.positions) std::cout << "\nx_inf      " << cell(x_inf) << '\n';

  write_file(ctx.out / "bounds_n.csv", ncsv.str());
  write_file(ctx.out / "bounds_r.csv", rcsv.str());
  write_json(ctx.out / "bounds.json", j);
  return kPass;
}

int cmd_schedule(const Options& o) {
  const Context ctx = load(o);
  const std::uint64_t seed = run_seed(ctx.cfg.run.seed, 0);
  const SwitchingSchedule s =
      generate_schedule(ctx.cfg.ensemble(), ctx.cfg.dwelling.process(), ctx.cfg.run.horizon, seed);
  Json j = provenance(ctx);
  j["path_seed"] = seed;
  j["horizon"] = ctx.cfg.run.horizon;
  j["schedule"] = schedule_to_json(s);
  if (o.out) write_json(ctx.out / "schedule.json", j);
  std::cout << j.dump(2) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cucker-Smale flocking under randomly switching digraphs"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", o.seed, "root seed (default: FLOCKSWITCH_SEED, then the config)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--horizon", o.horizon, "number of time steps")->check(CLI::PositiveNumber);
  };
  CLI::App* check = app.add_subcommand("check", "evaluate the flocking conditions and tail bounds");
  CLI::App* simulate = app.add_subcommand("simulate", "one sample path with diagnostics");
  CLI::App* ensemble = app.add_subcommand("ensemble", "many seeded sample paths");
  CLI::App* bounds = app.add_subcommand("bounds", "p1, p2, envelope and x_inf tables");
  CLI::App* schedule = app.add_subcommand("schedule", "dump a realized switching schedule");
  for (CLI::App* sub : {check, simulate, ensemble, bounds, schedule}) add_common(sub);
  for (CLI::App* sub : {simulate, ensemble})
    sub->add_flag("--assert-bounds", o.assert_bounds, "check the pathwise bounds, exit 1 on a violation");
  ensemble->add_option("--runs", o.runs, "number of sample paths")->check(CLI::PositiveNumber);
  ensemble->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*simulate) return cmd_simulate(o);
    if (*ensemble) return cmd_ensemble(o);
    if (*bounds) return cmd_bounds(o);
    if (*schedule) return cmd_schedule(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "condition failed: " << e.what() << '\n';
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
