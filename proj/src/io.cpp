#include "flockswitch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace flockswitch {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

// Non-finite doubles have no JSON literal; they travel as strings.
static Json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(real(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a nonempty array of rows");
  const std::size_t cols = j.at(0).size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.size() != cols || cols == 0)
      throw std::invalid_argument("rows must be nonempty arrays of equal length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number()) throw std::invalid_argument("matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
  }
  return m;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,DX,DV,sigma\n";
  for (const StepRecord& r : traj.records)
    os << r.t << ',' << format_real(r.dx) << ',' << format_real(r.dv) << ',' << (r.sigma + 1) << '\n';
}

Json snapshots_to_json(const Trajectory& traj) {
  Json out = Json::array();
  for (const Configuration& c : traj.snapshots)
    out.push_back({{"t", c.t}, {"positions", matrix_to_json(c.positions)}, {"velocities", matrix_to_json(c.velocities)}});
  return out;
}

Json trajectory_summary(const Trajectory& traj) {
  Json j;
  j["steps"] = traj.final_state.t;
  j["initial_DX"] = real(traj.records.front().dx);
  j["initial_DV"] = real(traj.records.front().dv);
  j["final_DX"] = real(traj.records.back().dx);
  j["final_DV"] = real(traj.records.back().dv);
  j["max_DX"] = real(traj.max_dx);
  j["flocked"] = traj.flocked;
  j["flocked_is_finite_horizon_surrogate"] = true;
  j["diverged"] = traj.diverged;
  j["steps_to_tolerance"] = traj.steps_to_tolerance ? Json(*traj.steps_to_tolerance) : Json(nullptr);
  j["monotonicity_violations"] = traj.monotonicity_violations;
  return j;
}

Json schedule_to_json(const SwitchingSchedule& s) {
  std::vector<int> one_based(s.choices.size());
  std::transform(s.choices.begin(), s.choices.end(), one_based.begin(), [](int k) { return k + 1; });
  return {{"instants", s.instants}, {"choices", one_based}, {"dwell_draws", s.dwell_draws}};
}

Json report_to_json(const BoundReport& r) {
  Json j;
  j["name"] = r.name;
  j["passed"] = r.passed();
  Json inputs = Json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = real(v);
  j["inputs"] = inputs;
  Json entries = Json::array();
  for (const BoundEntry& e : r.entries) {
    Json je{{"label", e.label}, {"value", real(e.value)}};
    je["pass"] = e.pass ? Json(*e.pass) : Json(nullptr);
    je["margin"] = e.margin ? real(*e.margin) : Json(nullptr);
    if (!e.note.empty()) je["note"] = e.note;
    entries.push_back(std::move(je));
  }
  j["entries"] = entries;
  Json series = Json::array();
  for (const SeriesDiagnostics& s : r.series)
    series.push_back({{"label", s.label},
                      {"value", real(s.series.value)},
                      {"partial", real(s.series.partial)},
                      {"tail_bound", real(s.series.tail_bound)},
                      {"terms", s.series.terms}});
  j["series"] = series;
  return j;
}

std::string render_report(const BoundReport& r) {
  struct Row {
    std::string label, value, status, margin, note;
  };
  std::vector<Row> rows{{"condition", "value", "status", "margin", ""}};
  for (const BoundEntry& e : r.entries) {
    std::ostringstream v, m;
    v.precision(6);
    m.precision(4);
    v << e.value;
    if (e.margin) m << *e.margin;
    rows.push_back({e.label, v.str(), e.pass ? (*e.pass ? "PASS" : "FAIL") : "info", m.str(), e.note});
  }
  std::size_t w[4] = {0, 0, 0, 0};
  for (const Row& row : rows) {
    w[0] = std::max(w[0], row.label.size());
    w[1] = std::max(w[1], row.value.size());
    w[2] = std::max(w[2], row.status.size());
    w[3] = std::max(w[3], row.margin.size());
  }
  std::ostringstream os;
  os << r.name << (r.passed() ? "  [PASS]" : "  [FAIL]") << '\n';
  auto pad = [&os](const std::string& s, std::size_t width) { os << s << std::string(width - s.size() + 2, ' '); };
  for (const Row& row : rows) {
    os << "  ";
    pad(row.label, w[0]);
    pad(row.value, w[1]);
    pad(row.status, w[2]);
    if (row.note.empty()) {
      os << row.margin;
    } else {
      pad(row.margin, w[3]);
      os << row.note;
    }
    os << '\n';
  }
  for (const SeriesDiagnostics& s : r.series)
    os << "  series " << s.label << ": " << s.series.value << " (partial " << s.series.partial << ", tail <= "
       << s.series.tail_bound << ", " << s.series.terms << " terms)\n";
  return os.str();
}

Json audit_to_json(const PathAudit& a) {
  Json windows = Json::array();
  for (const WindowAudit& w : a.windows) {
    Json jw{{"r", w.r},
            {"t_begin", w.t_begin},
            {"t_end", w.t_end},
            {"rooted", w.rooted},
            {"dwell_ok", w.dwell_ok},
            {"stochastic", w.stochastic},
            {"mu", real(w.mu)},
            {"mu_bound", real(w.mu_bound)}};
    jw["mu_ok"] = w.mu_checked ? Json(w.mu_ok) : Json(nullptr);
    windows.push_back(std::move(jw));
  }
  return {{"x_inf", real(a.x_inf)},
          {"windows_rooted", a.a1_holds},
          {"dwell_bound_holds", a.a2_holds},
          {"A3_x_inf", a.a3_holds},
          {"fresh_not_stochastic", a.fresh_not_stochastic},
          {"phi_not_stochastic", a.phi_not_stochastic},
          {"ergodicity_checked", a.lemma_checked},
          {"ergodicity_violations", a.lemma_violations},
          {"envelope_checked", a.envelope_checked},
          {"envelope_violations", a.envelope_violations},
          {"windows", windows}};
}

Json outcome_to_json(const RunOutcome& o) {
  Json j{{"run", o.run},
         {"seed", o.seed},
         {"flocked", o.flocked},
         {"steps", o.steps},
         {"initial_DV", real(o.initial_dv)},
         {"final_DX", real(o.final_dx)},
         {"final_DV", real(o.final_dv)},
         {"max_DX", real(o.max_dx)},
         {"monotonicity_violations", o.monotonicity_violations},
         {"bound_violations", o.bound_violations}};
  j["steps_to_tolerance"] = o.steps_to_tolerance ? Json(*o.steps_to_tolerance) : Json(nullptr);
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

Json ensemble_to_json(const EnsembleResult& r) {
  std::int64_t mono = 0, bounds = 0, failed = 0;
  std::vector<std::int64_t> steps;
  for (const RunOutcome& o : r.runs) {
    mono += o.monotonicity_violations;
    bounds += o.bound_violations;
    failed += o.error.empty() ? 0 : 1;
    if (o.steps_to_tolerance) steps.push_back(*o.steps_to_tolerance);
  }
  std::sort(steps.begin(), steps.end());
  Json dist = nullptr;
  if (!steps.empty()) {
    auto q = [&](double f) { return steps[static_cast<std::size_t>(f * static_cast<double>(steps.size() - 1))]; };
    dist = {{"min", steps.front()}, {"median", q(0.5)}, {"p90", q(0.9)}, {"max", steps.back()}};
  }
  Json runs = Json::array();
  for (const RunOutcome& o : r.runs) runs.push_back(outcome_to_json(o));
  return {{"n_runs", r.runs.size()},
          {"flocked", r.flocked},
          {"fraction", r.fraction},
          {"fraction_is_finite_horizon_surrogate", true},
          {"wilson_95", {r.ci.lo, r.ci.hi}},
          {"failed_runs", failed},
          {"monotonicity_violations", mono},
          {"bound_violations", bounds},
          {"steps_to_tolerance", dist},
          {"runs", runs}};
}

void write_runs_csv(std::ostream& os, const EnsembleResult& r) {
  os << "run,seed,flocked,steps_to_tolerance,final_DX,final_DV,max_DX,monotonicity_violations,bound_violations\n";
  for (const RunOutcome& o : r.runs) {
    os << o.run << ',' << o.seed << ',' << (o.flocked ? 1 : 0) << ',';
    if (o.steps_to_tolerance) os << *o.steps_to_tolerance;
    os << ',' << format_real(o.final_dx) << ',' << format_real(o.final_dv) << ',' << format_real(o.max_dx) << ','
       << o.monotonicity_violations << ',' << o.bound_violations << '\n';
  }
}

Json estimate_to_json(const FrequencyEstimate& e) {
  return {{"hits", e.hits},
          {"samples", e.samples},
          {"fraction", e.fraction},
          {"standard_error", e.standard_error},
          {"wilson_95", {e.ci.lo, e.ci.hi}}};
}

}  // namespace flockswitch
