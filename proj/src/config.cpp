#include "flockswitch/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace flockswitch {

namespace {

struct Reader {
  const Json& j;
  std::string path;

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path.empty() ? "/" : path, what); }

  bool has(const char* key) const { return j.contains(key) && !j.at(key).is_null(); }

  Reader at(const char* key) const {
    if (!j.is_object()) fail("expected an object");
    if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing");
    return {j.at(key), path + "/" + key};
  }
  Reader at(std::size_t i) const { return {j.at(i), path + "/" + std::to_string(i)}; }

  double number() const {
    if (!j.is_number()) fail("expected a number");
    return j.get<double>();
  }
  std::int64_t integer() const {
    if (!j.is_number_integer()) fail("expected an integer");
    return j.get<std::int64_t>();
  }
  std::string string() const {
    if (!j.is_string()) fail("expected a string");
    return j.get<std::string>();
  }
  std::size_t array_size() const {
    if (!j.is_array()) fail("expected an array");
    return j.size();
  }
  std::vector<double> numbers() const {
    std::vector<double> v(array_size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i).number();
    return v;
  }
  std::vector<std::int64_t> integers() const {
    std::vector<std::int64_t> v(array_size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i).integer();
    return v;
  }
  std::pair<double, double> range() const {
    const auto v = numbers();
    if (v.size() != 2 || !(v[0] <= v[1])) fail("expected [lo, hi] with lo <= hi");
    return {v[0], v[1]};
  }
  Eigen::MatrixXd matrix() const {
    try {
      return matrix_from_json(j);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
  std::int64_t integer_or(const char* key, std::int64_t fallback) const {
    return has(key) ? at(key).integer() : fallback;
  }
  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return at(key).number();
  }
};

bool same_matrix(const std::optional<Eigen::MatrixXd>& a, const std::optional<Eigen::MatrixXd>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->rows() == b->rows() && a->cols() == b->cols() && (a->array() == b->array()).all();
}

}  // namespace

DwellingProcess DwellingConfig::process() const {
  if (kind == "deterministic") return DwellingProcess::deterministic(value);
  if (kind == "poisson") return DwellingProcess::poisson(values);
  if (kind == "geometric") return DwellingProcess::geometric(values);
  throw std::invalid_argument("unknown dwelling kind '" + kind + "'");
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.n_agents == b.n_agents && a.dim == b.dim && same_matrix(a.positions, b.positions) &&
         same_matrix(a.velocities, b.velocities) && a.position_box == b.position_box &&
         a.velocity_box == b.velocity_box && a.weight == b.weight && a.h == b.h && a.graphs == b.graphs &&
         a.probs == b.probs && a.dwelling == b.dwelling && a.framework == b.framework &&
         a.continuous_time_a == b.continuous_time_a && a.run == b.run;
}

TopologyEnsemble ExperimentConfig::ensemble() const {
  std::vector<Digraph> gs;
  for (const auto& edges : graphs) gs.push_back(Digraph::from_one_based(n_agents, edges));
  return TopologyEnsemble(std::move(gs), probs);
}

InitSpec ExperimentConfig::init() const {
  InitSpec s;
  s.n_agents = n_agents;
  s.dim = dim;
  if (positions && velocities) s.fixed = Configuration{*positions, *velocities, 0};
  s.position_lo = position_box.first;
  s.position_hi = position_box.second;
  s.velocity_lo = velocity_box.first;
  s.velocity_hi = velocity_box.second;
  return s;
}

FrameworkParams ExperimentConfig::framework_params() const {
  FrameworkParams p;
  p.n_agents = n_agents;
  p.probs = probs;
  p.h = h;
  p.weight = weight;
  p.M = framework.M;
  p.n = framework.n;
  p.c = framework.c;
  p.epsilon = framework.epsilon.value_or(weight.tail_exponent());
  p.delta = framework.delta;
  p.x_inf = framework.x_inf;
  return p;
}

EnsembleSpec ExperimentConfig::ensemble_spec() const {
  return EnsembleSpec{.ensemble = ensemble(),
                      .process = dwelling.process(),
                      .weight = weight,
                      .h = h,
                      .init = init(),
                      .n_runs = run.runs,
                      .root_seed = run.seed,
                      .horizon = run.horizon,
                      .v_tol_rel = run.v_tol_rel,
                      .x_cap_factor = run.x_cap_factor,
                      .audit = std::nullopt,
                      .jobs = run.jobs,
                      .snapshot_stride = run.snapshot_stride};
}

ExperimentConfig config_from_json(const Json& root) {
  const Reader r{root, ""};
  if (!root.is_object()) r.fail("expected an object");
  ExperimentConfig c;

  const Reader agents = r.at("agents");
  c.n_agents = static_cast<int>(agents.at("N").integer());
  c.dim = static_cast<int>(agents.integer_or("d", 1));
  if (agents.has("positions") != agents.has("velocities"))
    agents.fail("give both positions and velocities, or neither");
  if (agents.has("positions")) {
    c.positions = agents.at("positions").matrix();
    c.velocities = agents.at("velocities").matrix();
  }
  if (agents.has("position_box")) c.position_box = agents.at("position_box").range();
  if (agents.has("velocity_box")) c.velocity_box = agents.at("velocity_box").range();

  const Reader weight = r.at("weight");
  const std::string wkind = weight.at("kind").string();
  const double kappa = weight.at("kappa").number();
  try {
    if (wkind == "constant")
      c.weight = CommunicationWeight::constant(kappa);
    else if (wkind == "power_law")
      c.weight = CommunicationWeight::power_law(kappa, weight.at("beta").number());
    else
      weight.at("kind").fail("unknown weight kind '" + wkind + "' (constant | power_law)");
  } catch (const std::invalid_argument& e) {
    weight.fail(e.what());
  }

  c.h = r.at("h").number();

  const Reader topo = r.at("topologies");
  const Reader graphs = topo.at("graphs");
  for (std::size_t k = 0; k < graphs.array_size(); ++k) {
    const Reader g = graphs.at(k);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t e = 0; e < g.array_size(); ++e) {
      const auto pair = g.at(e).integers();
      if (pair.size() != 2) g.at(e).fail("edge must be [j, i]");
      edges.emplace_back(static_cast<int>(pair[0]), static_cast<int>(pair[1]));
    }
    c.graphs.push_back(std::move(edges));
  }
  if (topo.has("probs")) {
    c.probs = topo.at("probs").numbers();
  } else {
    c.probs.assign(c.graphs.size(), c.graphs.empty() ? 0.0 : 1.0 / static_cast<double>(c.graphs.size()));
  }

  const Reader dw = r.at("dwelling");
  c.dwelling.kind = dw.at("kind").string();
  if (c.dwelling.kind == "deterministic") {
    c.dwelling.values.clear();
    c.dwelling.value = dw.at("value").integer();
  } else if (c.dwelling.kind == "poisson") {
    c.dwelling.values = dw.at("rates").numbers();
  } else if (c.dwelling.kind == "geometric") {
    c.dwelling.values = dw.at("probs").numbers();
  } else {
    dw.at("kind").fail("unknown dwelling kind '" + c.dwelling.kind + "' (poisson | geometric | deterministic)");
  }

  if (r.has("framework")) {
    const Reader fw = r.at("framework");
    c.framework.n = fw.integer_or("n", 1);
    c.framework.c = fw.number_or("c", 1.0);
    c.framework.M = fw.number_or("M", 1.0);
    c.framework.epsilon = fw.optional_number("epsilon");
    c.framework.delta = fw.optional_number("delta");
    c.framework.x_inf = fw.optional_number("x_inf");
  }
  if (r.has("continuous_time")) c.continuous_time_a = r.at("continuous_time").at("a").number();

  if (r.has("run")) {
    const Reader run = r.at("run");
    c.run.horizon = run.integer_or("horizon", c.run.horizon);
    if (run.has("seed")) {
      const Json& s = run.at("seed").j;
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
        run.at("seed").fail("expected a nonnegative integer");
      c.run.seed = s.get<std::uint64_t>();
    }
    c.run.runs = run.integer_or("runs", c.run.runs);
    c.run.jobs = static_cast<int>(run.integer_or("jobs", c.run.jobs));
    c.run.v_tol_rel = run.number_or("v_tol_rel", c.run.v_tol_rel);
    c.run.x_cap_factor = run.number_or("x_cap_factor", c.run.x_cap_factor);
    c.run.snapshot_stride = run.integer_or("snapshot_stride", c.run.snapshot_stride);
    if (run.has("out")) c.run.out = run.at("out").string();
    if (run.has("n_grid")) c.run.n_grid = run.at("n_grid").integers();
    if (run.has("r_grid")) c.run.r_grid = run.at("r_grid").integers();
  }

  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  if (c.n_agents < 1) throw ConfigError("/agents/N", "need N >= 1");
  if (c.dim < 1) throw ConfigError("/agents/d", "need d >= 1");
  if (c.positions) {
    for (const auto& [m, key] : {std::pair{&*c.positions, "positions"}, std::pair{&*c.velocities, "velocities"}}) {
      if (m->rows() != c.n_agents || m->cols() != c.dim)
        throw ConfigError(std::string("/agents/") + key, "expected an N x d array");
      if (!m->allFinite()) throw ConfigError(std::string("/agents/") + key, "entries must be finite");
    }
  }
  if (!(c.h > 0.0) || !std::isfinite(c.h)) throw ConfigError("/h", "time step must be positive");
  if (c.graphs.empty()) throw ConfigError("/topologies/graphs", "admissible set is empty");
  for (std::size_t k = 0; k < c.graphs.size(); ++k)
    for (std::size_t e = 0; e < c.graphs[k].size(); ++e) {
      const auto [j, i] = c.graphs[k][e];
      if (j < 1 || j > c.n_agents || i < 1 || i > c.n_agents)
        throw ConfigError("/topologies/graphs/" + std::to_string(k) + "/" + std::to_string(e),
                          "edge endpoints must lie in [1..N]");
    }
  if (c.probs.size() != c.graphs.size())
    throw ConfigError("/topologies/probs", "need one choice probability per graph");
  try {
    (void)c.ensemble();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/topologies/probs", e.what());
  }
  try {
    (void)c.dwelling.process();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/dwelling", e.what());
  }
  const FrameworkConfig& f = c.framework;
  if (f.n < 1) throw ConfigError("/framework/n", "need n >= 1");
  if (!(f.c > 0.0)) throw ConfigError("/framework/c", "need c > 0");
  if (!(f.M >= 0.0)) throw ConfigError("/framework/M", "need M >= 0");
  if (f.epsilon && !(*f.epsilon >= 0.0)) throw ConfigError("/framework/epsilon", "need epsilon >= 0");
  if (f.delta && !(*f.delta > 0.0)) throw ConfigError("/framework/delta", "need delta > 0");
  if (f.x_inf && !(*f.x_inf > 0.0)) throw ConfigError("/framework/x_inf", "need x_inf > 0");
  if (c.continuous_time_a && !(*c.continuous_time_a > 0.0)) throw ConfigError("/continuous_time/a", "need a > 0");
  const RunConfig& r = c.run;
  if (r.horizon < 1) throw ConfigError("/run/horizon", "need horizon >= 1");
  if (r.runs < 1) throw ConfigError("/run/runs", "need runs >= 1");
  if (r.jobs < 1) throw ConfigError("/run/jobs", "need jobs >= 1");
  if (!(r.v_tol_rel >= 0.0)) throw ConfigError("/run/v_tol_rel", "need v_tol_rel >= 0");
  if (!(r.x_cap_factor > 0.0)) throw ConfigError("/run/x_cap_factor", "need x_cap_factor > 0");
  if (r.snapshot_stride < 0) throw ConfigError("/run/snapshot_stride", "need snapshot_stride >= 0");
  for (std::size_t i = 0; i < r.n_grid.size(); ++i)
    if (r.n_grid[i] < 1) throw ConfigError("/run/n_grid/" + std::to_string(i), "need n >= 1");
  for (std::size_t i = 0; i < r.r_grid.size(); ++i)
    if (r.r_grid[i] < 0) throw ConfigError("/run/r_grid/" + std::to_string(i), "need r >= 0");
}

Json config_to_json(const ExperimentConfig& c) {
  Json agents{{"N", c.n_agents}, {"d", c.dim}};
  if (c.positions) {
    agents["positions"] = matrix_to_json(*c.positions);
    agents["velocities"] = matrix_to_json(*c.velocities);
  }
  agents["position_box"] = {c.position_box.first, c.position_box.second};
  agents["velocity_box"] = {c.velocity_box.first, c.velocity_box.second};

  Json weight{{"kappa", c.weight.kappa()}};
  if (c.weight.kind() == CommunicationWeight::Kind::Constant) {
    weight["kind"] = "constant";
  } else {
    weight["kind"] = "power_law";
    weight["beta"] = c.weight.beta();
  }

  Json graphs = Json::array();
  for (const auto& g : c.graphs) {
    Json edges = Json::array();
    for (const auto& [j, i] : g) edges.push_back({j, i});
    graphs.push_back(std::move(edges));
  }

  Json dw{{"kind", c.dwelling.kind}};
  if (c.dwelling.kind == "deterministic")
    dw["value"] = c.dwelling.value;
  else
    dw[c.dwelling.kind == "poisson" ? "rates" : "probs"] = c.dwelling.values;

  Json fw{{"n", c.framework.n}, {"c", c.framework.c}, {"M", c.framework.M}};
  if (c.framework.epsilon) fw["epsilon"] = *c.framework.epsilon;
  if (c.framework.delta) fw["delta"] = *c.framework.delta;
  if (c.framework.x_inf) fw["x_inf"] = *c.framework.x_inf;

  Json run{{"horizon", c.run.horizon},     {"seed", c.run.seed},
           {"runs", c.run.runs},           {"jobs", c.run.jobs},
           {"v_tol_rel", c.run.v_tol_rel}, {"x_cap_factor", c.run.x_cap_factor},
           {"snapshot_stride", c.run.snapshot_stride}, {"out", c.run.out},
           {"n_grid", c.run.n_grid},       {"r_grid", c.run.r_grid}};

  Json j{{"agents", agents},
         {"weight", weight},
         {"h", c.h},
         {"topologies", {{"graphs", graphs}, {"probs", c.probs}}},
         {"dwelling", dw},
         {"framework", fw},
         {"run", run}};
  if (c.continuous_time_a) j["continuous_time"] = {{"a", *c.continuous_time_a}};
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path, std::string("parse error at byte ") + std::to_string(e.byte));
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) { return hex64(fnv1a(config_to_json(c).dump())); }

}  // namespace flockswitch
