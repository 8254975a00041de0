#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "flockswitch/analysis.hpp"
#include "flockswitch/io.hpp"
#include "flockswitch/montecarlo.hpp"

namespace flockswitch {

/// Malformed or inconsistent config. `where` is a JSON pointer into the document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct DwellingConfig {
  std::string kind = "geometric";  // poisson | geometric | deterministic
  std::vector<double> values{0.9};  // rates or success probabilities, cycled periodically
  std::int64_t value = 0;           // deterministic surplus

  DwellingProcess process() const;
  friend bool operator==(const DwellingConfig&, const DwellingConfig&) = default;
};

struct FrameworkConfig {
  std::int64_t n = 1;
  double c = 1.0;
  double M = 1.0;
  std::optional<double> epsilon;  // defaults to the tail exponent of phi
  std::optional<double> delta;
  std::optional<double> x_inf;
  friend bool operator==(const FrameworkConfig&, const FrameworkConfig&) = default;
};

struct RunConfig {
  std::int64_t horizon = 10000;
  std::uint64_t seed = 0;
  std::int64_t runs = 1;
  int jobs = 1;
  double v_tol_rel = 1e-8;
  double x_cap_factor = 1e6;
  std::int64_t snapshot_stride = 100;
  std::string out = "out";
  std::vector<std::int64_t> n_grid;  // bounds subcommand
  std::vector<std::int64_t> r_grid;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ExperimentConfig {
  int n_agents = 2;
  int dim = 1;
  std::optional<Eigen::MatrixXd> positions;  // fixed initial data, or
  std::optional<Eigen::MatrixXd> velocities;
  std::pair<double, double> position_box{-1.0, 1.0};  // uniform sampling box
  std::pair<double, double> velocity_box{-1.0, 1.0};
  CommunicationWeight weight = CommunicationWeight::constant(1.0);
  double h = 0.1;
  std::vector<std::vector<std::pair<int, int>>> graphs;  // 1-based [j, i]: j influences i
  std::vector<double> probs;
  DwellingConfig dwelling;
  FrameworkConfig framework;
  std::optional<double> continuous_time_a;
  RunConfig run;

  TopologyEnsemble ensemble() const;
  InitSpec init() const;
  FrameworkParams framework_params() const;
  EnsembleSpec ensemble_spec() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

/// Throws ConfigError naming the offending location.
ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a of the canonical JSON serialization.
std::string config_hash(const ExperimentConfig& c);

/// Checks every module precondition except 0 < h kappa < 1, which is a
/// framework condition reported by the check subcommand.
void validate_config(const ExperimentConfig& c);

}  // namespace flockswitch
