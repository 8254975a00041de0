#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "flockswitch/graph.hpp"
#include "flockswitch/matrix.hpp"
#include "flockswitch/switching.hpp"
#include "flockswitch/weight.hpp"

namespace flockswitch {

/// Agent state at integer time t: one row per agent, one column per dimension.
struct Configuration {
  Eigen::MatrixXd positions;
  Eigen::MatrixXd velocities;
  std::int64_t t = 0;

  int n_agents() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }
  /// Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;
};

struct StopCriteria {
  double v_tol = 0.0;                                        // flocked once D(V) <= v_tol
  double x_cap = std::numeric_limits<double>::infinity();    // diverged once D(X) >= x_cap

  /// v_tol = v_rel * D(V0), x_cap = x_factor * (D(X0) + 1).
  static StopCriteria relative_to(const Configuration& init, double v_rel = 1e-8, double x_factor = 1e6);
};

struct StepRecord {
  std::int64_t t;
  double dx;
  double dv;
  int sigma;  // 0-based topology active on [t, t+1); -1 at the final record
};

enum class UpdateForm { Matrix, Component };

/// Called before each step with the state at time t, the active topology and
/// the one-step velocity map (matrix form only; empty otherwise).
using StepObserver =
    std::function<void(const Configuration& before, int sigma, const Eigen::MatrixXd& update)>;

struct SimulationOptions {
  UpdateForm form = UpdateForm::Matrix;
  std::int64_t snapshot_stride = 100;  // 0 disables snapshots
  double monotonicity_tol = 1e-12;
  bool stop_early = true;
  StepObserver observer;
};

struct Trajectory {
  std::vector<StepRecord> records;      // one per time step, t = 0 included
  std::vector<Configuration> snapshots;
  Configuration final_state;
  bool flocked = false;
  bool diverged = false;
  std::optional<std::int64_t> steps_to_tolerance;
  double max_dx = 0.0;
  /// Steps where D(V) grew or D(X) outran D(X) + h D(V), beyond tolerance.
  std::int64_t monotonicity_violations = 0;
};

/// One explicit Euler step, component form. Positions advance with the
/// pre-step velocities; the velocity update reads positions at time t.
Configuration step(const Configuration& cfg, const Digraph& g, double h, const CommunicationWeight& w);

/// The same step as V <- M V with M = update_matrix(X[t], g, h, w).
Configuration step_matrix_form(const Configuration& cfg, const Digraph& g, double h,
                               const CommunicationWeight& w);

/// Runs t = 0 .. horizon-1 under the topologies of `sched`.
Trajectory simulate(const Configuration& init, const TopologyEnsemble& ens, const SwitchingSchedule& sched,
                    double h, const CommunicationWeight& w, std::int64_t horizon, const StopCriteria& stop,
                    const SimulationOptions& options = {});

}  // namespace flockswitch
