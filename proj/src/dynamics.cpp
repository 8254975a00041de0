#include "flockswitch/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace flockswitch {

namespace {

void require_stable(double h, const CommunicationWeight& w) {
  if (!(h > 0.0) || !(h * w.kappa() < 1.0))
    throw std::domain_error("stability condition violated: need 0 < h*kappa < 1");
}

}  // namespace

void Configuration::validate() const {
  if (positions.rows() < 1) throw std::invalid_argument("configuration needs at least one agent");
  if (positions.rows() != velocities.rows() || positions.cols() != velocities.cols())
    throw std::invalid_argument("positions and velocities differ in shape");
  if (positions.cols() < 1) throw std::invalid_argument("configuration needs d >= 1");
  if (!positions.allFinite() || !velocities.allFinite())
    throw std::invalid_argument("configuration has non-finite entries");
}

StopCriteria StopCriteria::relative_to(const Configuration& init, double v_rel, double x_factor) {
  return {v_rel * diameter(init.velocities), x_factor * (diameter(init.positions) + 1.0)};
}

Configuration step(const Configuration& cfg, const Digraph& g, double h, const CommunicationWeight& w) {
  require_stable(h, w);
  const int n = cfg.n_agents();
  if (n != g.size()) throw std::invalid_argument("step: configuration and graph disagree on N");
  Configuration next;
  next.positions = cfg.positions + h * cfg.velocities;
  next.velocities = cfg.velocities;
  next.t = cfg.t + 1;
  const double scale = h / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || !g.chi(i, j)) continue;
      const double phi = w((cfg.positions.row(j) - cfg.positions.row(i)).norm());
      next.velocities.row(i) += scale * phi * (cfg.velocities.row(j) - cfg.velocities.row(i));
    }
  }
  return next;
}

Configuration step_matrix_form(const Configuration& cfg, const Digraph& g, double h,
                               const CommunicationWeight& w) {
  const Eigen::MatrixXd m = update_matrix(cfg.positions, g, h, w);
  return {cfg.positions + h * cfg.velocities, m * cfg.velocities, cfg.t + 1};
}

Trajectory simulate(const Configuration& init, const TopologyEnsemble& ens, const SwitchingSchedule& sched,
                    double h, const CommunicationWeight& w, std::int64_t horizon, const StopCriteria& stop,
                    const SimulationOptions& options) {
  init.validate();
  require_stable(h, w);
  if (init.n_agents() != ens.n_vertices())
    throw std::invalid_argument("simulate: configuration and topologies disagree on N");
  if (horizon < 0) throw std::invalid_argument("simulate: negative horizon");
  if (horizon > 0 && sched.last_instant() < horizon)
    throw std::invalid_argument("simulate: schedule does not cover the horizon");

  Trajectory traj;
  Configuration cur = init;
  cur.t = 0;
  double dx = diameter(cur.positions);
  double dv = diameter(cur.velocities);
  traj.max_dx = dx;
  const double tol = options.monotonicity_tol;

  auto take_snapshot = [&](const Configuration& c) {
    if (options.snapshot_stride > 0 && c.t % options.snapshot_stride == 0) traj.snapshots.push_back(c);
  };
  auto check_stop = [&]() {
    if (dv <= stop.v_tol && !traj.steps_to_tolerance) {
      traj.flocked = true;
      traj.steps_to_tolerance = cur.t;
    }
    if (dx >= stop.x_cap) traj.diverged = true;
    return options.stop_early && (traj.flocked || traj.diverged);
  };

  take_snapshot(cur);
  bool stopped = check_stop();
  while (!stopped && cur.t < horizon) {
    const int sigma = topology_at(sched, cur.t);
    traj.records.push_back({cur.t, dx, dv, sigma});
    const Digraph& g = ens.graph(sigma);
    Configuration next;
    if (options.form == UpdateForm::Matrix) {
      const Eigen::MatrixXd m = update_matrix(cur.positions, g, h, w);
      if (options.observer) options.observer(cur, sigma, m);
      next = {cur.positions + h * cur.velocities, m * cur.velocities, cur.t + 1};
    } else {
      if (options.observer) options.observer(cur, sigma, Eigen::MatrixXd());
      next = step(cur, g, h, w);
    }
    const double dx_next = diameter(next.positions);
    const double dv_next = diameter(next.velocities);
    if (dv_next > dv + tol * std::max(1.0, dv) || dx_next > dx + h * dv + tol * std::max(1.0, dx))
      ++traj.monotonicity_violations;
    cur = std::move(next);
    dx = dx_next;
    dv = dv_next;
    traj.max_dx = std::max(traj.max_dx, dx);
    take_snapshot(cur);
    stopped = check_stop();
  }
  traj.records.push_back({cur.t, dx, dv, -1});
  if (traj.snapshots.empty() || traj.snapshots.back().t != cur.t) traj.snapshots.push_back(cur);
  if (options.snapshot_stride == 0) traj.snapshots.clear();
  traj.final_state = std::move(cur);
  return traj;
}

}  // namespace flockswitch
