#include "flockswitch/audit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flockswitch {

PathAuditor::PathAuditor(const TopologyEnsemble& ens, const SwitchingSchedule& sched, FrameworkParams params)
    : ens_(&ens), sched_(&sched), params_(std::move(params)), phi_(ens.n_vertices()) {
  if (params_.n_agents != ens.n_vertices()) throw std::invalid_argument("audit: N disagrees with the topologies");
  if (params_.n_agents < 2) throw std::invalid_argument("audit needs N >= 2");
  const std::size_t n_instants = sched.instants.size();
  for (std::int64_t l = 0, a = 0; a < static_cast<std::int64_t>(n_instants); ++l) {
    a_.push_back(a);
    a += params_.n + static_cast<std::int64_t>(std::floor(params_.c * std::log(static_cast<double>(l + 1))));
  }
  const auto stride = static_cast<std::size_t>(params_.n_agents - 1);
  for (std::size_t l = 0; l < a_.size(); l += stride)
    block_starts_.push_back(sched.instants[static_cast<std::size_t>(a_[l])]);
}

void PathAuditor::close_block() {
  const auto& phi = phi_.value();
  block_mu_.emplace_back(ergodicity_coefficient(phi), is_stochastic(phi, kProductStochasticTol));
  phi_.reset();
}

StepObserver PathAuditor::observer() {
  return [this](const Configuration& before, int /*sigma*/, const Eigen::MatrixXd& m) {
    if (m.size() == 0) throw std::logic_error("path audit needs the matrix-form update");
    if (next_block_ < block_starts_.size() && before.t == block_starts_[next_block_]) {
      close_block();
      ++next_block_;
    }
    if (!is_stochastic(m, kFreshStochasticTol)) ++fresh_not_stochastic_;
    phi_.push(m);
  };
}

PathAudit PathAuditor::finish(const Trajectory& traj) {
  const std::int64_t t_final = traj.final_state.t;
  if (next_block_ < block_starts_.size() && t_final == block_starts_[next_block_]) {
    close_block();
    ++next_block_;
  }
  PathAudit out;
  out.fresh_not_stochastic = fresh_not_stochastic_;
  out.x_inf = traj.max_dx;
  if (params_.x_inf) {
    out.a3_holds = traj.max_dx <= *params_.x_inf;
    out.x_inf = std::max(out.x_inf, *params_.x_inf);
  }
  const double phi_inf = params_.weight(out.x_inf);
  const int N = params_.n_agents;
  const auto stride = static_cast<std::int64_t>(N - 1);

  // blocks r = 1 .. closed
  bool prefix_good = out.a3_holds;
  std::vector<bool> good_through;  // good_through[r]: blocks 1..r all rooted and within their dwell bound
  good_through.push_back(prefix_good);
  for (std::size_t k = 0; k < block_mu_.size(); ++k) {
    WindowAudit w;
    w.r = static_cast<std::int64_t>(k) + 1;
    w.t_begin = block_starts_[k];
    w.t_end = block_starts_[k + 1];
    w.mu = block_mu_[k].first;
    w.stochastic = block_mu_[k].second;
    w.rooted = true;
    for (std::int64_t l = (w.r - 1) * stride; l < w.r * stride && w.rooted; ++l) {
      std::vector<const Digraph*> active;
      for (std::int64_t j = a_[static_cast<std::size_t>(l)]; j < a_[static_cast<std::size_t>(l + 1)]; ++j)
        active.push_back(&ens_->graph(sched_->choices[static_cast<std::size_t>(j)]));
      w.rooted = has_spanning_tree(union_graph(std::span<const Digraph* const>(active)));
    }
    const std::int64_t sum = window_dwell_sum(sched_->dwell_draws, w.r, params_.n, params_.c, N);
    w.dwell_ok = static_cast<double>(sum) < dwell_threshold(w.r, params_.n, params_.c, params_.M, N);
    if (!w.stochastic) ++out.phi_not_stochastic;
    if (w.rooted && out.a3_holds) {
      w.mu_checked = true;
      w.mu_bound = ergodicity_lower_bound(w.t_end - w.t_begin, params_, phi_inf);
      w.mu_ok = w.mu >= w.mu_bound * (1.0 - 1e-12);
      ++out.lemma_checked;
      if (!w.mu_ok) ++out.lemma_violations;
    }
    out.a1_holds = out.a1_holds && w.rooted;
    out.a2_holds = out.a2_holds && w.dwell_ok;
    prefix_good = prefix_good && w.rooted && w.dwell_ok;
    good_through.push_back(prefix_good);
    out.windows.push_back(w);
  }

  // envelope on [t*_{r(N-1)}, t*_{(r+1)(N-1)}) needs blocks 1..r good
  if (traj.records.empty()) return out;
  const double dv0 = traj.records.front().dv;
  bool envelope_defined = envelope_exponent(params_) > 0.0;
  std::size_t r = 0;
  for (const StepRecord& rec : traj.records) {
    if (!envelope_defined) break;
    while (r + 1 < block_starts_.size() && rec.t >= block_starts_[r + 1]) ++r;
    if (r >= good_through.size() || !good_through[r]) break;
    const double env = velocity_decay_envelope(static_cast<std::int64_t>(r), params_, phi_inf);
    ++out.envelope_checked;
    if (rec.dv > dv0 * env * (1.0 + 1e-12) + 1e-300) ++out.envelope_violations;
  }
  return out;
}

PathAudit audit_path(const Configuration& init, const TopologyEnsemble& ens, const SwitchingSchedule& sched,
                     double h, const CommunicationWeight& w, std::int64_t horizon, const StopCriteria& stop,
                     const FrameworkParams& params, Trajectory* traj_out) {
  PathAuditor auditor(ens, sched, params);
  SimulationOptions opts;
  opts.form = UpdateForm::Matrix;
  opts.snapshot_stride = traj_out ? 100 : 0;
  opts.observer = auditor.observer();
  Trajectory traj = simulate(init, ens, sched, h, w, horizon, stop, opts);
  PathAudit audit = auditor.finish(traj);
  if (traj_out) *traj_out = std::move(traj);
  return audit;
}

}  // namespace flockswitch
