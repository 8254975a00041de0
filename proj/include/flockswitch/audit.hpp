#pragma once

// Pathwise verification of the ergodicity lower bound and the velocity decay
// envelope along one simulated sample path.

#include <cstdint>
#include <vector>

#include "flockswitch/analysis.hpp"
#include "flockswitch/dynamics.hpp"
#include "flockswitch/switching.hpp"

namespace flockswitch {

/// One block of N-1 consecutive sub-windows, [t*_{(r-1)(N-1)}, t*_{r(N-1)}).
struct WindowAudit {
  std::int64_t r = 0;
  std::int64_t t_begin = 0;
  std::int64_t t_end = 0;
  bool rooted = false;      // every sub-window union has a spanning tree
  bool dwell_ok = false;    // window dwell sum below M(n + floor(c log r(N-1)))
  bool stochastic = false;  // Phi over the block is stochastic within 1e-10
  double mu = 0.0;          // measured ergodicity coefficient of Phi
  double mu_bound = 0.0;    // ergodicity_lower_bound(t_end - t_begin)
  bool mu_checked = false;
  bool mu_ok = true;
};

struct PathAudit {
  std::vector<WindowAudit> windows;   // blocks fully covered by the simulated steps
  double x_inf = 0.0;                 // bound used for phi(x_inf)
  bool a1_holds = true;               // every covered block rooted
  bool a2_holds = true;               // every covered block within its dwell bound
  bool a3_holds = true;               // max D(X) <= configured x_inf (if any)
  std::int64_t fresh_not_stochastic = 0;  // one-step maps outside 1e-12 of stochastic
  std::int64_t phi_not_stochastic = 0;
  std::int64_t lemma_checked = 0;
  std::int64_t lemma_violations = 0;
  std::int64_t envelope_checked = 0;
  std::int64_t envelope_violations = 0;

  std::int64_t violations() const {
    return fresh_not_stochastic + phi_not_stochastic + lemma_violations + envelope_violations;
  }
};

/// Install observer() in SimulationOptions (matrix form), run simulate, then
/// call finish() with the trajectory.
class PathAuditor {
 public:
  PathAuditor(const TopologyEnsemble& ens, const SwitchingSchedule& sched, FrameworkParams params);

  StepObserver observer();
  PathAudit finish(const Trajectory& traj);

 private:
  void close_block();

  const TopologyEnsemble* ens_;
  const SwitchingSchedule* sched_;
  FrameworkParams params_;
  std::vector<std::int64_t> block_starts_;  // t*_{r(N-1)}, r = 0, 1, ...
  std::vector<std::int64_t> a_;             // a_l(n, c) while a_l < #instants
  std::size_t next_block_ = 1;
  FlowAccumulator<double> phi_;
  std::vector<std::pair<double, bool>> block_mu_;  // (mu, stochastic) for closed blocks
  std::int64_t fresh_not_stochastic_ = 0;
};

/// Simulates one path with auditing.
PathAudit audit_path(const Configuration& init, const TopologyEnsemble& ens, const SwitchingSchedule& sched,
                     double h, const CommunicationWeight& w, std::int64_t horizon, const StopCriteria& stop,
                     const FrameworkParams& params, Trajectory* traj_out = nullptr);

}  // namespace flockswitch
