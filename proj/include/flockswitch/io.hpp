#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "json.hpp"

#include "flockswitch/analysis.hpp"
#include "flockswitch/audit.hpp"
#include "flockswitch/dynamics.hpp"
#include "flockswitch/montecarlo.hpp"
#include "flockswitch/switching.hpp"

namespace flockswitch {

using Json = nlohmann::json;

/// 17 significant digits, '.' decimal point, independent of the locale.
std::string format_real(double x);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// t,DX,DV,sigma with 1-based sigma; sigma is 0 on the final record.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Json snapshots_to_json(const Trajectory& traj);
Json trajectory_summary(const Trajectory& traj);

Json schedule_to_json(const SwitchingSchedule& s);

Json report_to_json(const BoundReport& r);
/// Aligned plain-text table: label, value, status, margin, note.
std::string render_report(const BoundReport& r);

Json audit_to_json(const PathAudit& a);

Json outcome_to_json(const RunOutcome& o);
Json ensemble_to_json(const EnsembleResult& r);
/// One row per run.
void write_runs_csv(std::ostream& os, const EnsembleResult& r);

Json estimate_to_json(const FrequencyEstimate& e);

}  // namespace flockswitch
