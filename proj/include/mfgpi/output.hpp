#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "mfgpi/diagnostics.hpp"
#include "mfgpi/grid.hpp"

namespace mfg {

/// Shortest of %.15g, %.16g, %.17g that reads back exactly; NaN prints as "nan" and infinities as "inf" / "-inf".
std::string format_real(double v);

// CSV writers. Rows are ordered by time index, then by flat node index.
// All throw std::runtime_error when the file cannot be written.

/// Columns t, x1[, x2], m.
void write_density_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                       const TimeField& m);
/// Columns t, x1[, x2], u.
void write_value_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                     const TimeField& u);
/// Columns t, x1[, x2], q_left_1, q_right_1[, q_left_2, q_right_2]; t is the
/// left end of the interval the policy acts on.
void write_policy_csv(const std::string& path, const SpaceGrid& grid, const TimeGrid& time,
                      const PolicyTimeField& q);
/// Columns iteration, d_density, res_hjb, res_fp, gap_u, gap_m, gap_q.
void write_history_csv(const std::string& path, const ConvergenceReport& report);

void write_json(const std::string& path, const nlohmann::json& doc);

/// Local time as ISO 8601 with offset.
std::string timestamp_now();

}  // namespace mfg
