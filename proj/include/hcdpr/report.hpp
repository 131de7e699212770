// CSV time series and run manifests.
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcdpr/sim.hpp"

namespace hcdpr {

/// Bumped whenever the column set or order changes.
inline constexpr int kCsvSchemaVersion = 1;

/// t, q0..q4, qdot0..qdot4, e0..e{n-1}, T1..T6, tau4, tau5, x_e, z_e, q_e, KE, PE.
std::vector<std::string> csv_columns(int error_channels);

/// Writes the header and one row per record, 17 significant digits.
void write_csv(std::ostream& out, const std::vector<SimRecord>& records, int error_channels);

struct RunManifest {
  std::string scenario;
  std::string config_path;
  std::string output_dir;
  std::optional<double> dt_override;
  std::optional<double> duration_override;
  bool deterministic = true;
  std::string tool_version;
};

nlohmann::json to_json(const RunManifest& m, const ScenarioSpec& spec);

/// "settling_time=... peak_error=[...] final_T=[...] oscillation: sustained|damped"
std::string summary_line(const std::string& name, const ScenarioSummary& s);

/// Fixed "%.17g" formatting, independent of locale.
std::string format_double(double v);

}  // namespace hcdpr
