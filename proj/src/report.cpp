#include "hcdpr/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hcdpr {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // snprintf honours LC_NUMERIC; the CSV contract is '.'.
  for (char* c = buf; *c; ++c) {
    if (*c == ',') *c = '.';
  }
  return buf;
}

std::vector<std::string> csv_columns(int error_channels) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < 5; ++i) cols.push_back("q" + std::to_string(i));
  for (int i = 0; i < 5; ++i) cols.push_back("qdot" + std::to_string(i));
  for (int i = 0; i < error_channels; ++i) cols.push_back("e" + std::to_string(i));
  for (int i = 1; i <= 6; ++i) cols.push_back("T" + std::to_string(i));
  for (const char* c : {"tau4", "tau5", "x_e", "z_e", "q_e", "KE", "PE"}) cols.emplace_back(c);
  return cols;
}

void write_csv(std::ostream& out, const std::vector<SimRecord>& records, int error_channels) {
  const auto cols = csv_columns(error_channels);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string row;
  for (const auto& r : records) {
    row = format_double(r.t);
    auto put = [&](double v) {
      row += ',';
      row += format_double(v);
    };
    for (int i = 0; i < 5; ++i) put(r.q[i]);
    for (int i = 0; i < 5; ++i) put(r.qdot[i]);
    for (int i = 0; i < error_channels; ++i) put(i < r.e.size() ? r.e[i] : std::nan(""));
    for (int i = 0; i < 6; ++i) put(r.T[i]);
    put(r.command.u_a[0]);
    put(r.command.u_a[1]);
    put(r.pose.x_e);
    put(r.pose.z_e);
    put(r.pose.q_e);
    put(r.energy.kinetic);
    put(r.energy.potential);
    out << row << '\n';
  }
}

nlohmann::json to_json(const RunManifest& m, const ScenarioSpec& spec) {
  nlohmann::json doc;
  doc["scenario"] = m.scenario;
  doc["config_path"] = m.config_path;
  doc["output_dir"] = m.output_dir;
  doc["dt_override"] = m.dt_override ? nlohmann::json(*m.dt_override) : nlohmann::json();
  doc["duration_override"] =
      m.duration_override ? nlohmann::json(*m.duration_override) : nlohmann::json();
  doc["deterministic"] = m.deterministic;
  doc["tool_version"] = m.tool_version;
  doc["csv_schema_version"] = kCsvSchemaVersion;
  doc["spec"] = to_json(spec);
  return doc;
}

std::string summary_line(const std::string& name, const ScenarioSummary& s) {
  std::ostringstream out;
  out << name << ": settling_time=" << (std::isinf(s.settling_time) ? "none" : format_double(s.settling_time))
      << " peak_error=[";
  for (Eigen::Index i = 0; i < s.peak_error.size(); ++i) {
    out << (i ? "," : "") << format_double(s.peak_error[i]);
  }
  out << "] final_T=[";
  for (int i = 0; i < 6; ++i) out << (i ? "," : "") << format_double(s.final_T[i]);
  out << "] oscillation: " << (s.sustained ? "sustained" : "damped");
  return out.str();
}

}  // namespace hcdpr
