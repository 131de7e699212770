// Robot constants and the JSON configuration document.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace hcdpr {

/// Geometry, mass properties and cable limits of the planar hybrid robot.
/// Lengths in m, masses in kg, inertias in kg m^2, tensions in N.
struct RobotParams {
  // Frame and platform geometry.
  double l_a = 0.440;
  double l_b = 0.268;
  double l_c = 0.105;
  double l_d = 0.412;
  double l_e = 3.000;
  double l_f = 1.000;
  double l_g = 0.086;
  double l_h = 0.105;
  double l_bd = 0.055;
  double l_m = 0.052;
  // Arm links.
  double l_1 = 0.305;
  double l_2 = 0.305;
  double l_c1 = 0.1525;
  double l_c2 = 0.1525;
  // Mass properties.
  double m_m = 30.0;
  double m_1 = 10.0;
  double m_2 = 10.0;
  double I_m = 0.83;
  double I_1 = 0.18;
  double I_2 = 0.18;
  // Cables.
  double T_min = 40.0;
  double T_max = 2000.0;
  double K_s = 1.1e4;
  double g = 9.810;

  bool operator==(const RobotParams&) const = default;
};

/// Spring constants of the three-spring stand-in for the cables. Only used by
/// the standalone spring model; the cable-driven model replaces these rows by
/// the structure-matrix force.
struct EquivalentSprings {
  double k_x = 0.0;
  double k_z = 0.0;
  double k_theta = 0.0;
  double x_m0 = 0.0;
  double z_m0 = 0.0;
  double theta_m0 = 0.0;

  bool operator==(const EquivalentSprings&) const = default;
};

RobotParams default_params();

/// Throws ValidationError naming the first offending field.
void validate(const RobotParams& params);
void validate(const EquivalentSprings& springs);

nlohmann::json to_json(const RobotParams& params);
nlohmann::json to_json(const EquivalentSprings& springs);

/// Missing keys keep their defaults; unknown keys are rejected.
RobotParams params_from_json(const nlohmann::json& doc);
EquivalentSprings springs_from_json(const nlohmann::json& doc);

std::string serialize(const RobotParams& params);

/// Whole configuration document: robot fields at top level, plus optional
/// "springs" and "scenario" objects.
struct ConfigDocument {
  RobotParams params;
  EquivalentSprings springs;
  nlohmann::json scenario = nlohmann::json::object();
};

ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config_document(const std::filesystem::path& path);

/// Reads a JSON config file. An empty file yields default_params().
RobotParams load_config(const std::filesystem::path& path);

}  // namespace hcdpr
