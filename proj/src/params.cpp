#include "hcdpr/params.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "hcdpr/errors.hpp"

namespace hcdpr {
namespace {

struct ParamField {
  std::string_view name;
  double RobotParams::*member;
};

constexpr std::array<ParamField, 24> kParamFields{{
    {"l_a", &RobotParams::l_a},     {"l_b", &RobotParams::l_b},
    {"l_c", &RobotParams::l_c},     {"l_d", &RobotParams::l_d},
    {"l_e", &RobotParams::l_e},     {"l_f", &RobotParams::l_f},
    {"l_g", &RobotParams::l_g},     {"l_h", &RobotParams::l_h},
    {"l_bd", &RobotParams::l_bd},   {"l_m", &RobotParams::l_m},
    {"l_1", &RobotParams::l_1},     {"l_2", &RobotParams::l_2},
    {"l_c1", &RobotParams::l_c1},   {"l_c2", &RobotParams::l_c2},
    {"m_m", &RobotParams::m_m},     {"m_1", &RobotParams::m_1},
    {"m_2", &RobotParams::m_2},     {"I_m", &RobotParams::I_m},
    {"I_1", &RobotParams::I_1},     {"I_2", &RobotParams::I_2},
    {"T_min", &RobotParams::T_min}, {"T_max", &RobotParams::T_max},
    {"K_s", &RobotParams::K_s},     {"g", &RobotParams::g},
}};

struct SpringField {
  std::string_view name;
  double EquivalentSprings::*member;
};

constexpr std::array<SpringField, 6> kSpringFields{{
    {"k_x", &EquivalentSprings::k_x},
    {"k_z", &EquivalentSprings::k_z},
    {"k_theta", &EquivalentSprings::k_theta},
    {"x_m0", &EquivalentSprings::x_m0},
    {"z_m0", &EquivalentSprings::z_m0},
    {"theta_m0", &EquivalentSprings::theta_m0},
}};

double read_number(const nlohmann::json& value, std::string_view key) {
  if (!value.is_number()) {
    throw ConfigError("field '" + std::string(key) + "' must be a number");
  }
  return value.get<double>();
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

RobotParams default_params() { return RobotParams{}; }

void validate(const RobotParams& p) {
  for (const auto& field : kParamFields) {
    const double v = p.*field.member;
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(field.name), "must be finite");
    }
    if (field.name == "T_min" || field.name == "T_max") continue;
    if (v <= 0.0) {
      throw ValidationError(std::string(field.name), "must be strictly positive");
    }
  }
  if (p.T_min < 0.0) throw ValidationError("T_min", "must be non-negative");
  if (!(p.T_min < p.T_max)) throw ValidationError("T_max", "must exceed T_min");
  if (p.l_c1 > p.l_1) throw ValidationError("l_c1", "must not exceed l_1");
  if (p.l_c2 > p.l_2) throw ValidationError("l_c2", "must not exceed l_2");
}

void validate(const EquivalentSprings& s) {
  for (const auto& field : kSpringFields) {
    if (!std::isfinite(s.*field.member)) {
      throw ValidationError(std::string(field.name), "must be finite");
    }
  }
  if (s.k_x < 0.0) throw ValidationError("k_x", "must be non-negative");
  if (s.k_z < 0.0) throw ValidationError("k_z", "must be non-negative");
  if (s.k_theta < 0.0) throw ValidationError("k_theta", "must be non-negative");
}

nlohmann::json to_json(const RobotParams& p) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& field : kParamFields) doc[std::string(field.name)] = p.*field.member;
  return doc;
}

nlohmann::json to_json(const EquivalentSprings& s) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& field : kSpringFields) doc[std::string(field.name)] = s.*field.member;
  return doc;
}

RobotParams params_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  RobotParams p = default_params();
  for (const auto& [key, value] : doc.items()) {
    if (key == "springs" || key == "scenario") continue;
    const auto* it = std::find_if(kParamFields.begin(), kParamFields.end(),
                                  [&](const ParamField& f) { return f.name == key; });
    if (it == kParamFields.end()) throw ConfigError("unknown field '" + key + "'");
    p.*(it->member) = read_number(value, key);
  }
  validate(p);
  return p;
}

EquivalentSprings springs_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("'springs' must be a JSON object");
  EquivalentSprings s;
  for (const auto& [key, value] : doc.items()) {
    const auto* it = std::find_if(kSpringFields.begin(), kSpringFields.end(),
                                  [&](const SpringField& f) { return f.name == key; });
    if (it == kSpringFields.end()) throw ConfigError("unknown spring field '" + key + "'");
    s.*(it->member) = read_number(value, key);
  }
  validate(s);
  return s;
}

std::string serialize(const RobotParams& params) { return to_json(params).dump(2); }

ConfigDocument parse_config(const std::string& text) {
  ConfigDocument config;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("parse error at line " + std::to_string(line) + ": " + e.what(), line);
  }
  config.params = params_from_json(doc);
  if (doc.contains("springs")) config.springs = springs_from_json(doc.at("springs"));
  if (doc.contains("scenario")) {
    if (!doc.at("scenario").is_object()) throw ConfigError("'scenario' must be a JSON object");
    config.scenario = doc.at("scenario");
  }
  return config;
}

ConfigDocument load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

RobotParams load_config(const std::filesystem::path& path) {
  return load_config_document(path).params;
}

}  // namespace hcdpr
