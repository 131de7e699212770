#include "hcdpr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcdpr/errors.hpp"

namespace hcdpr {
namespace {

constexpr double kDivergenceLimit = 1e6;

struct Derivative {
  Vector5d dq;
  Vector5d dqdot;
};

Derivative derivative(const GeneralizedStated& s, const ControlCommand& cmd, const RobotParams& p,
                      SlackModel slack) {
  return {s.qdot, evaluate_plant(s, cmd, p, slack).qdd};
}

GeneralizedStated advance(const GeneralizedStated& s, const Derivative& d, double h) {
  GeneralizedStated out;
  out.q = s.q + h * d.dq;
  out.qdot = s.qdot + h * d.dqdot;
  return out;
}

Eigen::VectorXd to_vector(const nlohmann::json& doc, const std::string& field) {
  if (!doc.is_array()) throw ConfigError("'" + field + "' must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) throw ConfigError("'" + field + "' must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  }
  return v;
}

nlohmann::json from_vector(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

GainSet gains_from_json(const nlohmann::json& doc, GainSet g, const std::string& field) {
  if (!doc.is_object()) throw ConfigError("'" + field + "' must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number()) throw ConfigError("'" + field + "." + key + "' must be a number");
    if (key == "K_p") g.K_p = value.get<double>();
    else if (key == "K_i") g.K_i = value.get<double>();
    else if (key == "K_d") g.K_d = value.get<double>();
    else throw ConfigError("unknown gain field '" + field + "." + key + "'");
  }
  return g;
}

nlohmann::json gains_to_json(const GainSet& g) {
  return {{"K_p", g.K_p}, {"K_i", g.K_i}, {"K_d", g.K_d}};
}

ScenarioSpec make_a(const std::string& name, Vector4d offset, Vector4d rate) {
  ScenarioSpec s;
  s.name = name;
  s.strategy = Strategy::kA;
  s.tension_policy = TensionPolicy::kConstant;
  s.dt = 1e-4;
  s.trajectory.offset = offset;
  s.trajectory.rate = rate;
  return s;
}

ScenarioSpec make_b(const std::string& name, Vector5d offset, Vector5d rate) {
  ScenarioSpec s;
  s.name = name;
  s.strategy = Strategy::kB;
  s.tension_policy = TensionPolicy::kOptimized;
  // The arm channels with K_d = 1.1e4 need a step well under 1e-4 s.
  s.dt = 1e-5;
  s.trajectory.offset = offset;
  s.trajectory.rate = rate;
  return s;
}

}  // namespace

Eigen::VectorXd Trajectory::sample(double t) const {
  const double tc = std::clamp(t, 0.0, t_max);
  return offset + rate * tc;
}

void validate(const ScenarioSpec& s) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw ValidationError("dt", "must be > 0");
  if (!(s.duration >= s.dt)) throw ValidationError("duration", "must be >= dt");
  if (!(s.record_interval > 0.0)) throw ValidationError("record_interval", "must be > 0");
  if (!(s.trajectory.t_max >= 0.0)) throw ValidationError("t_max", "must be >= 0");
  const Eigen::Index n = s.strategy == Strategy::kA ? 4 : 5;
  if (s.trajectory.offset.size() != n || s.trajectory.rate.size() != n) {
    throw ValidationError("trajectory", "needs " + std::to_string(n) + " channels");
  }
  if (!s.initial.q.allFinite() || !s.initial.qdot.allFinite()) {
    throw ValidationError("initial", "must be finite");
  }
  validate(s.gains_a.cables);
  validate(s.gains_a.arm);
  validate(s.gains_b);
}

PlantEvaluation evaluate_plant(const GeneralizedStated& state, const ControlCommand& command,
                               const RobotParams& p, SlackModel slack) {
  const auto geo = cable_geometry<double>(state.q, p);
  const auto tensions = cable_tensions(geo, command.tension_inputs, p, slack);
  PlantEvaluation out;
  out.T = tensions.T;
  out.qdd = forward_dynamics<double>(state, geo.structure_matrix, tensions.T, command.u_a,
                                     Wrenchd{}, p);
  return out;
}

GeneralizedStated integrate_step(const GeneralizedStated& s, const ControlCommand& cmd,
                                 const RobotParams& p, double dt, SlackModel slack, double t) {
  if (!(dt > 0.0)) throw ContractViolation("integrate_step: dt must be > 0");
  const Derivative k1 = derivative(s, cmd, p, slack);
  const Derivative k2 = derivative(advance(s, k1, 0.5 * dt), cmd, p, slack);
  const Derivative k3 = derivative(advance(s, k2, 0.5 * dt), cmd, p, slack);
  const Derivative k4 = derivative(advance(s, k3, dt), cmd, p, slack);
  GeneralizedStated out;
  out.q = s.q + dt / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  out.qdot = s.qdot + dt / 6.0 * (k1.dqdot + 2.0 * k2.dqdot + 2.0 * k3.dqdot + k4.dqdot);
  for (int i = 0; i < 10; ++i) {
    const double v = i < 5 ? out.q[i] : out.qdot[i - 5];
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) {
      throw DivergenceError("state diverged in channel " + std::to_string(i), t + dt, i);
    }
  }
  return out;
}

SimResult run_scenario(const ScenarioSpec& spec, const RobotParams& p) {
  validate(spec);
  SimResult result;
  const long long steps = std::llround(spec.duration / spec.dt);
  const long long stride = std::max(1LL, std::llround(spec.record_interval / spec.dt));
  result.records.reserve(static_cast<std::size_t>(steps / stride + 2));

  StrategyAState a_state;
  StrategyBState b_state;
  StrategyAContext a_ctx;
  if (spec.strategy == Strategy::kA) {
    a_ctx = strategy_a_context(spec.initial.q, p, spec.T3);
    a_ctx.T4 = spec.T4;
  }

  GeneralizedStated state = spec.initial;
  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    try {
      const Eigen::VectorXd desired = spec.trajectory.sample(t);
      ControlCommand cmd;
      Eigen::VectorXd e;
      if (spec.strategy == Strategy::kA) {
        const Vector4d d = desired;
        cmd = strategy_a_controller(d, state, spec.gains_a, a_state, a_ctx, t, p);
        const auto geo = cable_geometry<double>(state.q, p);
        e.resize(4);
        e << d[0] - geo.lengths[0], d[1] - geo.lengths[5], d[2] - state.q[kTheta1],
            d[3] - state.q[kTheta2];
      } else {
        const Vector5d d = desired;
        cmd = strategy_b_controller(d, state, spec.gains_b, b_state, t, p);
        e = d - state.q;
      }

      if (k % stride == 0 || k == steps) {
        SimRecord rec;
        rec.t = t;
        rec.q = state.q;
        rec.qdot = state.qdot;
        const PlantEvaluation plant = evaluate_plant(state, cmd, p);
        rec.qdd = plant.qdd;
        rec.T = plant.T;
        rec.command = cmd;
        rec.e = e;
        rec.pose = forward_kinematics<double>(state.q, p).pose;
        rec.energy = energy(state, p);
        result.records.push_back(std::move(rec));
      }
      if (k == steps) break;
      state = integrate_step(state, cmd, p, spec.dt, SlackModel::kUnilateral, t);
    } catch (const DivergenceError& err) {
      result.divergence = DivergenceInfo{err.time(), err.channel(), err.what()};
      break;
    } catch (const DegenerateGeometryError& err) {
      result.divergence = DivergenceInfo{t, -1, err.what()};
      break;
    } catch (const SingularInertiaError& err) {
      result.divergence = DivergenceInfo{t, -1, err.what()};
      break;
    }
  }
  result.log = b_state.log;
  return result;
}

std::map<std::string, ScenarioSpec> builtin_scenarios() {
  std::map<std::string, ScenarioSpec> m;
  m["case1"] = make_a("case1", Vector4d(1.35, 1.35, 0, 0), Vector4d::Zero());
  m["case3a"] = make_a("case3a", Vector4d(1.35, 1.35, 0, 0), Vector4d(0, 0, 0.1, 0.1));
  m["case3b"] = make_a("case3b", Vector4d(1.35, 1.35, 0, 0), Vector4d(-0.01, 0.01, 0, 0));
  Vector5d step;
  step << 2e-3, 4e-3, 0, 0, 0;
  m["case2"] = make_b("case2", step, Vector5d::Zero());
  Vector5d arm_rate;
  arm_rate << 0, 0, 0, 1.0, -1.0;
  m["case4a"] = make_b("case4a", Vector5d::Zero(), arm_rate);
  Vector5d platform_rate;
  platform_rate << -0.1, -0.05, 0, 0, 0;
  m["case4b"] = make_b("case4b", Vector5d::Zero(), platform_rate);
  return m;
}

ScenarioSpec scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("'scenario' must be a JSON object");
  ScenarioSpec s;
  const auto builtins = builtin_scenarios();
  if (doc.contains("base")) {
    const auto& base = doc.at("base");
    if (!base.is_string()) throw ConfigError("'base' must be a scenario name");
    const auto it = builtins.find(base.get<std::string>());
    if (it == builtins.end()) throw ConfigError("unknown base scenario '" + base.get<std::string>() + "'");
    s = it->second;
  }
  auto number = [&](const std::string& key) {
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "base") continue;
    if (key == "name") {
      if (!value.is_string()) throw ConfigError("'name' must be a string");
      s.name = value.get<std::string>();
    } else if (key == "strategy") {
      const std::string v = value.is_string() ? value.get<std::string>() : "";
      if (v == "A") {
        s.strategy = Strategy::kA;
        s.tension_policy = TensionPolicy::kConstant;
      } else if (v == "B") {
        s.strategy = Strategy::kB;
        s.tension_policy = TensionPolicy::kOptimized;
      } else {
        throw ConfigError("'strategy' must be \"A\" or \"B\"");
      }
    } else if (key == "duration") {
      s.duration = number(key);
    } else if (key == "dt") {
      s.dt = number(key);
    } else if (key == "record_interval") {
      s.record_interval = number(key);
    } else if (key == "t_max") {
      s.trajectory.t_max = number(key);
    } else if (key == "T3") {
      s.T3 = number(key);
    } else if (key == "T4") {
      s.T4 = number(key);
    } else if (key == "offset") {
      s.trajectory.offset = to_vector(value, key);
    } else if (key == "rate") {
      s.trajectory.rate = to_vector(value, key);
    } else if (key == "initial_q" || key == "initial_qdot") {
      const Eigen::VectorXd v = to_vector(value, key);
      if (v.size() != 5) throw ConfigError("'" + key + "' needs 5 entries");
      (key == "initial_q" ? s.initial.q : s.initial.qdot) = v;
    } else if (key == "gains") {
      s.gains_b = gains_from_json(value, s.gains_b, key);
    } else if (key == "gains_cables") {
      s.gains_a.cables = gains_from_json(value, s.gains_a.cables, key);
    } else if (key == "gains_arm") {
      s.gains_a.arm = gains_from_json(value, s.gains_a.arm, key);
    } else {
      throw ConfigError("unknown scenario field '" + key + "'");
    }
  }
  if (s.name.empty()) s.name = "custom";
  validate(s);
  return s;
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json doc;
  doc["name"] = s.name;
  doc["strategy"] = s.strategy == Strategy::kA ? "A" : "B";
  doc["duration"] = s.duration;
  doc["dt"] = s.dt;
  doc["record_interval"] = s.record_interval;
  doc["t_max"] = s.trajectory.t_max;
  doc["offset"] = from_vector(s.trajectory.offset);
  doc["rate"] = from_vector(s.trajectory.rate);
  doc["initial_q"] = from_vector(s.initial.q);
  doc["initial_qdot"] = from_vector(s.initial.qdot);
  if (s.strategy == Strategy::kA) {
    doc["gains_cables"] = gains_to_json(s.gains_a.cables);
    doc["gains_arm"] = gains_to_json(s.gains_a.arm);
    doc["T3"] = s.T3;
    doc["T4"] = s.T4;
  } else {
    doc["gains"] = gains_to_json(s.gains_b);
  }
  return doc;
}

Eigen::VectorXd peak_abs_error(const std::vector<SimRecord>& records) {
  if (records.empty()) return {};
  Eigen::VectorXd peak = Eigen::VectorXd::Zero(records.front().e.size());
  for (const auto& r : records) peak = peak.cwiseMax(r.e.cwiseAbs());
  return peak;
}

double settling_time(const std::vector<SimRecord>& records, const Eigen::VectorXd& bands) {
  if (records.empty()) return std::numeric_limits<double>::infinity();
  double settled = records.front().t;
  for (const auto& r : records) {
    if ((r.e.cwiseAbs().array() > bands.array()).any()) {
      settled = std::numeric_limits<double>::infinity();
    } else if (std::isinf(settled)) {
      settled = r.t;
    }
  }
  return settled;
}

Eigen::VectorXd oscillation_ratios(const std::vector<SimRecord>& records) {
  if (records.empty()) return {};
  const Eigen::Index n = records.front().e.size();
  const double t0 = records.front().t, t1 = records.back().t;
  const double tail_start = t1 - 0.25 * (t1 - t0);
  Eigen::VectorXd lo_all = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi_all = -lo_all, lo_tail = lo_all, hi_tail = -lo_all;
  for (const auto& r : records) {
    lo_all = lo_all.cwiseMin(r.e);
    hi_all = hi_all.cwiseMax(r.e);
    if (r.t >= tail_start) {
      lo_tail = lo_tail.cwiseMin(r.e);
      hi_tail = hi_tail.cwiseMax(r.e);
    }
  }
  Eigen::VectorXd ratio(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double whole = 0.5 * (hi_all[j] - lo_all[j]);
    ratio[j] = whole < 1e-6 ? std::numeric_limits<double>::quiet_NaN()
                            : 0.5 * (hi_tail[j] - lo_tail[j]) / whole;
  }
  return ratio;
}

ScenarioSummary summarize(const SimResult& result, const ScenarioSpec& spec) {
  ScenarioSummary s;
  if (result.records.empty()) return s;
  s.peak_error = peak_abs_error(result.records);
  const Eigen::VectorXd bands = (0.05 * s.peak_error).cwiseMax(1e-4);
  s.settling_time = settling_time(result.records, bands);
  s.final_T = result.records.back().T;
  const Eigen::VectorXd ratios = oscillation_ratios(result.records);
  const Eigen::Index channels = spec.strategy == Strategy::kA ? 2 : ratios.size();
  s.oscillation_ratio = 0.0;
  for (Eigen::Index j = 0; j < channels; ++j) {
    if (!std::isnan(ratios[j])) s.oscillation_ratio = std::max(s.oscillation_ratio, ratios[j]);
  }
  s.sustained = s.oscillation_ratio >= kSustainedOscillationRatio;
  return s;
}

}  // namespace hcdpr
