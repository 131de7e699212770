// Fixed-step closed-loop simulation and the builtin case studies.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcdpr/control.hpp"
#include "hcdpr/dynamics.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/types.hpp"

namespace hcdpr {

enum class Strategy { kA, kB };
enum class TensionPolicy { kConstant, kOptimized };

/// offset + rate * min(t, t_max), channel by channel.
struct Trajectory {
  Eigen::VectorXd offset;
  Eigen::VectorXd rate;
  double t_max = 3.0;

  Eigen::VectorXd sample(double t) const;
};

struct ScenarioSpec {
  std::string name;
  Strategy strategy = Strategy::kB;
  StrategyAGains gains_a;
  GainSet gains_b{5e5, 3.5e7, 1.1e4};
  /// Strategy A: (L1, L6, theta1, theta2). Strategy B: q.
  Trajectory trajectory;
  double duration = 3.0;
  double dt = 1e-4;
  /// Spacing of emitted records; rounded to a whole number of steps.
  double record_interval = 1e-4;
  GeneralizedStated initial;
  TensionPolicy tension_policy = TensionPolicy::kOptimized;
  /// Lower-cable tensions for the constant policy.
  double T3 = 40.0;
  double T4 = 40.0;
};

/// Throws ValidationError naming the offending field.
void validate(const ScenarioSpec& spec);

struct SimRecord {
  double t = 0.0;
  Vector5d q = Vector5d::Zero();
  Vector5d qdot = Vector5d::Zero();
  Vector5d qdd = Vector5d::Zero();
  Vector6d T = Vector6d::Zero();
  ControlCommand command;
  Eigen::VectorXd e;
  EndEffectorPosed pose;
  Energy<double> energy;
};

struct DivergenceInfo {
  double t = 0.0;
  int channel = -1;
  std::string message;
};

struct SimResult {
  std::vector<SimRecord> records;
  std::optional<DivergenceInfo> divergence;
  std::vector<std::string> log;
};

/// Accelerations and applied tensions for a state under a held command.
struct PlantEvaluation {
  Vector5d qdd;
  Vector6d T;
};

PlantEvaluation evaluate_plant(const GeneralizedStated& state, const ControlCommand& command,
                               const RobotParams& p, SlackModel slack = SlackModel::kUnilateral);

/// One classical RK4 step with the command held. Throws DivergenceError
/// (time t + dt, state channel 0-9) on a non-finite or runaway state.
GeneralizedStated integrate_step(const GeneralizedStated& state, const ControlCommand& command,
                                 const RobotParams& p, double dt,
                                 SlackModel slack = SlackModel::kUnilateral, double t = 0.0);

/// Closed-loop rollout. Divergence stops the run and keeps the records so far.
SimResult run_scenario(const ScenarioSpec& spec, const RobotParams& p);

std::map<std::string, ScenarioSpec> builtin_scenarios();

/// Builds a spec from a "scenario" config object. A "base" key starts from a
/// builtin case; other keys override it.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ScenarioSpec& spec);

// Run metrics.

/// Largest |e_j| over the run.
Eigen::VectorXd peak_abs_error(const std::vector<SimRecord>& records);

/// Earliest time after which every |e_j| stays within bands[j]; infinity if
/// the last record is still outside.
double settling_time(const std::vector<SimRecord>& records, const Eigen::VectorXd& bands);

/// Half peak-to-peak of e_j over the final quarter divided by that over the
/// whole run. NaN for channels whose whole-run amplitude is below 1e-6.
Eigen::VectorXd oscillation_ratios(const std::vector<SimRecord>& records);

inline constexpr double kSustainedOscillationRatio = 0.1;

struct ScenarioSummary {
  double settling_time = 0.0;
  Eigen::VectorXd peak_error;
  Vector6d final_T = Vector6d::Zero();
  double oscillation_ratio = 0.0;
  bool sustained = false;
};

/// Settling bands are 5% of each channel's peak error, at least 1e-4.
/// Oscillation is judged on the cable channels for strategy A and on all
/// channels for strategy B.
ScenarioSummary summarize(const SimResult& result, const ScenarioSpec& spec);

}  // namespace hcdpr
