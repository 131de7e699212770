// Discrete PID and the two closed-loop strategies: cable-length + arm-joint
// PID (strategy A) and joint-space PID with in-loop tension optimisation
// (strategy B).
#pragma once

#include <string>
#include <vector>

#include "hcdpr/dynamics.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/tension.hpp"
#include "hcdpr/types.hpp"

namespace hcdpr {

struct GainSet {
  double K_p = 0.0;
  double K_i = 0.0;
  double K_d = 0.0;

  bool operator==(const GainSet&) const = default;
};

void validate(const GainSet& gains);

struct ControllerState {
  Eigen::VectorXd integral;
  Eigen::VectorXd prev_error;
  double prev_time = 0.0;
  bool started = false;

  void reset();
};

/// Optional per-channel output limits and channels whose integral is held.
struct AntiWindup {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<bool> freeze;
};

struct PidResult {
  Eigen::VectorXd output;
  ControllerState state;
  std::vector<bool> saturated;
};

enum class ErrorKind { kCableLengths, kArmJoints, kJointSpace };

/// desired - actual; sizes must be 2, 2 and 5 respectively.
Eigen::VectorXd error_vector(ErrorKind kind, const Eigen::VectorXd& desired,
                             const Eigen::VectorXd& actual);

/// One PID sample: trapezoidal integral, backward-difference derivative,
/// zero derivative on the first call. Throws ContractViolation unless t is
/// strictly later than the previous sample.
PidResult pid_step(const ControllerState& state, const Eigen::VectorXd& e, double t,
                   const GainSet& gains, const AntiWindup& limits = {});

struct ControlCommand {
  /// Strategy A: (delta L01, delta L06). Strategy B: corrective wrench.
  Eigen::VectorXd u_m;
  Vector2d u_a = Vector2d::Zero();
  CableInputs tension_inputs;
  /// Strategy B's optimised tensions; zero for strategy A.
  Vector6d planned_T = Vector6d::Zero();
  bool saturated = false;
};

struct StrategyAGains {
  GainSet cables{2e2, 10.0, 0.0};
  GainSet arm{6e2, 20.0, 1e2};
};

struct StrategyAContext {
  double L01_nominal = 0.0;
  double L06_nominal = 0.0;
  double T3 = 0.0;
  double T4 = 0.0;
};

struct StrategyAState {
  ControllerState cables;
  ControllerState arm;
};

/// Nominal unstretched lengths holding the pose q with T3 = T4 = T_lower.
StrategyAContext strategy_a_context(const Vector5d& q, const RobotParams& p, double T_lower);

/// desired = (L1d, L6d, theta1d, theta2d).
ControlCommand strategy_a_controller(const Vector4d& desired, const GeneralizedStated& feedback,
                                     const StrategyAGains& gains, StrategyAState& state,
                                     const StrategyAContext& ctx, double t, const RobotParams& p);

struct StrategyBState {
  ControllerState pid;
  std::vector<std::string> log;
};

ControlCommand strategy_b_controller(const Vector5d& q_d, const GeneralizedStated& feedback,
                                     const GainSet& gains, StrategyBState& state, double t,
                                     const RobotParams& p);

}  // namespace hcdpr
