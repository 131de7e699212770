#include "hcdpr/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcdpr/errors.hpp"

namespace hcdpr {
namespace {

constexpr std::size_t kMaxLogLines = 20;

void log_line(StrategyBState& state, double t, const std::string& what) {
  if (state.log.size() >= kMaxLogLines) return;
  std::ostringstream out;
  out << "t=" << t << ": " << what;
  state.log.push_back(out.str());
}

// Clamped fallback used when the bounds admit no lambda3: centre of the
// conflicting interval pair, then per-cable clamping.
Vector6d saturated_tensions(const CableGeometryd& geo, const Vector3d& W, const RobotParams& p) {
  const Vector6d T_A = particular_solution(geo.structure_matrix, W);
  Vector6d T = T_A;
  try {
    Matrix63d N = null_basis(geo.structure_matrix);
    LambdaReduction r = lambda_reduction(T_A, N, geo, p, geo.lengths);
    if (r.D_A.sum() < 0.0) {
      N.col(2) = -N.col(2);
      r = lambda_reduction(T_A, N, geo, p, geo.lengths);
    }
    double lo = -1e300, hi = 1e300;
    for (const auto& iv : lambda_intervals(r, p)) {
      lo = std::max(lo, iv.lower);
      hi = std::min(hi, iv.upper);
    }
    T = r.tensions(0.5 * (lo + hi));
  } catch (const Error&) {
  }
  for (int i = 0; i < kNumCables; ++i) T[i] = std::clamp(T[i], p.T_min, p.T_max);
  return T;
}

}  // namespace

void validate(const GainSet& g) {
  if (!(g.K_p >= 0.0) || !std::isfinite(g.K_p)) throw ValidationError("K_p", "must be >= 0");
  if (!(g.K_i >= 0.0) || !std::isfinite(g.K_i)) throw ValidationError("K_i", "must be >= 0");
  if (!(g.K_d >= 0.0) || !std::isfinite(g.K_d)) throw ValidationError("K_d", "must be >= 0");
}

void ControllerState::reset() {
  integral.setZero();
  prev_error.setZero();
  prev_time = 0.0;
  started = false;
}

Eigen::VectorXd error_vector(ErrorKind kind, const Eigen::VectorXd& desired,
                             const Eigen::VectorXd& actual) {
  const Eigen::Index n = kind == ErrorKind::kJointSpace ? 5 : 2;
  if (desired.size() != n || actual.size() != n) {
    throw ContractViolation("error_vector: expected " + std::to_string(n) + " channels");
  }
  return desired - actual;
}

PidResult pid_step(const ControllerState& state, const Eigen::VectorXd& e, double t,
                   const GainSet& gains, const AntiWindup& limits) {
  const Eigen::Index n = e.size();
  PidResult r;
  r.state = state;
  r.saturated.assign(static_cast<std::size_t>(n), false);
  if (!state.started) {
    r.state.integral = Eigen::VectorXd::Zero(n);
    r.state.prev_error = Eigen::VectorXd::Zero(n);
  } else if (state.integral.size() != n || state.prev_error.size() != n) {
    throw ContractViolation("pid_step: error size changed between samples");
  }
  if ((limits.lower.size() != 0 || limits.upper.size() != 0) &&
      (limits.lower.size() != n || limits.upper.size() != n)) {
    throw ContractViolation("pid_step: limit size mismatch");
  }

  Eigen::VectorXd derivative = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd increment = Eigen::VectorXd::Zero(n);
  if (state.started) {
    if (!(t > state.prev_time)) throw ContractViolation("pid_step: sample times must increase");
    const double dt = t - state.prev_time;
    increment = 0.5 * (e + state.prev_error) * dt;
    derivative = (e - state.prev_error) / dt;
  }

  const Eigen::VectorXd base = gains.K_p * e + gains.K_d * derivative;
  Eigen::VectorXd integral = state.started ? state.integral : Eigen::VectorXd::Zero(n);
  const bool bounded = limits.lower.size() == n;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (ju < limits.freeze.size() && limits.freeze[ju]) continue;
    const double candidate = integral[j] + increment[j];
    if (bounded) {
      const double u = base[j] + gains.K_i * candidate;
      const double push = gains.K_i * increment[j];
      if ((u > limits.upper[j] && push > 0.0) || (u < limits.lower[j] && push < 0.0)) continue;
    }
    integral[j] = candidate;
  }

  r.output = base + gains.K_i * integral;
  if (bounded) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double clamped = std::clamp(r.output[j], limits.lower[j], limits.upper[j]);
      r.saturated[static_cast<std::size_t>(j)] = clamped != r.output[j];
      r.output[j] = clamped;
    }
  }
  r.state.integral = integral;
  r.state.prev_error = e;
  r.state.prev_time = t;
  r.state.started = true;
  return r;
}

StrategyAContext strategy_a_context(const Vector5d& q, const RobotParams& p, double T_lower) {
  const auto geo = cable_geometry<double>(q, p);
  const Matrix3x6d& A = geo.structure_matrix;
  const Vector3d W = static_wrench(q, p);
  // Unknowns: common tension of cables 1-2 and of cables 5-6.
  Eigen::Matrix<double, 3, 2> B;
  B.col(0) = A.col(0) + A.col(1);
  B.col(1) = A.col(4) + A.col(5);
  const Vector3d rhs = W - T_lower * (A.col(2) + A.col(3));
  const Vector2d upper = B.colPivHouseholderQr().solve(rhs);

  StrategyAContext ctx;
  ctx.T3 = T_lower;
  ctx.T4 = T_lower;
  ctx.L01_nominal = p.K_s * geo.lengths[0] / (p.K_s + upper[0]);
  ctx.L06_nominal = p.K_s * geo.lengths[5] / (p.K_s + upper[1]);
  return ctx;
}

ControlCommand strategy_a_controller(const Vector4d& desired, const GeneralizedStated& feedback,
                                     const StrategyAGains& gains, StrategyAState& state,
                                     const StrategyAContext& ctx, double t, const RobotParams& p) {
  const auto geo = cable_geometry<double>(feedback.q, p);
  const Vector2d L(geo.lengths[0], geo.lengths[5]);
  const Vector2d nominal(ctx.L01_nominal, ctx.L06_nominal);

  // Keep the commanded spring tension at the measured length inside the bounds.
  AntiWindup bounds;
  bounds.lower.resize(2);
  bounds.upper.resize(2);
  for (int j = 0; j < 2; ++j) {
    bounds.lower[j] = p.K_s * L[j] / (p.K_s + p.T_max) - nominal[j];
    bounds.upper[j] = p.K_s * L[j] / (p.K_s + p.T_min) - nominal[j];
  }
  const Eigen::VectorXd e_cables =
      error_vector(ErrorKind::kCableLengths, desired.head<2>(), Eigen::VectorXd(L));
  const PidResult cable = pid_step(state.cables, e_cables, t, gains.cables, bounds);

  const Eigen::VectorXd e_arm = error_vector(ErrorKind::kArmJoints, desired.tail<2>(),
                                             Eigen::VectorXd(feedback.q.tail<2>()));
  const PidResult arm = pid_step(state.arm, e_arm, t, gains.arm);

  state.cables = cable.state;
  state.arm = arm.state;

  ControlCommand cmd;
  cmd.u_m = cable.output;
  cmd.u_a = arm.output;
  cmd.tension_inputs.L01 = nominal[0] + cable.output[0];
  cmd.tension_inputs.L06 = nominal[1] + cable.output[1];
  cmd.tension_inputs.T3 = std::clamp(ctx.T3, p.T_min, p.T_max);
  cmd.tension_inputs.T4 = std::clamp(ctx.T4, p.T_min, p.T_max);
  cmd.saturated = cable.saturated[0] || cable.saturated[1];
  return cmd;
}

ControlCommand strategy_b_controller(const Vector5d& q_d, const GeneralizedStated& feedback,
                                     const GainSet& gains, StrategyBState& state, double t,
                                     const RobotParams& p) {
  const Eigen::VectorXd e =
      error_vector(ErrorKind::kJointSpace, Eigen::VectorXd(q_d), Eigen::VectorXd(feedback.q));
  const auto geo = cable_geometry<double>(feedback.q, p);
  const Vector3d gravity = static_wrench(feedback.q, p);

  PidResult pid = pid_step(state.pid, e, t, gains);
  Vector3d W = gravity + pid.output.head<3>();
  Vector6d T;
  bool saturated = false;
  try {
    T = optimize_tensions(geo, W, p, geo.lengths).T;
  } catch (const Error& err) {
    saturated = true;
    log_line(state, t, std::string("tension set infeasible, saturating: ") + err.what());
    AntiWindup hold;
    hold.freeze = {true, true, true, false, false};
    pid = pid_step(state.pid, e, t, gains, hold);
    W = gravity + pid.output.head<3>();
    T = saturated_tensions(geo, W, p);
  }
  state.pid = pid.state;

  ControlCommand cmd;
  cmd.u_m = pid.output.head<3>();
  cmd.u_a = pid.output.tail<2>();
  cmd.planned_T = T;
  cmd.tension_inputs.L01 = p.K_s * geo.lengths[0] / (p.K_s + T[0]);
  cmd.tension_inputs.L06 = p.K_s * geo.lengths[5] / (p.K_s + T[5]);
  cmd.tension_inputs.T3 = std::clamp(T[2], p.T_min, p.T_max);
  cmd.tension_inputs.T4 = std::clamp(T[3], p.T_min, p.T_max);
  cmd.saturated = saturated;
  return cmd;
}

}  // namespace hcdpr
