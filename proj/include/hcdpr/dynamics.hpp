// Coupled platform + arm dynamics: M(q) qdd + C(q, qd) qd + G(q) + J_e^T w = [A T; tau4; tau5].
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcdpr/errors.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/types.hpp"

namespace hcdpr {

template <typename Scalar>
struct DynamicTerms {
  Matrix5<Scalar> M = Matrix5<Scalar>::Zero();
  Matrix5<Scalar> C = Matrix5<Scalar>::Zero();
  Vector5<Scalar> G = Vector5<Scalar>::Zero();
  Vector5<Scalar> P_vs = Vector5<Scalar>::Zero();
};

template <typename Scalar>
struct Energy {
  Scalar kinetic{0};
  Scalar potential{0};
  Scalar total() const { return kinetic + potential; }
};

/// Planar force and moment; `combined()` is (F_x, F_z, M).
template <typename Scalar>
struct Wrench {
  Vector2<Scalar> F_e = Vector2<Scalar>::Zero();
  Scalar M_e{0};
  Vector3<Scalar> combined() const { return {F_e.x(), F_e.y(), M_e}; }
};

/// Plant inputs u = (L01, T3, T4, L06).
struct CableInputs {
  double L01 = 0.0;
  double T3 = 0.0;
  double T4 = 0.0;
  double L06 = 0.0;
};

enum class SlackModel { kBilateral, kUnilateral };

struct CableTensionState {
  Vector6d T = Vector6d::Zero();
  /// Unstretched lengths. Entries 2 and 3 mirror the current lengths of the
  /// force-controlled cables and carry no meaning.
  Vector6d L0 = Vector6d::Zero();
};

using DynamicTermsd = DynamicTerms<double>;
using Wrenchd = Wrench<double>;

template <typename Scalar>
DynamicTerms<Scalar> dynamic_terms(const GeneralizedState<Scalar>& state, const RobotParams& p,
                                   const EquivalentSprings& springs = {}) {
  using std::cos;
  using std::sin;
  const auto& q = state.q;
  const auto& qd = state.qdot;
  const Scalar m1 = Scalar(p.m_1), m2 = Scalar(p.m_2), mm = Scalar(p.m_m);
  const Scalar I1 = Scalar(p.I_1), I2 = Scalar(p.I_2), Im = Scalar(p.I_m);
  const Scalar lm = Scalar(p.l_m), l1 = Scalar(p.l_1), lc1 = Scalar(p.l_c1), lc2 = Scalar(p.l_c2);
  const Scalar g = Scalar(p.g);

  const Scalar a0 = q[kThetaM] + Scalar(std::numbers::pi / 2);
  const Scalar a1 = a0 + q[kTheta1];
  const Scalar a2 = a1 + q[kTheta2];
  const Scalar sa = sin(a0), ca = cos(a0), sb = sin(a1), cb = cos(a1), sc = sin(a2), cc = cos(a2);
  const Scalar s1 = sin(q[kTheta1]), c1 = cos(q[kTheta1]);
  const Scalar s2 = sin(q[kTheta2]), c2 = cos(q[kTheta2]);
  const Scalar s12 = sin(q[kTheta1] + q[kTheta2]), c12 = cos(q[kTheta1] + q[kTheta2]);

  // Recurring groups.
  const Scalar mt = m1 + m2 + mm;
  const Scalar hm = (m1 + m2) * lm;  // platform-offset moment
  const Scalar h1 = m2 * l1 + m1 * lc1;
  const Scalar h2 = m2 * lc2;

  DynamicTerms<Scalar> d;
  auto& M = d.M;
  M(0, 0) = mt;
  M(1, 1) = mt;
  M(0, 2) = -(hm * sa + h1 * sb + h2 * sc);
  M(0, 3) = -(h1 * sb + h2 * sc);
  M(0, 4) = -h2 * sc;
  M(1, 2) = hm * ca + h1 * cb + h2 * cc;
  M(1, 3) = h1 * cb + h2 * cc;
  M(1, 4) = h2 * cc;
  M(2, 2) = I1 + I2 + Im + l1 * l1 * m2 + lc1 * lc1 * m1 + lc2 * lc2 * m2 + lm * lm * (m1 + m2) +
            Scalar(2) * lc2 * lm * m2 * c12 + Scalar(2) * l1 * lc2 * m2 * c2 +
            Scalar(2) * lm * h1 * c1;
  M(2, 3) = m2 * l1 * l1 + Scalar(2) * m2 * c2 * l1 * lc2 + lm * h1 * c1 + m1 * lc1 * lc1 +
            m2 * lc2 * lc2 + lm * m2 * c12 * lc2 + I1 + I2;
  M(2, 4) = I2 + lc2 * lc2 * m2 + lc2 * lm * m2 * c12 + l1 * lc2 * m2 * c2;
  M(3, 3) = m2 * l1 * l1 + Scalar(2) * m2 * c2 * l1 * lc2 + m1 * lc1 * lc1 + m2 * lc2 * lc2 + I1 + I2;
  M(3, 4) = m2 * lc2 * lc2 + l1 * m2 * c2 * lc2 + I2;
  M(4, 4) = lc2 * lc2 * m2 + I2;
  M.template triangularView<Eigen::StrictlyLower>() = M.transpose();

  const Scalar wm = qd[kThetaM], w1 = qd[kTheta1], w2 = qd[kTheta2];
  const Scalar k01 = Scalar(2) * wm + w1;
  const Scalar k012 = Scalar(2) * wm + Scalar(2) * w1 + w2;
  auto& C = d.C;
  C(0, 2) = -wm * (hm * ca + h1 * cb + h2 * cc);
  C(0, 3) = -k01 * (h2 * cc + h1 * cb);
  C(0, 4) = -h2 * cc * k012;
  C(1, 2) = -wm * (hm * sa + h1 * sb + h2 * sc);
  C(1, 3) = -k01 * (h2 * sc + h1 * sb);
  C(1, 4) = -h2 * sc * k012;
  const Scalar r1 = h1 * s1 + h2 * s12;
  const Scalar r2 = h2 * (lm * s12 + l1 * s2);
  C(2, 3) = -lm * k01 * r1;
  C(2, 4) = -r2 * k012;
  C(3, 2) = lm * wm * r1;
  C(3, 4) = -l1 * h2 * s2 * k012;
  C(4, 2) = wm * r2;
  C(4, 3) = l1 * h2 * s2 * k01;

  d.G << Scalar(0), mt * g, g * (hm * ca + h1 * cb + h2 * cc), g * (h1 * cb + h2 * cc), g * h2 * cc;

  d.P_vs << Scalar(springs.k_x) * (q[kXm] - Scalar(springs.x_m0)),
            Scalar(springs.k_z) * (q[kZm] - Scalar(springs.z_m0)),
            Scalar(springs.k_theta) * (q[kThetaM] - Scalar(springs.theta_m0)), Scalar(0), Scalar(0);
  return d;
}

/// Forces of the three-spring stand-in, (tau_x, tau_z, tau_theta).
template <typename Scalar>
Vector3<Scalar> equivalent_spring_torques(const Vector5<Scalar>& q, const EquivalentSprings& s) {
  return {Scalar(s.k_x) * (q[kXm] - Scalar(s.x_m0)), Scalar(s.k_z) * (q[kZm] - Scalar(s.z_m0)),
          Scalar(s.k_theta) * (q[kThetaM] - Scalar(s.theta_m0))};
}

/// Kinetic and gravity + equivalent-spring potential energy.
template <typename Scalar>
Energy<Scalar> energy(const GeneralizedState<Scalar>& state, const RobotParams& p,
                      const EquivalentSprings& springs = {}) {
  const auto fk = forward_kinematics<Scalar>(state.q, state.qdot, p);
  const auto& q = state.q;
  const auto& qd = state.qdot;
  const Scalar half = Scalar(0.5);
  const Scalar w1 = qd[kThetaM] + qd[kTheta1];
  const Scalar w2 = w1 + qd[kTheta2];
  Energy<Scalar> e;
  e.kinetic = half * Scalar(p.m_m) * (qd[kXm] * qd[kXm] + qd[kZm] * qd[kZm]) +
              half * Scalar(p.I_m) * qd[kThetaM] * qd[kThetaM] +
              half * Scalar(p.m_1) * fk.links.vc1 * fk.links.vc1 + half * Scalar(p.I_1) * w1 * w1 +
              half * Scalar(p.m_2) * fk.links.vc2 * fk.links.vc2 + half * Scalar(p.I_2) * w2 * w2;
  const Vector3<Scalar> dev(q[kXm] - Scalar(springs.x_m0), q[kZm] - Scalar(springs.z_m0),
                            q[kThetaM] - Scalar(springs.theta_m0));
  e.potential = Scalar(p.g) * (Scalar(p.m_m) * q[kZm] + Scalar(p.m_1) * fk.links.pc1.y() +
                               Scalar(p.m_2) * fk.links.pc2.y()) +
                half * (Scalar(springs.k_x) * dev[0] * dev[0] + Scalar(springs.k_z) * dev[1] * dev[1] +
                        Scalar(springs.k_theta) * dev[2] * dev[2]);
  return e;
}

/// T_i = K_s / L0_i * (L_i - L0_i) for the length-controlled cables; T3, T4
/// pass through. kUnilateral clamps the spring cables at zero.
inline CableTensionState cable_tensions(const CableGeometryd& geo, const CableInputs& u,
                                        const RobotParams& p,
                                        SlackModel slack = SlackModel::kBilateral) {
  CableTensionState s;
  s.L0 << u.L01, u.L01, geo.lengths[2], geo.lengths[3], u.L06, u.L06;
  for (int i : {0, 1, 4, 5}) {
    double t = p.K_s / s.L0[i] * (geo.lengths[i] - s.L0[i]);
    if (slack == SlackModel::kUnilateral) t = std::max(t, 0.0);
    s.T[i] = t;
  }
  s.T[2] = u.T3;
  s.T[3] = u.T4;
  return s;
}

/// Elastic energy stored by spring cables with fixed rest lengths plus the
/// work potential T*L of the constant-force cables.
inline double cable_potential(const CableGeometryd& geo, const CableTensionState& tensions,
                              const RobotParams& p, SlackModel slack = SlackModel::kBilateral) {
  double v = 0.0;
  for (int i : {0, 1, 4, 5}) {
    double stretch = geo.lengths[i] - tensions.L0[i];
    if (slack == SlackModel::kUnilateral) stretch = std::max(stretch, 0.0);
    v += 0.5 * p.K_s / tensions.L0[i] * stretch * stretch;
  }
  v += tensions.T[2] * geo.lengths[2] + tensions.T[3] * geo.lengths[3];
  return v;
}

/// Generalized forces M qdd + C qd + G that realise the given acceleration.
template <typename Scalar>
Vector5<Scalar> inverse_dynamics(const GeneralizedState<Scalar>& state, const Vector5<Scalar>& qdd,
                                 const RobotParams& p) {
  const auto d = dynamic_terms(state, p);
  return d.M * qdd + d.C * state.qdot + d.G;
}

/// Solves the dynamics for qdd given the structure matrix at the current pose.
/// Throws SingularInertiaError if the inertia factorisation fails.
template <typename Scalar>
Vector5<Scalar> forward_dynamics(const GeneralizedState<Scalar>& state,
                                 const Matrix3x6<Scalar>& A, const Vector6<Scalar>& T,
                                 const Vector2<Scalar>& arm_torques, const Wrench<Scalar>& external,
                                 const RobotParams& p) {
  const auto d = dynamic_terms(state, p);
  Vector5<Scalar> rhs;
  rhs.template head<3>() = A * T;
  rhs.template tail<2>() = arm_torques;
  rhs -= d.C * state.qdot + d.G;
  if (external.F_e.squaredNorm() != Scalar(0) || external.M_e != Scalar(0)) {
    rhs -= jacobian<Scalar>(state.q, p).transpose() * external.combined();
  }
  Eigen::LLT<Matrix5<Scalar>> llt(d.M);
  if (llt.info() != Eigen::Success) throw SingularInertiaError("inertia matrix is not positive definite");
  Vector5<Scalar> qdd = llt.solve(rhs);
  if (!qdd.allFinite()) throw SingularInertiaError("inertia solve produced non-finite accelerations");
  return qdd;
}

template <typename Scalar>
Vector5<Scalar> forward_dynamics(const GeneralizedState<Scalar>& state, const Vector6<Scalar>& T,
                                 const Vector2<Scalar>& arm_torques, const Wrench<Scalar>& external,
                                 const RobotParams& p) {
  const auto geo = cable_geometry<Scalar>(state.q, p);
  return forward_dynamics<Scalar>(state, geo.structure_matrix, T, arm_torques, external, p);
}

}  // namespace hcdpr
