// Forward/inverse kinematics, cable geometry and the end-effector Jacobian.
//
// Frame: X to the right, Z up, the robot lives in the XZ plane. The platform
// angle theta_m is measured from X toward Z, the same sense as the arm joints.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <numbers>

#include "hcdpr/errors.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/types.hpp"

namespace hcdpr {

template <typename Scalar>
struct GeneralizedState {
  Vector5<Scalar> q = Vector5<Scalar>::Zero();
  Vector5<Scalar> qdot = Vector5<Scalar>::Zero();
};

template <typename Scalar>
struct EndEffectorPose {
  Scalar x_e{0};
  Scalar z_e{0};
  Scalar q_e{0};
};

template <typename Scalar>
struct LinkKinematics {
  Vector2<Scalar> p1 = Vector2<Scalar>::Zero();
  Vector2<Scalar> pc1 = Vector2<Scalar>::Zero();
  Vector2<Scalar> p2 = Vector2<Scalar>::Zero();
  Vector2<Scalar> pc2 = Vector2<Scalar>::Zero();
  Vector2<Scalar> vel_c1 = Vector2<Scalar>::Zero();
  Vector2<Scalar> vel_c2 = Vector2<Scalar>::Zero();
  Scalar vc1{0};
  Scalar vc2{0};
};

template <typename Scalar>
struct ForwardKinematics {
  EndEffectorPose<Scalar> pose;
  LinkKinematics<Scalar> links;
};

/// Per-cable geometry, one column per cable. Vectors are embedded in 3-D as
/// (x, 0, z).
template <typename Scalar>
struct CableGeometry {
  Matrix3x6<Scalar> anchors_frame;
  Matrix3x6<Scalar> anchors_platform;
  Matrix3x6<Scalar> cable_vectors;
  Vector6<Scalar> lengths;
  Matrix3x6<Scalar> unit_vectors;
  Matrix3x6<Scalar> moment_arms;
  /// Rows: F_x, F_z, moment about the platform centre.
  Matrix3x6<Scalar> structure_matrix;
};

enum class PlatformBranch { kLower, kUpper };
enum class ElbowBranch { kPlus, kMinus };

using GeneralizedStated = GeneralizedState<double>;
using EndEffectorPosed = EndEffectorPose<double>;
using CableGeometryd = CableGeometry<double>;

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar a) {
  using std::fmod;
  const Scalar two_pi = Scalar(2.0 * std::numbers::pi);
  a = fmod(a, two_pi);
  if (a <= -Scalar(std::numbers::pi)) a += two_pi;
  if (a > Scalar(std::numbers::pi)) a -= two_pi;
  return a;
}

/// Platform rotation in the XZ plane, turning X toward Z for positive angle.
template <typename Scalar>
Matrix3<Scalar> platform_rotation(Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar c = cos(theta);
  const Scalar s = sin(theta);
  Matrix3<Scalar> r;
  r << c, Scalar(0), -s,
       Scalar(0), Scalar(1), Scalar(0),
       s, Scalar(0), c;
  return r;
}

/// Cable exit points on the static frame, one column per cable.
template <typename Scalar = double>
Matrix3x6<Scalar> frame_anchors(const RobotParams& p) {
  const Scalar e = Scalar(p.l_e / 2), f = Scalar(p.l_f / 2);
  const Scalar g = Scalar(p.l_g), h = Scalar(p.l_h), z0 = Scalar(0);
  Matrix3x6<Scalar> a;
  a << e - g, e,     e,  -e,  -e,     -e + g,
       z0,    z0,    z0, z0,  z0,     z0,
       f,     f - h, -f, -f,  f - h,  f;
  return a;
}

/// Cable attachment points in the platform frame, relative to its centre.
template <typename Scalar = double>
Matrix3x6<Scalar> platform_anchor_offsets(const RobotParams& p) {
  const Scalar a = Scalar(p.l_a / 2), b = Scalar(p.l_b / 2), d = Scalar(p.l_d / 2);
  const Scalar m = Scalar(p.l_m), mc = Scalar(p.l_m - p.l_c), mbd = Scalar(p.l_m - p.l_bd);
  const Scalar z0 = Scalar(0);
  Matrix3x6<Scalar> o;
  o << b,  a,  d,   -d,  -a, -b,
       z0, z0, z0,  z0,  z0, z0,
       m,  mc, mbd, mbd, mc, m;
  return o;
}

/// Throws DegenerateGeometryError when a cable has (near) zero length.
template <typename Scalar>
CableGeometry<Scalar> cable_geometry(const Vector5<Scalar>& q, const RobotParams& p,
                                     const Matrix3x6<Scalar>& anchors_frame) {
  using std::abs;
  CableGeometry<Scalar> geo;
  const Vector3<Scalar> pm(q[kXm], Scalar(0), q[kZm]);
  geo.anchors_frame = anchors_frame;
  geo.moment_arms = platform_rotation(q[kThetaM]) * platform_anchor_offsets<Scalar>(p);
  geo.anchors_platform = geo.moment_arms.colwise() + pm;
  geo.cable_vectors = geo.anchors_frame - geo.anchors_platform;
  for (int i = 0; i < kNumCables; ++i) {
    const Scalar len = geo.cable_vectors.col(i).norm();
    if (!(len >= Scalar(1e-12))) {
      throw DegenerateGeometryError("cable " + std::to_string(i + 1) + " has zero length");
    }
    geo.lengths[i] = len;
    geo.unit_vectors.col(i) = geo.cable_vectors.col(i) / len;
    const auto& r = geo.moment_arms.col(i);
    const auto& u = geo.unit_vectors.col(i);
    geo.structure_matrix(0, i) = u.x();
    geo.structure_matrix(1, i) = u.z();
    geo.structure_matrix(2, i) = r.x() * u.z() - r.z() * u.x();
  }
  return geo;
}

template <typename Scalar>
CableGeometry<Scalar> cable_geometry(const Vector5<Scalar>& q, const RobotParams& p) {
  return cable_geometry<Scalar>(q, p, frame_anchors<Scalar>(p));
}

template <typename Scalar>
ForwardKinematics<Scalar> forward_kinematics(const Vector5<Scalar>& q,
                                             const Vector5<Scalar>& qdot,
                                             const RobotParams& p) {
  using std::cos;
  using std::sin;
  const Scalar lm = Scalar(p.l_m), l1 = Scalar(p.l_1), l2 = Scalar(p.l_2);
  const Scalar lc1 = Scalar(p.l_c1), lc2 = Scalar(p.l_c2);

  const Scalar a0 = q[kThetaM] + Scalar(std::numbers::pi / 2);
  const Scalar a1 = a0 + q[kTheta1];
  const Scalar a2 = a1 + q[kTheta2];
  const Vector2<Scalar> d0(cos(a0), sin(a0));
  const Vector2<Scalar> d1(cos(a1), sin(a1));
  const Vector2<Scalar> d2(cos(a2), sin(a2));

  ForwardKinematics<Scalar> fk;
  auto& ln = fk.links;
  ln.p1 = Vector2<Scalar>(q[kXm], q[kZm]) + lm * d0;
  ln.pc1 = ln.p1 + lc1 * d1;
  ln.p2 = ln.p1 + l1 * d1;
  ln.pc2 = ln.p2 + lc2 * d2;
  const Vector2<Scalar> pe = ln.p2 + l2 * d2;
  fk.pose = {pe.x(), pe.y(), a2};

  // Perpendiculars give the velocity of a point rotating with each link.
  const Vector2<Scalar> n0(-d0.y(), d0.x()), n1(-d1.y(), d1.x()), n2(-d2.y(), d2.x());
  const Scalar w0 = qdot[kThetaM];
  const Scalar w1 = w0 + qdot[kTheta1];
  const Scalar w2 = w1 + qdot[kTheta2];
  const Vector2<Scalar> vm(qdot[kXm], qdot[kZm]);
  ln.vel_c1 = vm + lm * w0 * n0 + lc1 * w1 * n1;
  ln.vel_c2 = vm + lm * w0 * n0 + l1 * w1 * n1 + lc2 * w2 * n2;
  ln.vc1 = ln.vel_c1.norm();
  ln.vc2 = ln.vel_c2.norm();
  return fk;
}

template <typename Scalar>
ForwardKinematics<Scalar> forward_kinematics(const Vector5<Scalar>& q, const RobotParams& p) {
  return forward_kinematics<Scalar>(q, Vector5<Scalar>::Zero(), p);
}

/// d(x_e, z_e, q_e)/dq.
template <typename Scalar>
Matrix3x5<Scalar> jacobian(const Vector5<Scalar>& q, const RobotParams& p) {
  using std::cos;
  using std::sin;
  const Scalar lm = Scalar(p.l_m), l1 = Scalar(p.l_1), l2 = Scalar(p.l_2);
  const Scalar a0 = q[kThetaM] + Scalar(std::numbers::pi / 2);
  const Scalar a1 = a0 + q[kTheta1];
  const Scalar a2 = a1 + q[kTheta2];
  const Scalar s2 = l2 * sin(a2), c2 = l2 * cos(a2);
  const Scalar s12 = l1 * sin(a1) + s2, c12 = l1 * cos(a1) + c2;
  const Scalar o = Scalar(0), i = Scalar(1);
  Matrix3x5<Scalar> j;
  j << i, o, -lm * sin(a0) - s12, -s12, -s2,
       o, i,  lm * cos(a0) + c12,  c12,  c2,
       o, o,  i,                   i,    i;
  return j;
}

/// Platform pose from the two outer upper cable lengths, assuming the
/// kinematic constraints (L1 = L2, L5 = L6, theta_m = 0).
template <typename Scalar>
Vector3<Scalar> inverse_platform(Scalar L1, Scalar L6, const RobotParams& p,
                                 PlatformBranch branch = PlatformBranch::kLower) {
  using std::sqrt;
  // Both cables reduce to one point at distance L1 / L6 from two virtual
  // anchors a baseline `base` apart.
  const Scalar base = Scalar(p.l_e - 2.0 * p.l_g - p.l_b);
  if (!(base > Scalar(0))) throw WorkspaceError("frame anchors do not span the platform");
  const Scalar x = (L1 * L1 - L6 * L6) / (Scalar(-2) * base);
  const Scalar dx = base / Scalar(2) - x;
  const Scalar radicand = L1 * L1 - dx * dx;
  if (!(radicand >= Scalar(0))) {
    throw WorkspaceError("cable lengths violate the triangle inequality");
  }
  const Scalar height = sqrt(radicand);
  const Scalar z0 = Scalar(p.l_f / 2 - p.l_m);
  const Scalar z = branch == PlatformBranch::kLower ? z0 - height : z0 + height;
  return {x, z, Scalar(0)};
}

/// Arm joint angles reaching (x_e, z_e) from the given platform pose.
template <typename Scalar>
Vector2<Scalar> inverse_arm(Scalar x_e, Scalar z_e, const Vector3<Scalar>& platform,
                            const RobotParams& p, ElbowBranch elbow = ElbowBranch::kPlus) {
  using std::abs;
  using std::acos;
  using std::atan2;
  using std::clamp;
  using std::sqrt;
  const Scalar l1 = Scalar(p.l_1), l2 = Scalar(p.l_2), lm = Scalar(p.l_m);
  const Scalar bar = platform[2] + Scalar(std::numbers::pi / 2);
  const Scalar x1 = platform[0] + lm * std::cos(bar);
  const Scalar z1 = platform[1] + lm * std::sin(bar);
  const Scalar dx = x_e - x1, dz = z_e - z1;
  const Scalar r = sqrt(dx * dx + dz * dz);
  if (r < Scalar(1e-12)) {
    throw SingularConfigurationError("target coincides with the shoulder joint");
  }
  const Scalar tol = Scalar(1e-12);
  if (r > l1 + l2 + tol || r < abs(l1 - l2) - tol) {
    throw WorkspaceError("target is out of the arm's reach");
  }
  const Scalar phi = atan2(dz, dx);
  const Scalar ca = clamp((r * r + l1 * l1 - l2 * l2) / (Scalar(2) * r * l1), Scalar(-1), Scalar(1));
  const Scalar cb = clamp((l1 * l1 + l2 * l2 - r * r) / (Scalar(2) * l1 * l2), Scalar(-1), Scalar(1));
  const Scalar alpha = acos(ca);
  const Scalar beta = acos(cb);
  const Scalar pi = Scalar(std::numbers::pi);
  Vector2<Scalar> th;
  if (elbow == ElbowBranch::kPlus) {
    th << phi - alpha - bar, pi - beta;
  } else {
    th << phi + alpha - bar, -(pi - beta);
  }
  th[0] = normalize_angle(th[0]);
  th[1] = normalize_angle(th[1]);
  return th;
}

}  // namespace hcdpr
