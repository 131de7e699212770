#include "hcdpr/tension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hcdpr {
namespace {

Matrix3d skew(const Vector3d& v) {
  Matrix3d s;
  s << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
       -v.y(), v.x(), 0;
  return s;
}

void require_full_rank(const Matrix3x6d& A) {
  Eigen::JacobiSVD<Matrix3x6d> svd(A);
  const auto& sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[2] <= 1e-12 * sv[0]) {
    throw SingularConfigurationError("structure matrix is rank deficient");
  }
}

}  // namespace

Vector2d LambdaReduction::eliminated(double lambda3) const {
  const double den = a1 * b2 - a2 * b1;
  const double k1 = c1 + c1_rate * lambda3;
  const double k2 = c2 + c2_rate * lambda3;
  return {(b2 * k1 - b1 * k2) / den, (a1 * k2 - a2 * k1) / den};
}

Vector3d static_wrench(const RobotParams& p, const Wrenchd& external) {
  return Vector3d(0.0, p.m_m * p.g, 0.0) + external.combined();
}

Vector3d static_wrench(const Vector5d& q, const RobotParams& p, const Wrenchd& external) {
  GeneralizedStated s;
  s.q = q;
  return dynamic_terms(s, p).G.head<3>() + external.combined();
}

Vector6d particular_solution(const Matrix3x6d& A, const Vector3d& W) {
  require_full_rank(A);
  const Matrix3d AAt = A * A.transpose();
  return A.transpose() * AAt.ldlt().solve(W);
}

Matrix63d null_basis(const Matrix3x6d& A) {
  require_full_rank(A);
  Eigen::JacobiSVD<Matrix3x6d> svd(A, Eigen::ComputeFullV);
  Matrix63d N = svd.matrixV().rightCols<3>();

  std::array<int, 3> lead{};
  for (int j = 0; j < 3; ++j) {
    Eigen::Index row = 0;
    N.col(j).cwiseAbs().maxCoeff(&row);
    if (N(row, j) < 0.0) N.col(j) = -N.col(j);
    lead[j] = static_cast<int>(row);
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lead[a] > lead[b]; });
  Matrix63d sorted;
  for (int j = 0; j < 3; ++j) sorted.col(j) = N.col(order[j]);
  return sorted;
}

Vector6d rest_lengths(const Vector6d& lengths, const Vector6d& T, const RobotParams& p) {
  Vector6d L0;
  for (int i = 0; i < kNumCables; ++i) L0[i] = p.K_s * lengths[i] / (p.K_s + T[i]);
  return L0;
}

StiffnessDecomposition stiffness_matrices(const CableGeometryd& geo, const Vector6d& T,
                                          const RobotParams& p, const Vector6d& L0) {
  StiffnessDecomposition s;
  const Matrix3d I = Matrix3d::Identity();
  for (int i = 0; i < kNumCables; ++i) {
    const double L = geo.lengths[i];
    if (!(L > 1e-12)) {
      throw DegenerateGeometryError("cable " + std::to_string(i + 1) + " has zero length");
    }
    const Vector3d u = geo.unit_vectors.col(i);
    const Matrix3d rx = skew(geo.moment_arms.col(i));
    const Matrix3d P = I - u * u.transpose();

    Matrix6d kt;
    kt.topLeftCorner<3, 3>() = P;
    kt.topRightCorner<3, 3>() = P * rx.transpose();
    kt.bottomLeftCorner<3, 3>() = rx * P;
    kt.bottomRightCorner<3, 3>() = rx * P * rx.transpose();
    kt *= T[i] / L;
    kt.bottomRightCorner<3, 3>() += T[i] * skew(u) * rx.transpose();
    s.K_T += kt;

    if (i == 2 || i == 3) continue;
    const double k = p.K_s / L0[i];
    s.K_c(i, i) = k;
    const Matrix3d uu = u * u.transpose();
    Matrix6d kk;
    kk.topLeftCorner<3, 3>() = uu;
    kk.topRightCorner<3, 3>() = uu * rx.transpose();
    kk.bottomLeftCorner<3, 3>() = rx * uu;
    kk.bottomRightCorner<3, 3>() = rx * uu * rx.transpose();
    s.K_k += k * kk;
  }
  s.K = s.K_T + s.K_k;
  return s;
}

LambdaReduction lambda_reduction(const Vector6d& T_A, const Matrix63d& N,
                                 const CableGeometryd& geo, const RobotParams& p,
                                 const Vector6d& L0) {
  const Vector6d& L = geo.lengths;
  const double k1 = p.K_s / L0[0];
  const double k5 = p.K_s / L0[4];

  LambdaReduction r;
  r.a1 = N(0, 0) - N(1, 0);
  r.b1 = N(0, 1) - N(1, 1);
  r.c1 = k1 * (L[0] - L[1]) + T_A[1] - T_A[0];
  r.c1_rate = N(1, 2) - N(0, 2);
  r.a2 = N(4, 0) - N(5, 0);
  r.b2 = N(4, 1) - N(5, 1);
  r.c2 = k5 * (L[4] - L[5]) + T_A[5] - T_A[4];
  r.c2_rate = N(5, 2) - N(4, 2);

  const double den = r.a1 * r.b2 - r.a2 * r.b1;
  const double scale = std::max({std::abs(r.a1 * r.b2), std::abs(r.a2 * r.b1), 1e-300});
  if (std::abs(den) <= 1e-10 * scale || std::abs(den) < 1e-14) {
    throw ConstraintDegeneracyError("cable pair constraints are degenerate in null-space coordinates");
  }

  const Vector2d at0 = r.eliminated(0.0);
  const Vector2d at1 = r.eliminated(1.0);
  r.E_A = T_A + N.leftCols<2>() * at0;
  r.D_A = N.col(2) + N.leftCols<2>() * (at1 - at0);
  return r;
}

void closed_form_reduction(const Vector6d& T_A, const Matrix63d& N, const CableGeometryd& geo,
                           const RobotParams& p, const Vector6d& L0, Vector6d& D_A,
                           Vector6d& E_A) {
  const Vector6d& L = geo.lengths;
  const double k1 = p.K_s / L0[0];
  const double k5 = p.K_s / L0[4];
  const double a1 = N(0, 0) - N(1, 0), b1 = N(0, 1) - N(1, 1), d1 = N(0, 2) - N(1, 2);
  const double a2 = N(4, 0) - N(5, 0), b2 = N(4, 1) - N(5, 1), d2 = N(4, 2) - N(5, 2);
  const double den = a1 * b2 - b1 * a2;
  const double p1 = T_A[1] - T_A[0] + k1 * (L[0] - L[1]);
  const double p2 = T_A[5] - T_A[4] + k5 * (L[4] - L[5]);
  for (int i = 0; i < kNumCables; ++i) {
    D_A[i] = N(i, 2) - N(i, 1) * (a1 * d2 - d1 * a2) / den + N(i, 0) * (b1 * d2 - d1 * b2) / den;
    E_A[i] = T_A[i] + N(i, 1) * a1 * p2 / den - N(i, 1) * a2 * p1 / den -
             N(i, 0) * b1 * p2 / den + N(i, 0) * b2 * p1 / den;
  }
}

std::vector<LambdaInterval> lambda_intervals(const LambdaReduction& r, const RobotParams& p) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<LambdaInterval> out(kNumCables);
  for (int i = 0; i < kNumCables; ++i) {
    const double d = r.D_A[i], e = r.E_A[i];
    if (std::abs(d) < 1e-14) {
      const bool ok = e >= p.T_min - 1e-9 && e <= p.T_max + 1e-9;
      out[i] = ok ? LambdaInterval{-inf, inf} : LambdaInterval{inf, -inf};
      continue;
    }
    const double lo = (p.T_min - e) / d;
    const double hi = (p.T_max - e) / d;
    out[i] = d > 0 ? LambdaInterval{lo, hi} : LambdaInterval{hi, lo};
  }
  return out;
}

LambdaSolution maximize_lambda3(const LambdaReduction& r, const RobotParams& p) {
  const auto intervals = lambda_intervals(r, p);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& iv : intervals) {
    lo = std::max(lo, iv.lower);
    hi = std::min(hi, iv.upper);
  }
  const double slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (!(lo <= hi + slack)) {
    // A cable with no admissible lambda3 at all is the culprit. Otherwise
    // blame each cable whose range misses what the others allow.
    std::vector<int> bad;
    for (int i = 0; i < kNumCables; ++i) {
      if (intervals[i].lower > intervals[i].upper) bad.push_back(i + 1);
    }
    const bool any_empty = !bad.empty();
    for (int i = 0; !any_empty && i < kNumCables; ++i) {
      double others_lo = -std::numeric_limits<double>::infinity();
      double others_hi = std::numeric_limits<double>::infinity();
      for (int j = 0; j < kNumCables; ++j) {
        if (j == i) continue;
        others_lo = std::max(others_lo, intervals[j].lower);
        others_hi = std::min(others_hi, intervals[j].upper);
      }
      if (intervals[i].lower > others_hi || intervals[i].upper < others_lo) bad.push_back(i + 1);
    }
    std::ostringstream msg;
    msg << "no lambda3 keeps all tensions within [" << p.T_min << ", " << p.T_max << "]";
    throw InfeasibleTensionError(msg.str(), intervals, bad);
  }
  if (!std::isfinite(hi)) {
    throw ConstraintDegeneracyError("lambda3 does not influence any tension");
  }
  LambdaSolution s;
  s.lambda3 = hi;
  s.feasible = {std::min(lo, hi), hi};
  s.T = r.tensions(hi);
  for (int i = 0; i < kNumCables; ++i) s.T[i] = std::clamp(s.T[i], p.T_min, p.T_max);
  return s;
}

RedundancySolution optimize_tensions(const CableGeometryd& geo, const Vector3d& W,
                                     const RobotParams& p, const Vector6d& L0) {
  RedundancySolution sol;
  const Matrix3x6d& A = geo.structure_matrix;
  sol.T_A = particular_solution(A, W);
  sol.N_A = null_basis(A);
  sol.reduction = lambda_reduction(sol.T_A, sol.N_A, geo, p, L0);
  if (sol.reduction.D_A.sum() < 0.0) {
    sol.N_A.col(2) = -sol.N_A.col(2);
    sol.reduction = lambda_reduction(sol.T_A, sol.N_A, geo, p, L0);
  }
  const LambdaSolution best = maximize_lambda3(sol.reduction, p);
  sol.feasible = best.feasible;
  sol.T = best.T;
  const Vector2d l12 = sol.reduction.eliminated(best.lambda3);
  sol.lambda << l12[0], l12[1], best.lambda3;
  return sol;
}

std::vector<MonotonicityViolation> stiffness_monotonicity(const CableGeometryd& geo,
                                                          const RedundancySolution& sol,
                                                          const RobotParams& p,
                                                          const Vector6d& L0, int samples) {
  std::vector<MonotonicityViolation> out;
  const double lo = sol.feasible.lower, hi = sol.feasible.upper;
  if (samples < 2 || !(hi > lo)) return out;
  constexpr std::array<int, 3> kAxes{0, 2, 4};  // x, z and rotation in the plane
  Vector3d prev = Vector3d::Constant(-std::numeric_limits<double>::infinity());
  for (int k = 0; k < samples; ++k) {
    const double lambda3 = lo + (hi - lo) * k / (samples - 1);
    const Matrix6d KT = stiffness_matrices(geo, sol.reduction.tensions(lambda3), p, L0).K_T;
    for (int a = 0; a < 3; ++a) {
      const double v = KT(kAxes[a], kAxes[a]);
      if (v < prev[a] - 1e-9 * std::max(1.0, std::abs(prev[a]))) out.push_back({k, lambda3, a});
      prev[a] = v;
    }
  }
  return out;
}

}  // namespace hcdpr
