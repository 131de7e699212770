// Static tension distribution: minimum-norm solution, null-space
// redundancy, stiffness matrices and the one-dimensional lambda3 program.
#pragma once

#include <vector>

#include "hcdpr/dynamics.hpp"
#include "hcdpr/errors.hpp"
#include "hcdpr/kinematics.hpp"
#include "hcdpr/params.hpp"
#include "hcdpr/types.hpp"

namespace hcdpr {

using Matrix63d = Eigen::Matrix<double, 6, 3>;

/// T(lambda3) = lambda3 * D_A + E_A once lambda1, lambda2 are eliminated by
/// the cable-pair constraints. c1, c2 hold the lambda3-free parts; c1_rate and
/// c2_rate their lambda3 coefficients.
struct LambdaReduction {
  Vector6d D_A = Vector6d::Zero();
  Vector6d E_A = Vector6d::Zero();
  double a1 = 0, b1 = 0, c1 = 0;
  double a2 = 0, b2 = 0, c2 = 0;
  double c1_rate = 0, c2_rate = 0;

  /// (lambda1, lambda2) for the given lambda3.
  Vector2d eliminated(double lambda3) const;
  Vector6d tensions(double lambda3) const { return lambda3 * D_A + E_A; }
};

struct LambdaSolution {
  double lambda3 = 0;
  Vector6d T = Vector6d::Zero();
  LambdaInterval feasible{0, 0};
};

struct RedundancySolution {
  Vector6d T_A = Vector6d::Zero();
  Matrix63d N_A = Matrix63d::Zero();
  Vector3d lambda = Vector3d::Zero();
  Vector6d T = Vector6d::Zero();
  LambdaReduction reduction;
  LambdaInterval feasible{0, 0};
};

struct StiffnessDecomposition {
  Matrix6d K = Matrix6d::Zero();
  Matrix6d K_T = Matrix6d::Zero();
  Matrix6d K_k = Matrix6d::Zero();
  Matrix6d K_c = Matrix6d::Zero();
};

/// Platform weight plus the external load, (F_x, F_z, M).
Vector3d static_wrench(const RobotParams& p, const Wrenchd& external = {});

/// Weight of platform and arm together with the arm's moment about the
/// platform centre at pose q, plus the external load.
Vector3d static_wrench(const Vector5d& q, const RobotParams& p, const Wrenchd& external = {});

/// A^T (A A^T)^-1 W. Throws SingularConfigurationError if rank(A) < 3.
Vector6d particular_solution(const Matrix3x6d& A, const Vector3d& W);

/// Orthonormal kernel basis. Each column is flipped so its largest-magnitude
/// entry is positive; columns are ordered by descending row of that entry.
Matrix63d null_basis(const Matrix3x6d& A);

/// Unstretched lengths giving tension T at the current lengths.
Vector6d rest_lengths(const Vector6d& lengths, const Vector6d& T, const RobotParams& p);

StiffnessDecomposition stiffness_matrices(const CableGeometryd& geo, const Vector6d& T,
                                          const RobotParams& p, const Vector6d& L0);

/// Eliminates lambda1, lambda2 by substitution. Throws
/// ConstraintDegeneracyError when the 2x2 elimination is singular.
LambdaReduction lambda_reduction(const Vector6d& T_A, const Matrix63d& N_A,
                                 const CableGeometryd& geo, const RobotParams& p,
                                 const Vector6d& L0);

/// The same D_A, E_A written out entry by entry in closed form.
void closed_form_reduction(const Vector6d& T_A, const Matrix63d& N_A, const CableGeometryd& geo,
                           const RobotParams& p, const Vector6d& L0, Vector6d& D_A,
                           Vector6d& E_A);

/// Per-cable lambda3 ranges keeping T_min <= T_i <= T_max.
std::vector<LambdaInterval> lambda_intervals(const LambdaReduction& r, const RobotParams& p);

/// Largest feasible lambda3. Throws InfeasibleTensionError on an empty set.
LambdaSolution maximize_lambda3(const LambdaReduction& r, const RobotParams& p);

/// Full pipeline: particular solution, kernel, reduction and lambda3
/// maximisation. The third kernel column is oriented so raising lambda3
/// raises the net tension.
RedundancySolution optimize_tensions(const CableGeometryd& geo, const Vector3d& W,
                                     const RobotParams& p, const Vector6d& L0);

struct MonotonicityViolation {
  int sample = 0;
  double lambda3 = 0;
  int axis = 0;  // 0: x, 1: z, 2: theta_m
};

/// Samples the feasible lambda3 interval and reports where a diagonal
/// stiffness entry along x, z or theta_m decreases.
std::vector<MonotonicityViolation> stiffness_monotonicity(const CableGeometryd& geo,
                                                          const RedundancySolution& sol,
                                                          const RobotParams& p,
                                                          const Vector6d& L0, int samples = 100);

}  // namespace hcdpr
