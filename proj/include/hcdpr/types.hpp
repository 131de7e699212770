// Fixed-size Eigen aliases shared by every module.
#pragma once

#include <Eigen/Dense>

namespace hcdpr {

inline constexpr int kNumDof = 5;
inline constexpr int kNumCables = 6;

template <typename Scalar> using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Vector5 = Eigen::Matrix<Scalar, 5, 1>;
template <typename Scalar> using Vector6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar> using Matrix5 = Eigen::Matrix<Scalar, 5, 5>;
template <typename Scalar> using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar> using Matrix3x5 = Eigen::Matrix<Scalar, 3, 5>;
template <typename Scalar> using Matrix3x6 = Eigen::Matrix<Scalar, 3, 6>;
template <typename Scalar> using Matrix6x3 = Eigen::Matrix<Scalar, 6, 3>;

using Vector2d = Vector2<double>;
using Vector3d = Vector3<double>;
using Vector4d = Eigen::Vector4d;
using Vector5d = Vector5<double>;
using Vector6d = Vector6<double>;
using Matrix3d = Matrix3<double>;
using Matrix5d = Matrix5<double>;
using Matrix6d = Matrix6<double>;
using Matrix3x5d = Matrix3x5<double>;
using Matrix3x6d = Matrix3x6<double>;
using Matrix6x3d = Matrix6x3<double>;

// Generalized coordinate indices.
enum Dof : int { kXm = 0, kZm = 1, kThetaM = 2, kTheta1 = 3, kTheta2 = 4 };

}  // namespace hcdpr
