#pragma once

#include "fingerkin/params.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

/// d q_j / d m_i. Rows q1, q2, q3, q4, beta; columns m1, m2, m3.
struct LoopPartials {
  Eigen::Matrix<double, 5, 3> d = Eigen::Matrix<double, 5, 3>::Zero();

  double operator()(int joint, int motor) const { return d(joint, motor); }
};

/// Motor-space linear-velocity Jacobian, d(fingertip)/dM.
struct JacobianMatrix {
  Mat3 J = Mat3::Zero();
  double cond = 0.0;  // 2-norm condition number
  double det = 0.0;
};

inline constexpr double kSingularDenominator = 1e-12;
inline constexpr double kMaxCondition = 1e8;

/// Implicit differentiation of loops 2..5. Q must equal m2q(M).
/// Throws SingularLoop (with the loop index) when a denominator vanishes.
LoopPartials loop_partials(const MotorState& m, const JointState& q, const KinematicParams& p);

/// Columns are chain-rule sums over the joint partials of the transform chain.
JacobianMatrix jacobian(const MotorState& m, const KinematicParams& p);
JacobianMatrix jacobian(const MotorState& m, const JointState& q, const KinematicParams& p);

/// Mdot = J^-1 xdot through the adjugate. Throws NearSingular above kMaxCondition.
Vec3 solve_motor_rates(const JacobianMatrix& J, const Vec3& xdot);

/// Adjugate-over-determinant inverse of a 3x3 matrix.
Mat3 inverse3(const Mat3& a);

}  // namespace fingerkin
