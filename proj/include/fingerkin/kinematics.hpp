#pragma once

#include <array>
#include <optional>

#include "fingerkin/params.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

/// Motor -> joint. Loops are solved in order 2, 3, 4, 5; q1 = m1 (direct drive).
/// With `hint` each loop takes the root nearest the hinted angle.
JointState m2q(const MotorState& m, const KinematicParams& p, const std::optional<JointState>& hint = {});

/// Joint -> motor. m2 and m3 come from the carriage quadratics of loops 2 and 3.
MotorState q2m(const JointState& q, const KinematicParams& p, const std::optional<MotorState>& hint = {});

/// The five homogeneous transforms O->J1->J2->J3->J4->EE.
std::array<Mat4, 5> chain_transforms(const JointState& q, const KinematicParams& p);

/// Fingertip position for a joint state (translation of the composed chain).
Vec3 fk_joints(const JointState& q, const KinematicParams& p);

/// d(fingertip)/d(q_j) for j = 0..3 (q1..q4), with the other angles held fixed.
Vec3 fk_joint_partial(const JointState& q, int j, const KinematicParams& p);

FingertipPose fk(const MotorState& m, const KinematicParams& p, const std::optional<JointState>& hint = {});

/// dq4/dq3 along the loop-5 coupling.
double dq4_dq3(double q3, double q4, const KinematicParams& p);

struct X2qOptions {
  double tolerance_mm = 1e-9;
  double damping = 1e-6;
  int max_iterations = 100;
};

/// Sign of det d(y, z)/d(q2, q3) in the abduction-rotated plane. The two
/// postures that share a fingertip position lie on opposite sides.
int fold_side(const JointState& q, const KinematicParams& p);

/// Fingertip -> joint. q1 = atan2(x, z) in closed form; (q2, q3) by damped Newton
/// on the planar residual. The seed is tried first, then five fallback seeds;
/// among converged solutions inside the joint and motor limits, those on the
/// seed's side of the fold come first, then the one nearest the seed. Without
/// a seed a mid-stroke flexed posture stands in.
JointState x2q(const FingertipPose& x, const KinematicParams& p, const std::optional<JointState>& seed = {},
               const X2qOptions& opt = {});

MotorState ik(const FingertipPose& x, const KinematicParams& p, const std::optional<JointState>& seed = {});

/// True when m lies inside the motor limits (with a small tolerance).
bool within_motor_limits(const MotorState& m, const KinematicParams& p, double tol = 1e-9);

}  // namespace fingerkin
