#pragma once

#include <optional>

#include "fingerkin/params.hpp"
#include "fingerkin/trig.hpp"

namespace fingerkin {

// The four loop-closure equations, numbered as the rod lengths they close:
//   loop 2  l2 = || P2 + M2 - R2 OA ||                       unknown q2
//   loop 3  l3 = || P3 + M3 - R2 OA - R3 AB ||               unknown beta
//   loop 4  l4 = || -R(beta1) AC + AD + R(q3) DF ||           unknown q3
//   loop 5  l5 = || R(q3) DG + R(q3) R(q4) GH - DE ||         unknown q4
// with R2 = Ry(q1) Rx(q2), R3 = Ry(q1) Rx(q2 + beta1), beta1 = beta + beta_offset,
// M2 = (0, 0, m2), M3 = (0, 0, m3).
//
// Each solver reduces its loop to A sin q + B cos q + C = 0. Without a hint the
// calibrated branch is used; with `near` the root closer to it wins, which keeps
// solutions continuous along a trajectory. Solutions outside the joint limits
// raise OutOfJointLimits.

/// U, V and the rotation form for each loop, as fed to loop_reduce.
struct LoopSetup {
  Vec3 U;
  Vec3 V;
  double l;
  RotationForm form;
};

LoopSetup loop2_setup(double m2, double q1, const KinematicParams& p);
LoopSetup loop3_setup(double m3, double q1, double q2, const KinematicParams& p);  // solves beta1
LoopSetup loop4_setup(double beta, const KinematicParams& p);
LoopSetup loop5_setup(double q3, const KinematicParams& p);
LoopSetup loop4_inverse_setup(double q3, const KinematicParams& p);  // solves beta1

double solve_loop2(double m2, double q1, const KinematicParams& p, std::optional<double> near = {});
double solve_loop3(double m3, double q1, double q2, const KinematicParams& p, std::optional<double> near = {});
double solve_loop4(double beta, const KinematicParams& p, std::optional<double> near = {});
double solve_loop5(double q3, const KinematicParams& p, std::optional<double> near = {});

/// Bell-crank angle that puts the PIP joint at q3 (loop 4 solved for beta).
double solve_loop4_inverse(double q3, const KinematicParams& p, std::optional<double> near = {});

/// Carriage positions closing loops 2 and 3 for given joint angles. The loop is
/// quadratic in the carriage coordinate; the root inside the motor limits is
/// kept, ties broken by `near` or else by distance to zero.
double motor_for_loop2(double q1, double q2, const KinematicParams& p, std::optional<double> near = {});
double motor_for_loop3(double q1, double q2, double beta, const KinematicParams& p,
                       std::optional<double> near = {});

/// Signed closure residuals ||.|| - l (mm).
double loop2_residual(double m2, double q1, double q2, const KinematicParams& p);
double loop3_residual(double m3, double q1, double q2, double beta, const KinematicParams& p);
double loop4_residual(double beta, double q3, const KinematicParams& p);
double loop5_residual(double q3, double q4, const KinematicParams& p);

/// Largest |A sin q + B cos q + C| scale-free acos argument for the loop
/// (|C| / sqrt(A^2 + B^2)); > 1 means the loop cannot close.
double loop_closure_margin(const LoopSetup& s);

}  // namespace fingerkin
