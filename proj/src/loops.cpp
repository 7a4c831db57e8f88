#include "fingerkin/loops.hpp"

#include <cmath>
#include <string>

#include "fingerkin/errors.hpp"

namespace fingerkin {

namespace {

constexpr double kLimitTol = 1e-9;

const char* joint_name(int index) {
  static const char* names[] = {"q1", "q2", "q3", "q4", "beta"};
  return names[index];
}

double pick(const std::array<double, 2>& roots, Branch calibrated, std::optional<double> near) {
  if (!near) return calibrated == Branch::Plus ? roots[0] : roots[1];
  const double d0 = std::abs(wrap_angle(roots[0] - *near));
  const double d1 = std::abs(wrap_angle(roots[1] - *near));
  // Keep the result on the same 2*pi sheet as the hint.
  const double chosen = d0 <= d1 ? roots[0] : roots[1];
  return *near + wrap_angle(chosen - *near);
}

double check_joint(double q, int joint, int loop, const KinematicParams& p) {
  if (!p.joint_limits[joint].contains(q, kLimitTol))
    throw FingerError(ErrorCode::OutOfJointLimits,
                      std::string(joint_name(joint)) + " = " + std::to_string(q) + " rad outside [" +
                          std::to_string(p.joint_limits[joint].lo) + ", " + std::to_string(p.joint_limits[joint].hi) +
                          "]",
                      loop);
  return q;
}

double solve(const LoopSetup& s, Branch calibrated, std::optional<double> near, int loop) {
  const auto coeffs = loop_reduce(s.U, s.V, s.l, s.form);
  return pick(trig_roots(coeffs, loop), calibrated, near);
}

Mat3 r2(double q1, double q2) { return rot_y(q1) * rot_x(q2); }

double carriage_root(const Vec3& W, double l, double sign, const Range& limits, std::optional<double> near,
                     int loop) {
  // || W + (0, 0, m) || = l  =>  m = -Wz +- sqrt(l^2 - Wx^2 - Wy^2)
  const double disc = l * l - W.x() * W.x() - W.y() * W.y();
  if (disc < -kAcosClamp * l * l)
    throw FingerError(ErrorCode::Unsolvable, "no carriage position closes the loop", loop);
  const double root = std::sqrt(std::max(disc, 0.0));
  const double calibrated = -W.z() + sign * root;
  const double other = -W.z() - sign * root;
  const bool cal_in = limits.contains(calibrated, kLimitTol);
  const bool other_in = limits.contains(other, kLimitTol);
  if (cal_in && other_in) {
    const double ref = near.value_or(0.0);
    return std::abs(calibrated - ref) <= std::abs(other - ref) ? calibrated : other;
  }
  if (cal_in) return calibrated;
  if (other_in) return other;
  throw FingerError(ErrorCode::OutOfMotorLimits,
                    "carriage roots " + std::to_string(calibrated) + ", " + std::to_string(other) +
                        " mm both outside [" + std::to_string(limits.lo) + ", " + std::to_string(limits.hi) + "]",
                    loop);
}

}  // namespace

LoopSetup loop2_setup(double m2, double q1, const KinematicParams& p) {
  return {p.P2 + Vec3(0, 0, m2), p.OA, p.l2, {Axis::X, rot_y(q1)}};
}

LoopSetup loop3_setup(double m3, double q1, double q2, const KinematicParams& p) {
  const Mat3 R2 = r2(q1, q2);
  return {p.P3 + Vec3(0, 0, m3) - R2 * p.OA, p.AB, p.l3, {Axis::X, R2}};
}

LoopSetup loop4_setup(double beta, const KinematicParams& p) {
  // -R(b1) AC + AD + R(q3) DF = -(U - R(q3) V)
  return {rot_x(beta + p.beta_offset) * p.AC - p.AD, p.DF, p.l4, {Axis::X, Mat3::Identity()}};
}

LoopSetup loop5_setup(double q3, const KinematicParams& p) {
  // R(q3) DG + R(q3) R(q4) GH - DE = -(U - R(q3) R(q4) V)
  const Mat3 R3 = rot_x(q3);
  return {p.DE - R3 * p.DG, p.GH, p.l5, {Axis::X, R3}};
}

LoopSetup loop4_inverse_setup(double q3, const KinematicParams& p) {
  return {p.AD + rot_x(q3) * p.DF, p.AC, p.l4, {Axis::X, Mat3::Identity()}};
}

double solve_loop2(double m2, double q1, const KinematicParams& p, std::optional<double> near) {
  const double q2 = solve(loop2_setup(m2, q1, p), p.branches.loop2, near, 2);
  return check_joint(q2, 1, 2, p);
}

double solve_loop3(double m3, double q1, double q2, const KinematicParams& p, std::optional<double> near) {
  std::optional<double> near1;
  if (near) near1 = *near + p.beta_offset;
  // Loop 3 rotates AB by q2 + beta1 with R2 already factored into the form.
  const double beta1 = solve(loop3_setup(m3, q1, q2, p), p.branches.loop3, near1, 3);
  return check_joint(beta1 - p.beta_offset, 4, 3, p);
}

double solve_loop4(double beta, const KinematicParams& p, std::optional<double> near) {
  const double q3 = solve(loop4_setup(beta, p), p.branches.loop4, near, 4);
  return check_joint(q3, 2, 4, p);
}

double solve_loop5(double q3, const KinematicParams& p, std::optional<double> near) {
  const double q4 = solve(loop5_setup(q3, p), p.branches.loop5, near, 5);
  return check_joint(q4, 3, 5, p);
}

double solve_loop4_inverse(double q3, const KinematicParams& p, std::optional<double> near) {
  std::optional<double> near1;
  if (near) near1 = *near + p.beta_offset;
  const double beta1 = solve(loop4_inverse_setup(q3, p), p.branches.loop4_inverse, near1, 4);
  return check_joint(beta1 - p.beta_offset, 4, 4, p);
}

double motor_for_loop2(double q1, double q2, const KinematicParams& p, std::optional<double> near) {
  const Vec3 W = p.P2 - r2(q1, q2) * p.OA;
  return carriage_root(W, p.l2, p.branches.m2_root_sign, p.motor_limits[1], near, 2);
}

double motor_for_loop3(double q1, double q2, double beta, const KinematicParams& p, std::optional<double> near) {
  const Vec3 W = p.P3 - r2(q1, q2) * p.OA - r2(q1, q2 + beta + p.beta_offset) * p.AB;
  return carriage_root(W, p.l3, p.branches.m3_root_sign, p.motor_limits[2], near, 3);
}

double loop2_residual(double m2, double q1, double q2, const KinematicParams& p) {
  return (p.P2 + Vec3(0, 0, m2) - r2(q1, q2) * p.OA).norm() - p.l2;
}

double loop3_residual(double m3, double q1, double q2, double beta, const KinematicParams& p) {
  return (p.P3 + Vec3(0, 0, m3) - r2(q1, q2) * p.OA - r2(q1, q2 + beta + p.beta_offset) * p.AB).norm() - p.l3;
}

double loop4_residual(double beta, double q3, const KinematicParams& p) {
  return (-rot_x(beta + p.beta_offset) * p.AC + p.AD + rot_x(q3) * p.DF).norm() - p.l4;
}

double loop5_residual(double q3, double q4, const KinematicParams& p) {
  const Mat3 R3 = rot_x(q3);
  return (R3 * p.DG + R3 * rot_x(q4) * p.GH - p.DE).norm() - p.l5;
}

double loop_closure_margin(const LoopSetup& s) {
  const auto c = loop_reduce(s.U, s.V, s.l, s.form);
  return std::abs(c.C) / std::hypot(c.A, c.B);
}

}  // namespace fingerkin
