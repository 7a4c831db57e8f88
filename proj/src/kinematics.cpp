#include "fingerkin/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fingerkin/errors.hpp"
#include "fingerkin/loops.hpp"
#include "fingerkin/trig.hpp"

namespace fingerkin {

namespace {

Mat4 transform(const Mat3& r, const Vec3& t) {
  Mat4 T = Mat4::Identity();
  T.topLeftCorner<3, 3>() = r;
  T.topRightCorner<3, 1>() = t;
  return T;
}

std::optional<double> hint_of(const std::optional<JointState>& h, double JointState::*field) {
  if (!h) return std::nullopt;
  return (*h).*field;
}

// Loop 5 without the joint-limit check, for use inside the Newton iteration.
double q4_unchecked(double q3, std::optional<double> hint, const KinematicParams& p) {
  const LoopSetup s = loop5_setup(q3, p);
  const auto roots = trig_roots(loop_reduce(s.U, s.V, s.l, s.form), 5);
  if (!hint) return p.branches.loop5 == Branch::Plus ? roots[0] : roots[1];
  const double near = *hint;
  const double d0 = std::abs(wrap_angle(roots[0] - near));
  const double d1 = std::abs(wrap_angle(roots[1] - near));
  return near + wrap_angle((d0 <= d1 ? roots[0] : roots[1]) - near);
}

struct Planar {
  Eigen::Vector2d r;  // (y, z) residual, mm
  Eigen::Matrix2d J;  // d r / d (q2, q3)
};

Planar planar_residual(double q2, double q3, double q4, const Eigen::Vector2d& target, const KinematicParams& p) {
  const Vec3 GI(0, 0, p.GI_z);
  const Vec3 DGv(0, p.DG_y, p.DG_z);
  const Vec3 ODv(0, p.OD_y, p.OD_z);
  const Mat3 R4 = rot_x(q4);
  const Vec3 distal = DGv + R4 * GI;
  const Vec3 inner = ODv + rot_x(q3) * distal;
  const Vec3 tip = rot_x(q2) * inner;
  const Vec3 d2 = drot_axis(Axis::X, q2) * inner;
  const Vec3 d3 = rot_x(q2) * (drot_axis(Axis::X, q3) * distal +
                               rot_x(q3) * drot_axis(Axis::X, q4) * GI * dq4_dq3(q3, q4, p));
  Planar out;
  out.r = Eigen::Vector2d(tip.y(), tip.z()) - target;
  out.J << d2.y(), d3.y(), d2.z(), d3.z();
  return out;
}

struct NewtonResult {
  bool converged = false;
  double q2 = 0, q3 = 0, q4 = 0;
};

NewtonResult planar_newton_impl(double q2, double q3, const Eigen::Vector2d& target, const KinematicParams& p,
                                const X2qOptions& opt) {
  NewtonResult res;
  double q4;
  try {
    q4 = q4_unchecked(q3, std::nullopt, p);
  } catch (const FingerError&) {
    return res;
  }
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Planar pr = planar_residual(q2, q3, q4, target, p);
    if (pr.r.norm() <= opt.tolerance_mm) {
      res = {true, q2, q3, q4};
      return res;
    }
    const Eigen::Matrix2d H = pr.J.transpose() * pr.J + opt.damping * Eigen::Matrix2d::Identity();
    const Eigen::Vector2d step = -H.ldlt().solve(pr.J.transpose() * pr.r);
    if (!step.allFinite()) return res;
    // Loop 5 may fail to close for a long step; halve until it does.
    double scale = 1.0;
    bool moved = false;
    for (int h = 0; h < 30 && !moved; ++h, scale *= 0.5) {
      try {
        const double n2 = q2 + scale * step.x();
        const double n3 = q3 + scale * step.y();
        const double n4 = q4_unchecked(n3, q4, p);
        q2 = n2;
        q3 = n3;
        q4 = n4;
        moved = true;
      } catch (const FingerError&) {
      }
    }
    if (!moved) return res;
  }
  const Planar pr = planar_residual(q2, q3, q4, target, p);
  if (pr.r.norm() <= opt.tolerance_mm) res = {true, q2, q3, q4};
  return res;
}

NewtonResult planar_newton(double q2, double q3, const Eigen::Vector2d& target, const KinematicParams& p,
                           const X2qOptions& opt) {
  try {
    return planar_newton_impl(q2, q3, target, p, opt);
  } catch (const FingerError&) {
    return {};
  }
}

JointState default_seed(const KinematicParams& p) {
  MotorState mid{0.0, p.motor_limits[1].mid(), p.motor_limits[2].mid()};
  try {
    return m2q(mid, p);
  } catch (const FingerError&) {
    JointState q;
    q.q2 = p.joint_limits[1].mid();
    q.q3 = p.joint_limits[2].mid();
    return q;
  }
}

}  // namespace

int fold_side(const JointState& q, const KinematicParams& p) {
  double det = 0.0;
  try {
    det = planar_residual(q.q2, q.q3, q.q4, Eigen::Vector2d::Zero(), p).J.determinant();
  } catch (const FingerError&) {
  }
  return det > 0 ? 1 : (det < 0 ? -1 : 0);
}

bool within_motor_limits(const MotorState& m, const KinematicParams& p, double tol) {
  for (int i = 0; i < 3; ++i)
    if (!p.motor_limits[i].contains(m[i], tol)) return false;
  return true;
}

JointState m2q(const MotorState& m, const KinematicParams& p, const std::optional<JointState>& hint) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(m[i]) || !p.motor_limits[i].contains(m[i], 1e-6))
      throw FingerError(ErrorCode::OutOfMotorLimits, "m" + std::to_string(i + 1) + " = " + std::to_string(m[i]) +
                                                         " outside its motor limits");
  JointState q;
  q.q1 = m.m1;
  if (!p.joint_limits[0].contains(q.q1, 1e-9))
    throw FingerError(ErrorCode::OutOfJointLimits, "q1 = " + std::to_string(q.q1) + " rad outside its limits");
  q.q2 = solve_loop2(m.m2, q.q1, p, hint_of(hint, &JointState::q2));
  q.beta = solve_loop3(m.m3, q.q1, q.q2, p, hint_of(hint, &JointState::beta));
  q.q3 = solve_loop4(q.beta, p, hint_of(hint, &JointState::q3));
  q.q4 = solve_loop5(q.q3, p, hint_of(hint, &JointState::q4));
  return q;
}

MotorState q2m(const JointState& q, const KinematicParams& p, const std::optional<MotorState>& hint) {
  for (int i = 0; i < JointState::kSize; ++i)
    if (!std::isfinite(q.get(i)) || !p.joint_limits[i].contains(q.get(i), 1e-9))
      throw FingerError(ErrorCode::OutOfJointLimits, "joint " + std::to_string(i) + " = " + std::to_string(q.get(i)) +
                                                         " rad outside its limits");
  MotorState m;
  m.m1 = q.q1;
  if (!p.motor_limits[0].contains(m.m1, 1e-9))
    throw FingerError(ErrorCode::OutOfMotorLimits, "m1 = " + std::to_string(m.m1) + " rad outside its limits");
  m.m2 = motor_for_loop2(q.q1, q.q2, p, hint ? std::optional<double>(hint->m2) : std::nullopt);
  m.m3 = motor_for_loop3(q.q1, q.q2, q.beta, p, hint ? std::optional<double>(hint->m3) : std::nullopt);
  return m;
}

std::array<Mat4, 5> chain_transforms(const JointState& q, const KinematicParams& p) {
  return {transform(rot_y(q.q1), Vec3::Zero()), transform(rot_x(q.q2), Vec3::Zero()),
          transform(rot_x(q.q3), Vec3(0, p.OD_y, p.OD_z)), transform(rot_x(q.q4), Vec3(0, p.DG_y, p.DG_z)),
          transform(Mat3::Identity(), Vec3(0, 0, p.GI_z))};
}

Vec3 fk_joints(const JointState& q, const KinematicParams& p) {
  const auto T = chain_transforms(q, p);
  const Mat4 total = T[0] * T[1] * T[2] * T[3] * T[4];
  return total.topRightCorner<3, 1>();
}

Vec3 fk_joint_partial(const JointState& q, int j, const KinematicParams& p) {
  auto T = chain_transforms(q, p);
  const double angles[4] = {q.q1, q.q2, q.q3, q.q4};
  Mat4 dT = Mat4::Zero();
  dT.topLeftCorner<3, 3>() = drot_axis(j == 0 ? Axis::Y : Axis::X, angles[j]);
  T[j] = dT;  // the translation of T[j] is constant
  const Mat4 total = T[0] * T[1] * T[2] * T[3] * T[4];
  return total.topRightCorner<3, 1>();
}

FingertipPose fk(const MotorState& m, const KinematicParams& p, const std::optional<JointState>& hint) {
  return FingertipPose::from(fk_joints(m2q(m, p, hint), p));
}

double dq4_dq3(double q3, double q4, const KinematicParams& p) {
  const Mat3 R3 = rot_x(q3), R4 = rot_x(q4);
  const Mat3 dR3 = drot_axis(Axis::X, q3), dR4 = drot_axis(Axis::X, q4);
  const Vec3 r = R3 * p.DG + R3 * R4 * p.GH - p.DE;
  const double num = r.dot(dR3 * p.DG + dR3 * R4 * p.GH);
  const double den = r.dot(R3 * dR4 * p.GH);
  if (std::abs(den) < 1e-12) throw FingerError(ErrorCode::SingularLoop, "loop 5 at a fold", 5);
  return -num / den;
}

JointState x2q(const FingertipPose& x, const KinematicParams& p, const std::optional<JointState>& seed,
               const X2qOptions& opt) {
  const Vec3 X = x.vec();
  if (!X.allFinite() || X.norm() > p.total_length() + 1e-9)
    throw FingerError(ErrorCode::Unreachable, "target beyond the finger's total length");
  // A curled finger can put the tip behind the MCP plane (local z < 0), where
  // the abduction angle is the opposite atan2 branch.
  std::vector<double> q1s;
  for (double q1 : {std::atan2(X.x(), X.z()), std::atan2(-X.x(), -X.z())})
    if (p.joint_limits[0].contains(q1, 1e-9)) q1s.push_back(q1);
  if (q1s.empty()) throw FingerError(ErrorCode::Unreachable, "abduction angle outside q1 limits");

  std::vector<std::pair<double, double>> seeds;
  const JointState s0 = seed ? *seed : default_seed(p);
  seeds.emplace_back(s0.q2, s0.q3);
  const Range& r2 = p.joint_limits[1];
  const Range& r3 = p.joint_limits[2];
  constexpr double fractions[5][2] = {{0.5, 0.5}, {0.25, 0.75}, {0.75, 0.25}, {0.25, 0.25}, {0.75, 0.75}};
  for (const auto& f : fractions) seeds.emplace_back(r2.lo + f[0] * r2.width(), r3.lo + f[1] * r3.width());

  std::vector<JointState> found;
  for (const double q1 : q1s) {
    const Vec3 local = rot_y(q1).transpose() * X;
    const Eigen::Vector2d target(local.y(), local.z());
    for (const auto& [a, b] : seeds) {
      const NewtonResult nr = planar_newton(a, b, target, p, opt);
      if (!nr.converged) continue;
      JointState q;
      q.q1 = q1;
      q.q2 = wrap_angle(nr.q2);
      q.q3 = wrap_angle(nr.q3);
      q.q4 = wrap_angle(nr.q4);
      try {
        q.beta = solve_loop4_inverse(q.q3, p, seed ? std::optional<double>(seed->beta) : std::nullopt);
        const MotorState m = q2m(q, p);
        // The solution must be the one the mechanism reaches from these motors.
        const JointState back = m2q(m, p);
        if (std::abs(back.q2 - q.q2) > 1e-6 || std::abs(back.q3 - q.q3) > 1e-6) continue;
        bool dup = false;
        for (const auto& f : found) dup = dup || (std::abs(f.q2 - q.q2) < 1e-6 && std::abs(f.q3 - q.q3) < 1e-6);
        if (!dup) found.push_back(q);
      } catch (const FingerError&) {
        continue;
      }
    }
  }
  if (!found.empty()) {
    // Near the straight finger two postures share a tip position; the one on
    // the seed's side of the fold wins (the flexed side without a seed).
    const int side = fold_side(s0, p);
    auto cost = [&](const JointState& q) {
      const double d = std::hypot(q.q2 - s0.q2, q.q3 - s0.q3);
      return (side != 0 && fold_side(q, p) != side ? 100.0 : 0.0) + d;
    };
    return *std::min_element(found.begin(), found.end(),
                             [&](const JointState& a, const JointState& b) { return cost(a) < cost(b); });
  }
  throw FingerError(ErrorCode::Unreachable,
                    "no joint solution inside the limits for (" + std::to_string(X.x()) + ", " +
                        std::to_string(X.y()) + ", " + std::to_string(X.z()) + ") mm");
}

MotorState ik(const FingertipPose& x, const KinematicParams& p, const std::optional<JointState>& seed) {
  return q2m(x2q(x, p, seed), p);
}

}  // namespace fingerkin
