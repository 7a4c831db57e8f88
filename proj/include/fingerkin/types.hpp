#pragma once

#include <Eigen/Dense>

namespace fingerkin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Actuator coordinates. m1 drives the abduction joint directly (rad); m2 and
/// m3 are lead-screw carriage displacements along the base z axis (mm).
struct MotorState {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;

  Vec3 vec() const { return {m1, m2, m3}; }
  static MotorState from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  double operator[](int i) const { return i == 0 ? m1 : (i == 1 ? m2 : m3); }
};

/// Angles of the serial-equivalent chain (rad).
///   q1   MCP abduction, about base y
///   q2   MCP flexion, about x
///   q3   PIP flexion
///   q4   DIP flexion, coupled to q3 through the distal four-bar
///   beta bell-crank rotation about joint A, relative to the proximal phalanx
struct JointState {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
  double beta = 0.0;

  static constexpr int kSize = 5;
  double get(int i) const;
  double& at(int i);
};

/// Fingertip position in the base frame at the MCP joint (mm).
struct FingertipPose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  static FingertipPose from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

/// Linear interpolation of every joint coordinate.
JointState lerp(const JointState& a, const JointState& b, double t);

inline double JointState::get(int i) const {
  switch (i) {
    case 0: return q1;
    case 1: return q2;
    case 2: return q3;
    case 3: return q4;
    default: return beta;
  }
}

inline double& JointState::at(int i) {
  switch (i) {
    case 0: return q1;
    case 1: return q2;
    case 2: return q3;
    case 3: return q4;
    default: return beta;
  }
}

inline JointState lerp(const JointState& a, const JointState& b, double t) {
  JointState r;
  for (int i = 0; i < JointState::kSize; ++i) r.at(i) = a.get(i) + t * (b.get(i) - a.get(i));
  return r;
}

}  // namespace fingerkin
