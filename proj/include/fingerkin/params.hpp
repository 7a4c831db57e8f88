#pragma once

#include <array>
#include <string>
#include <vector>

#include "fingerkin/keyvalue.hpp"
#include "fingerkin/trig.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

/// Root choices fixed at load time so that M = 0 maps to Q = 0.
struct BranchCalibration {
  Branch loop2 = Branch::Plus;  // q2
  Branch loop3 = Branch::Plus;  // beta
  Branch loop4 = Branch::Plus;  // q3
  Branch loop5 = Branch::Plus;  // q4
  Branch loop4_inverse = Branch::Plus;  // beta from q3
  double m2_root_sign = -1.0;   // m2 = -Wz + sign * sqrt(...)
  double m3_root_sign = -1.0;
};

/// Geometry of one finger. Every vector is expressed at the zero configuration
/// in the frame it is rotated with (base frame for P2/P3, proximal phalanx
/// frame for OA..DE). Lengths in mm, angles in rad.
struct KinematicParams {
  Vec3 OA = Vec3::Zero();
  Vec3 AB = Vec3::Zero();
  Vec3 AC = Vec3::Zero();
  Vec3 AD = Vec3::Zero();
  Vec3 DF = Vec3::Zero();
  Vec3 DG = Vec3::Zero();
  Vec3 GH = Vec3::Zero();
  Vec3 DE = Vec3::Zero();
  Vec3 P2 = Vec3::Zero();
  Vec3 P3 = Vec3::Zero();

  double l2 = 0.0;
  double l3 = 0.0;
  double l4 = 0.0;
  double l5 = 0.0;

  double OD_y = 0.0;
  double OD_z = 0.0;
  double DG_y = 0.0;
  double DG_z = 0.0;
  double GI_z = 0.0;

  /// beta_1 = beta + beta_offset enters the bell-crank rotations.
  double beta_offset = 0.0;

  std::array<Range, JointState::kSize> joint_limits{};  // q1, q2, q3, q4, beta
  std::array<Range, 3> motor_limits{};                  // m1 rad, m2 mm, m3 mm
  Vec3 v_max = Vec3::Zero();                            // rad/s, mm/s, mm/s

  BranchCalibration branches;

  /// Sum of the serial link offsets; no fingertip lies farther than this from O.
  double total_length() const;
};

/// Reads every field from a key/value document. Does not calibrate or validate.
KinematicParams params_from_keyvalue(const KeyValueFile& kv);

/// Serializes to the same key/value format `params_from_keyvalue` reads.
std::string params_to_text(const KinematicParams& p);

/// Picks the per-loop roots that put the zero configuration at Q = 0.
void calibrate_branches(KinematicParams& p);

struct ValidationIssue {
  int loop = 0;  // 2..5 when the issue belongs to a loop-closure equation
  std::string message;
};

/// Self-consistency checks: positive rods, zero-configuration closure to
/// 1e-9 mm, frame-offset agreement, limit sanity, and a sweep of the motor
/// box and joint ranges through all four loops. Expects calibrated branches.
std::vector<ValidationIssue> validate_params(const KinematicParams& p);

/// Parse + calibrate + validate. Throws FingerError(InvalidParams) naming the
/// first failing loop.
KinematicParams load_params(const std::string& path);
KinematicParams load_params_from_text(const std::string& text);

}  // namespace fingerkin
