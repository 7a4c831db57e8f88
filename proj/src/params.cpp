#include "fingerkin/params.hpp"

#include <cmath>
#include <fmt/format.h>

#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/loops.hpp"

namespace fingerkin {

namespace {

constexpr const char* kJointKeys[JointState::kSize] = {"q1_limits_rad", "q2_limits_rad", "q3_limits_rad",
                                                       "q4_limits_rad", "beta_limits_rad"};
constexpr const char* kMotorKeys[3] = {"m1_limits_rad", "m2_limits_mm", "m3_limits_mm"};
constexpr const char* kVmaxKeys[3] = {"v_max_m1_rad_s", "v_max_m2_mm_s", "v_max_m3_mm_s"};

// Zero-configuration closure and sweep tolerances.
constexpr double kClosureTol = 1e-9;
constexpr int kMotorSweep = 9;
constexpr int kJointSweep = 41;

Range range_of(const KeyValueFile& kv, const std::string& key) {
  const auto v = kv.numbers(key);
  if (v.size() != 2) throw FingerError(ErrorCode::InvalidParams, key + " needs two numbers (lo hi)");
  return {v[0], v[1]};
}

std::string vec_text(const Vec3& v) { return fmt::format("{:.17g} {:.17g} {:.17g}", v.x(), v.y(), v.z()); }

Branch zero_root(const LoopSetup& s, double target, int loop) {
  const auto roots = trig_roots(loop_reduce(s.U, s.V, s.l, s.form), loop);
  return std::abs(wrap_angle(roots[0] - target)) <= std::abs(wrap_angle(roots[1] - target)) ? Branch::Plus
                                                                                               : Branch::Minus;
}

double zero_carriage_sign(const Vec3& W, double l) {
  const double root = std::sqrt(std::max(l * l - W.x() * W.x() - W.y() * W.y(), 0.0));
  return std::abs(-W.z() + root) < std::abs(-W.z() - root) ? 1.0 : -1.0;
}

}  // namespace

double KinematicParams::total_length() const {
  return std::hypot(OD_y, OD_z) + std::hypot(DG_y, DG_z) + std::abs(GI_z);
}

KinematicParams params_from_keyvalue(const KeyValueFile& kv) {
  KinematicParams p;
  p.OA = kv.vec3("OA_mm");
  p.AB = kv.vec3("AB_mm");
  p.AC = kv.vec3("AC_mm");
  p.AD = kv.vec3("AD_mm");
  p.DF = kv.vec3("DF_mm");
  p.DG = kv.vec3("DG_mm");
  p.GH = kv.vec3("GH_mm");
  p.DE = kv.vec3("DE_mm");
  p.P2 = kv.vec3("P2_mm");
  p.P3 = kv.vec3("P3_mm");
  p.l2 = kv.number("l2_mm");
  p.l3 = kv.number("l3_mm");
  p.l4 = kv.number("l4_mm");
  p.l5 = kv.number("l5_mm");
  p.OD_y = kv.number("OD_y_mm");
  p.OD_z = kv.number("OD_z_mm");
  p.DG_y = kv.number("DG_y_mm");
  p.DG_z = kv.number("DG_z_mm");
  p.GI_z = kv.number("GI_z_mm");
  p.beta_offset = kv.number_or("beta_offset_rad", 0.0);
  for (int i = 0; i < JointState::kSize; ++i) p.joint_limits[i] = range_of(kv, kJointKeys[i]);
  for (int i = 0; i < 3; ++i) p.motor_limits[i] = range_of(kv, kMotorKeys[i]);
  for (int i = 0; i < 3; ++i) p.v_max[i] = kv.number(kVmaxKeys[i]);
  return p;
}

std::string params_to_text(const KinematicParams& p) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  line("OA_mm", vec_text(p.OA));
  line("AB_mm", vec_text(p.AB));
  line("AC_mm", vec_text(p.AC));
  line("AD_mm", vec_text(p.AD));
  line("DF_mm", vec_text(p.DF));
  line("DG_mm", vec_text(p.DG));
  line("GH_mm", vec_text(p.GH));
  line("DE_mm", vec_text(p.DE));
  line("P2_mm", vec_text(p.P2));
  line("P3_mm", vec_text(p.P3));
  line("l2_mm", num(p.l2));
  line("l3_mm", num(p.l3));
  line("l4_mm", num(p.l4));
  line("l5_mm", num(p.l5));
  line("OD_y_mm", num(p.OD_y));
  line("OD_z_mm", num(p.OD_z));
  line("DG_y_mm", num(p.DG_y));
  line("DG_z_mm", num(p.DG_z));
  line("GI_z_mm", num(p.GI_z));
  line("beta_offset_rad", num(p.beta_offset));
  for (int i = 0; i < JointState::kSize; ++i)
    line(kJointKeys[i], num(p.joint_limits[i].lo) + " " + num(p.joint_limits[i].hi));
  for (int i = 0; i < 3; ++i) line(kMotorKeys[i], num(p.motor_limits[i].lo) + " " + num(p.motor_limits[i].hi));
  for (int i = 0; i < 3; ++i) line(kVmaxKeys[i], num(p.v_max[i]));
  return out;
}

void calibrate_branches(KinematicParams& p) {
  BranchCalibration& b = p.branches;
  b.loop2 = zero_root(loop2_setup(0.0, 0.0, p), 0.0, 2);
  b.loop3 = zero_root(loop3_setup(0.0, 0.0, 0.0, p), p.beta_offset, 3);
  b.loop4 = zero_root(loop4_setup(0.0, p), 0.0, 4);
  b.loop5 = zero_root(loop5_setup(0.0, p), 0.0, 5);
  b.loop4_inverse = zero_root(loop4_inverse_setup(0.0, p), p.beta_offset, 4);
  b.m2_root_sign = zero_carriage_sign(p.P2 - p.OA, p.l2);
  b.m3_root_sign = zero_carriage_sign(p.P3 - p.OA - rot_x(p.beta_offset) * p.AB, p.l3);
}

std::vector<ValidationIssue> validate_params(const KinematicParams& p) {
  std::vector<ValidationIssue> issues;
  auto issue = [&issues](int loop, std::string msg) { issues.push_back({loop, std::move(msg)}); };

  const double rods[4] = {p.l2, p.l3, p.l4, p.l5};
  for (int i = 0; i < 4; ++i)
    if (!(rods[i] > 0.0) || !std::isfinite(rods[i])) issue(i + 2, fmt::format("loop {}: l{} must be positive", i + 2, i + 2));

  const Vec3 OD = p.OA + p.AD;
  if (std::abs(OD.x()) > kClosureTol || std::abs(OD.y() - p.OD_y) > kClosureTol ||
      std::abs(OD.z() - p.OD_z) > kClosureTol)
    issue(0, fmt::format("OA + AD = ({:.6f}, {:.6f}, {:.6f}) disagrees with (0, OD_y, OD_z)", OD.x(), OD.y(), OD.z()));
  if (std::abs(p.DG.x()) > kClosureTol || std::abs(p.DG.y() - p.DG_y) > kClosureTol ||
      std::abs(p.DG.z() - p.DG_z) > kClosureTol)
    issue(0, "DG disagrees with (0, DG_y, DG_z)");

  for (int i = 0; i < JointState::kSize; ++i) {
    const Range& r = p.joint_limits[i];
    if (!(r.lo < r.hi) || !r.contains(0.0)) issue(0, fmt::format("{} must satisfy lo < 0 < hi", kJointKeys[i]));
  }
  for (int i = 0; i < 3; ++i) {
    const Range& r = p.motor_limits[i];
    if (!(r.lo < r.hi) || !r.contains(0.0)) issue(0, fmt::format("{} must satisfy lo < 0 < hi", kMotorKeys[i]));
    if (!(p.v_max[i] > 0.0)) issue(0, fmt::format("{} must be positive", kVmaxKeys[i]));
  }
  if (!issues.empty()) return issues;

  const double residuals[4] = {loop2_residual(0, 0, 0, p), loop3_residual(0, 0, 0, 0, p), loop4_residual(0, 0, p),
                               loop5_residual(0, 0, p)};
  for (int i = 0; i < 4; ++i)
    if (std::abs(residuals[i]) > kClosureTol)
      issue(i + 2, fmt::format("loop {} does not close at the zero configuration (residual {:.3e} mm)", i + 2,
                               residuals[i]));
  if (!issues.empty()) return issues;

  try {
    const JointState q0 = m2q(MotorState{}, p);
    for (int i = 0; i < JointState::kSize; ++i)
      if (std::abs(q0.get(i)) > kClosureTol) issue(0, "M = 0 does not map to Q = 0 with the calibrated branches");
    const MotorState m0 = q2m(JointState{}, p);
    if (m0.vec().norm() > kClosureTol) issue(0, "Q = 0 does not map to M = 0 with the calibrated roots");
  } catch (const FingerError& e) {
    issue(e.loop(), e.what());
    return issues;
  }

  // Motor box: every corner and grid point must solve inside the joint limits.
  for (int i = 0; i < kMotorSweep; ++i)
    for (int j = 0; j < kMotorSweep; ++j)
      for (int k = 0; k < kMotorSweep; ++k) {
        const double t[3] = {double(i) / (kMotorSweep - 1), double(j) / (kMotorSweep - 1),
                             double(k) / (kMotorSweep - 1)};
        MotorState m;
        m.m1 = p.motor_limits[0].lo + t[0] * p.motor_limits[0].width();
        m.m2 = p.motor_limits[1].lo + t[1] * p.motor_limits[1].width();
        m.m3 = p.motor_limits[2].lo + t[2] * p.motor_limits[2].width();
        try {
          m2q(m, p);
        } catch (const FingerError& e) {
          issue(e.loop(), fmt::format("motor box sweep at M = ({:.4f}, {:.4f}, {:.4f}): {}", m.m1, m.m2, m.m3,
                                      e.what()));
          return issues;
        }
      }

  // Joint ranges: the distal loops must close over the whole q3 / beta range.
  for (int i = 0; i < kJointSweep; ++i) {
    const double t = double(i) / (kJointSweep - 1);
    const double beta = p.joint_limits[4].lo + t * p.joint_limits[4].width();
    const double q3 = p.joint_limits[2].lo + t * p.joint_limits[2].width();
    if (loop_closure_margin(loop4_setup(beta, p)) > 1.0 + kAcosClamp)
      issue(4, fmt::format("loop 4 cannot close at beta = {:.4f} rad inside beta_limits_rad", beta));
    if (loop_closure_margin(loop5_setup(q3, p)) > 1.0 + kAcosClamp)
      issue(5, fmt::format("loop 5 cannot close at q3 = {:.4f} rad inside q3_limits_rad", q3));
    if (loop_closure_margin(loop4_inverse_setup(q3, p)) > 1.0 + kAcosClamp)
      issue(4, fmt::format("loop 4 cannot close at q3 = {:.4f} rad inside q3_limits_rad", q3));
    if (!issues.empty()) return issues;
    // The coupled angles must stay inside their own limits.
    try {
      solve_loop5(q3, p);
      solve_loop4_inverse(q3, p);
    } catch (const FingerError& e) {
      issue(e.loop(), fmt::format("q3 = {:.4f} rad inside q3_limits_rad: {}", q3, e.what()));
      return issues;
    }
  }
  return issues;
}

namespace {

KinematicParams finish_load(const KeyValueFile& kv) {
  KinematicParams p = params_from_keyvalue(kv);
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": unknown key '" + unused.front() + "'");
  try {
    calibrate_branches(p);
  } catch (const FingerError& e) {
    throw FingerError(ErrorCode::InvalidParams,
                      fmt::format("{}: loop {} cannot be calibrated at zero: {}", kv.origin(), e.loop(), e.what()),
                      e.loop());
  }
  const auto issues = validate_params(p);
  if (!issues.empty()) {
    const auto& first = issues.front();
    throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": " + first.message, first.loop);
  }
  return p;
}

}  // namespace

KinematicParams load_params(const std::string& path) { return finish_load(KeyValueFile::load(path)); }

KinematicParams load_params_from_text(const std::string& text) { return finish_load(KeyValueFile::parse(text)); }

}  // namespace fingerkin
