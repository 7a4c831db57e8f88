#include <doctest.h>

#include <regex>

#include "fingerkin/csv_io.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/loops.hpp"
#include "support.hpp"

using namespace fingerkin;

namespace {
std::string default_text() { return read_text(std::string(FINGERKIN_DATA_DIR) + "/default_params.cfg"); }

std::string replace_key(const std::string& text, const std::string& key, const std::string& value) {
  return std::regex_replace(text, std::regex("(^|\n)" + key + " *=[^\n]*"), "$1" + key + " = " + value);
}

int failing_loop(const std::string& text) {
  try {
    load_params_from_text(text);
  } catch (const FingerError& e) {
    CHECK(e.code() == ErrorCode::InvalidParams);
    return e.loop();
  }
  return -1;
}
}  // namespace

TEST_CASE("default parameters load and close at zero") {
  const auto& p = support::params();
  CHECK(validate_params(p).empty());
  CHECK(std::abs(loop2_residual(0, 0, 0, p)) <= 1e-9);
  CHECK(std::abs(loop3_residual(0, 0, 0, 0, p)) <= 1e-9);
  CHECK(std::abs(loop4_residual(0, 0, p)) <= 1e-9);
  CHECK(std::abs(loop5_residual(0, 0, p)) <= 1e-9);
  CHECK((p.OA + p.AD - Vec3(0, p.OD_y, p.OD_z)).norm() < 1e-9);
  CHECK(p.total_length() > 95.0);
  CHECK(p.total_length() < 96.0);
}

TEST_CASE("broken rods name their loop") {
  const std::string t = default_text();
  CHECK(failing_loop(replace_key(t, "l2_mm", "25")) == 2);
  CHECK(failing_loop(replace_key(t, "l3_mm", "27")) == 3);
  CHECK(failing_loop(replace_key(t, "l4_mm", "31.5")) == 4);
  CHECK(failing_loop(replace_key(t, "l5_mm", "31")) == 5);
  CHECK(failing_loop(replace_key(t, "l3_mm", "-1")) == 3);
}

TEST_CASE("parameter file errors") {
  const std::string t = default_text();
  CHECK_THROWS_AS(load_params_from_text(t + "\nmystery_mm = 3\n"), FingerError);
  CHECK_THROWS_AS(load_params_from_text(replace_key(t, "m2_limits_mm", "1 -10")), FingerError);
  CHECK_THROWS_AS(load_params_from_text(replace_key(t, "OD_z_mm", "41")), FingerError);
  CHECK_THROWS_AS(load_params("/nonexistent/params.cfg"), FingerError);
}

TEST_CASE("params_to_text round trip") {
  const auto& p = support::params();
  const auto q = load_params_from_text(params_to_text(p));
  CHECK(q.l2 == p.l2);
  CHECK(q.P3 == p.P3);
  CHECK(q.joint_limits[4].lo == p.joint_limits[4].lo);
  CHECK(q.v_max == p.v_max);
}

TEST_CASE("motor limits map inside joint limits at the corners") {
  const auto& p = support::params();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const MotorState m{a ? p.motor_limits[0].hi : p.motor_limits[0].lo, b ? p.motor_limits[1].hi : p.motor_limits[1].lo,
                           c ? p.motor_limits[2].hi : p.motor_limits[2].lo};
        const JointState q = m2q(m, p);
        for (int i = 0; i < JointState::kSize; ++i) CHECK(p.joint_limits[i].contains(q.get(i)));
      }
}
