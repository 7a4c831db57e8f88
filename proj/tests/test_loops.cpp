#include <doctest.h>

#include <random>

#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/loops.hpp"
#include "support.hpp"

using namespace fingerkin;
namespace orc = support::oracle;

TEST_CASE("loops at home") {
  const auto& p = support::params();
  CHECK(std::abs(solve_loop2(0, 0, p)) < 1e-9);
  CHECK(std::abs(solve_loop3(0, 0, 0, p)) < 1e-9);
  CHECK(std::abs(solve_loop4(0, p)) < 1e-9);
  CHECK(std::abs(solve_loop5(0, p)) < 1e-9);
  CHECK(std::abs(solve_loop4_inverse(0, p)) < 1e-9);
}

TEST_CASE("loop 2 against the residual sweep") {
  const auto& p = support::params();
  const double mid = p.motor_limits[1].mid();
  for (double q1 : {0.0, 0.3}) {
    const double q2 = solve_loop2(mid, q1, p);
    CHECK(std::abs(orc::loop2(mid, q1, q2, p)) <= 1e-9);
    CHECK(support::sweep_distance([&](double q) { return orc::loop2(mid, q1, q, p); }, q2) <= support::kSweepTol);
  }
}

TEST_CASE("loop 3 against the residual sweep") {
  const auto& p = support::params();
  const double mid = p.motor_limits[2].mid();
  const double beta = solve_loop3(mid, 0, 0, p);
  CHECK(support::sweep_distance([&](double b) { return orc::loop3(mid, 0, 0, b, p); }, beta) <= support::kSweepTol);
  // Same carriage, different flexion: the loop still closes.
  for (double q2 : {0.0, 0.2, -0.5}) {
    const double b = solve_loop3(-3.0, 0.0, q2, p);
    CHECK(std::abs(orc::loop3(-3.0, 0.0, q2, b, p)) <= 1e-9);
    CHECK(support::sweep_distance([&](double x) { return orc::loop3(-3.0, 0.0, q2, x, p); }, b) <= support::kSweepTol);
  }
}

TEST_CASE("loop 4 against the residual sweep and independent of q2") {
  const auto& p = support::params();
  const double beta = p.joint_limits[4].mid();
  const double q3 = solve_loop4(beta, p);
  CHECK(std::abs(orc::loop4(beta, q3, p)) <= 1e-9);
  CHECK(support::sweep_distance([&](double q) { return orc::loop4(beta, q, p); }, q3) <= support::kSweepTol);
  // Two motor states sharing beta but with different q2 give the same q3.
  const JointState a = m2q({0, 0, -4}, p);
  const double b_only = solve_loop4(a.beta, p);
  CHECK(a.q3 == b_only);
}

TEST_CASE("loop 5 against the residual sweep, monotone coupling") {
  const auto& p = support::params();
  const double q3m = p.joint_limits[2].mid();
  const double q4 = solve_loop5(q3m, p);
  CHECK(support::sweep_distance([&](double q) { return orc::loop5(q3m, q, p); }, q4) <= support::kSweepTol);

  const auto& r = p.joint_limits[2];
  double prev = solve_loop5(r.lo, p);
  int increasing = 0;
  for (int k = 1; k < 100; ++k) {
    const double q = solve_loop5(r.lo + r.width() * k / 99.0, p, prev);
    if (q > prev) ++increasing;
    prev = q;
  }
  MESSAGE("q4(q3) increasing on " << increasing << " of 99 intervals");
  CHECK(increasing == 99);
}

TEST_CASE("all four residuals vanish for random motor states") {
  const auto& p = support::params();
  std::mt19937_64 rng(3);
  for (int n = 0; n < 300; ++n) {
    const MotorState m = support::random_motor(rng, p);
    const JointState q = m2q(m, p);
    CHECK(std::abs(orc::loop2(m.m2, q.q1, q.q2, p)) <= 1e-9);
    CHECK(std::abs(orc::loop3(m.m3, q.q1, q.q2, q.beta, p)) <= 1e-9);
    CHECK(std::abs(orc::loop4(q.beta, q.q3, p)) <= 1e-9);
    CHECK(std::abs(orc::loop5(q.q3, q.q4, p)) <= 1e-9);
  }
}

TEST_CASE("loop errors carry the loop index") {
  const auto& p = support::params();
  try {
    solve_loop2(80.0, 0.0, p);
    FAIL("expected a throw");
  } catch (const FingerError& e) {
    CHECK(e.loop() == 2);
  }
  try {
    solve_loop4(-0.5, p);
    FAIL("expected a throw");
  } catch (const FingerError& e) {
    CHECK(e.code() == ErrorCode::Unsolvable);
    CHECK(e.loop() == 4);
  }
  try {
    solve_loop5(0.6, p);
    FAIL("expected a throw");
  } catch (const FingerError& e) {
    MESSAGE(std::string(e.what()));
    CHECK(e.loop() == 5);
  }
}

TEST_CASE("carriage roots invert the loops") {
  const auto& p = support::params();
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const MotorState m = support::random_motor(rng, p);
    const JointState q = m2q(m, p);
    CHECK(motor_for_loop2(q.q1, q.q2, p) == doctest::Approx(m.m2).epsilon(1e-9));
    CHECK(std::abs(motor_for_loop3(q.q1, q.q2, q.beta, p) - m.m3) < 1e-9);
  }
}

TEST_CASE("branch continuity along a 1 kHz motor path") {
  const auto& p = support::params();
  // Full-speed sweep corner to corner; per-sample joint steps must stay small.
  const MotorState a{p.motor_limits[0].lo, p.motor_limits[1].hi, p.motor_limits[2].hi};
  const MotorState b{p.motor_limits[0].hi, p.motor_limits[1].lo, p.motor_limits[2].lo};
  const double T = std::max({(b.m1 - a.m1) / p.v_max[0], (a.m2 - b.m2) / p.v_max[1], (a.m3 - b.m3) / p.v_max[2]});
  const int n = static_cast<int>(T * 1000);
  JointState prev = m2q(a, p);
  double worst = 0;
  for (int k = 1; k <= n; ++k) {
    const double t = double(k) / n;
    const MotorState m = MotorState::from(a.vec() + t * (b.vec() - a.vec()));
    const JointState q = m2q(m, p, prev);
    for (int i = 0; i < JointState::kSize; ++i) worst = std::max(worst, std::abs(q.get(i) - prev.get(i)));
    prev = q;
  }
  // Motor steps are at most ~0.012 mm per sample; joint gains stay below a few rad per mm.
  CHECK(worst < 0.05);
}
