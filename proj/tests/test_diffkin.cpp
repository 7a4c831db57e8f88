#include <doctest.h>

#include <random>

#include "fingerkin/diffkin.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "support.hpp"

using namespace fingerkin;

namespace {
MotorState bump(MotorState m, int i, double h) {
  (i == 0 ? m.m1 : (i == 1 ? m.m2 : m.m3)) += h;
  return m;
}

bool close_rel(double a, double b, double rel = 1e-5, double floor = 1e-9) {
  return std::abs(a - b) <= std::max(floor, rel * std::max(std::abs(a), std::abs(b)));
}
}  // namespace

TEST_CASE("loop partials at home") {
  const auto& p = support::params();
  const LoopPartials d = loop_partials({}, {}, p);
  CHECK(d(0, 0) == 1.0);
  CHECK(d(0, 1) == 0.0);
  CHECK(d(0, 2) == 0.0);
  CHECK(d(1, 2) == 0.0);
}

TEST_CASE("loop partials match central differences of m2q") {
  const auto& p = support::params();
  std::mt19937_64 rng(41);
  const double h = 1e-6;
  int q3_m2_nonzero = 0;
  for (int n = 0; n < 200; ++n) {
    const MotorState m = support::random_motor(rng, p, 0.98);
    const JointState q = m2q(m, p);
    const LoopPartials d = loop_partials(m, q, p);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(0, 2) == 0.0);
    CHECK(d(1, 2) == 0.0);
    for (int i = 0; i < 3; ++i) {
      const JointState a = m2q(bump(m, i, h), p, q), b = m2q(bump(m, i, -h), p, q);
      for (int j = 0; j < JointState::kSize; ++j) {
        const double fd = (a.get(j) - b.get(j)) / (2 * h);
        // Differences of m2q carry ~1e-16 / 1e-6 of noise; the floor reflects that.
        CHECK_MESSAGE(close_rel(d(j, i), fd, 1e-5, 1e-8), "joint " << j << " motor " << i);
      }
    }
    if (std::abs(d(2, 1)) > 1e-6) ++q3_m2_nonzero;
  }
  CHECK(q3_m2_nonzero > 150);
}

TEST_CASE("Jacobian matches central differences of fk") {
  const auto& p = support::params();
  std::mt19937_64 rng(43);
  const double h = 1e-6;
  for (int n = 0; n < 200; ++n) {
    const MotorState m = support::random_motor(rng, p, 0.98);
    const JointState q = m2q(m, p);
    const JacobianMatrix J = jacobian(m, q, p);
    for (int i = 0; i < 3; ++i) {
      const Vec3 fd = ((support::fk_long(bump(m, i, h), q, p) - support::fk_long(bump(m, i, -h), q, p)) / (2 * h)).cast<double>();
      for (int r = 0; r < 3; ++r) CHECK(close_rel(J.J(r, i), fd[r], 1e-5, 1e-9));
    }
    CHECK(J.cond >= 1.0);
  }
}

TEST_CASE("home Jacobian: abduction column is out of plane") {
  const auto& p = support::params();
  const JacobianMatrix J = jacobian(MotorState{}, p);
  const Vec3 x = fk({}, p).vec();
  CHECK(J.J(0, 0) == doctest::Approx(x.z()));
  CHECK(std::abs(J.J(1, 0)) < 1e-12);
  CHECK(std::abs(J.J(2, 0)) < 1e-12);
  CHECK(std::abs(J.J(0, 1)) < 1e-12);
  CHECK(std::abs(J.J(0, 2)) < 1e-12);
}

TEST_CASE("first-order prediction error shrinks quadratically") {
  const auto& p = support::params();
  const MotorState m{0.1, -4, -5};
  const JacobianMatrix J = jacobian(m, p);
  const Vec3 x0 = fk(m, p).vec();
  const Vec3 dir(0.05, 0.4, -0.3);
  auto err = [&](double s) {
    const Vec3 dm = s * dir;
    return (fk(MotorState::from(m.vec() + dm), p).vec() - (x0 + J.J * dm)).norm();
  };
  const double e1 = err(0.2), e2 = err(0.1), e3 = err(0.05);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("solve_motor_rates") {
  const auto& p = support::params();
  const JacobianMatrix J = jacobian(MotorState{0.05, -3, -4}, p);
  CHECK(solve_motor_rates(J, Vec3::Zero()).norm() == 0.0);
  const Vec3 ones = solve_motor_rates(J, J.J * Vec3::Ones());
  CHECK((ones - Vec3::Ones()).cwiseAbs().maxCoeff() < 1e-9);
  const Vec3 xd(1, -2, 3);
  CHECK((J.J * solve_motor_rates(J, xd) - xd).norm() < 1e-9);
  for (double a : {1.0, 0.5, 0.1}) CHECK((solve_motor_rates(J, a * xd) - a * solve_motor_rates(J, xd)).norm() < 1e-12);

  JacobianMatrix bad;
  bad.J << 1, 0, 0, 0, 1, 0, 0, 0, 1e-10;
  bad.cond = 1e10;
  bad.det = 1e-10;
  try {
    solve_motor_rates(bad, xd);
    FAIL("expected NearSingular");
  } catch (const FingerError& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
  }
}

TEST_CASE("adjugate inverse agrees with a pivoted LU solve") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 200; ++n) {
    Mat3 a;
    for (int i = 0; i < 9; ++i) a(i) = u(rng);
    a += 2.0 * Mat3::Identity();
    const Vec3 b(u(rng), u(rng), u(rng));
    CHECK((inverse3(a) * b - a.partialPivLu().solve(b)).norm() < 1e-12);
  }
}
