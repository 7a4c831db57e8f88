#include <doctest.h>

#include <algorithm>
#include <random>

#include "fingerkin/benchmark.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/planners.hpp"
#include "support.hpp"

using namespace fingerkin;

namespace {
JointState random_goal(std::mt19937_64& rng, const KinematicParams& p) { return m2q(support::random_motor(rng, p), p); }
}  // namespace

TEST_CASE("joint plan to the current pose is a single setpoint") {
  const auto& p = support::params();
  const MotorState m{0.1, -2, -3};
  const JointPlan plan = plan_joint_space(m2q(m, p), m, p);
  CHECK(plan.setpoints.size() == 1);
  CHECK(plan.duration == 0.0);
}

TEST_CASE("small joint move needs no retry") {
  const auto& p = support::params();
  const MotorState m{0.0, -3, -4};
  JointState g = m2q(m, p);
  g.q1 += 0.01;
  const JointPlan plan = plan_joint_space(g, m, p);
  CHECK(plan.retries == 0);
  CHECK(plan_speed_ratio(plan, p.v_max) <= 1.0 + 1e-9);
  CHECK((plan.setpoints.back().vec() - q2m(g, p).vec()).norm() < 1e-9);
}

TEST_CASE("random plans are feasible and some need a retry") {
  const auto& p = support::params();
  std::mt19937_64 rng(53);
  int retried = 0;
  for (int n = 0; n < 100; ++n) {
    const MotorState start = support::random_motor(rng, p);
    const JointState goal = random_goal(rng, p);
    const JointPlan plan = plan_joint_space(goal, start, p);
    CHECK(plan_speed_ratio(plan, p.v_max) <= 1.0 + 1e-9);
    if (plan.retries > 0) ++retried;
  }
  MESSAGE(retried << " of 100 plans extended their duration");
  CHECK(retried >= 1);
}

TEST_CASE("planner gives up past the duration cap") {
  const auto& p = support::params();
  std::mt19937_64 rng(53);
  for (int n = 0; n < 200; ++n) {
    const MotorState start = support::random_motor(rng, p);
    const JointState goal = random_goal(rng, p);
    const JointPlan plan = plan_joint_space(goal, start, p);
    if (plan.retries == 0) continue;
    JointPlannerConfig cfg;
    cfg.max_duration = plan.duration - cfg.delta - 1e-6;
    try {
      plan_joint_space(goal, start, p, cfg);
      FAIL("expected Infeasible");
    } catch (const FingerError& e) {
      CHECK(e.code() == ErrorCode::Infeasible);
    }
    return;
  }
  FAIL("no retry case found");
}

TEST_CASE("rmrc_step") {
  const auto& p = support::params();
  RmrcConfig cfg;
  const MotorState m{0.05, -3, -4};
  const Vec3 x = fk(m, p).vec();
  CHECK(rmrc_step(x, m, cfg, p).mdot.norm() == 0.0);

  const Vec3 goal = x + Vec3(0.3, 1.0, -0.5);
  const RateCommand rc = rmrc_step(goal, m, cfg, p);
  const Vec3 xhat = (goal - x).normalized();
  CHECK(rc.scale == 1.0);
  CHECK((jacobian(m, p).J * rc.mdot - cfg.v_desired * xhat).norm() < 1e-9);

  cfg.v_desired = 500;
  const RateCommand fast = rmrc_step(goal, m, cfg, p);
  CHECK(fast.scale < 1.0);
  double ratio = 0;
  for (int i = 0; i < 3; ++i) ratio = std::max(ratio, std::abs(fast.mdot[i]) / p.v_max[i]);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(((jacobian(m, p).J * fast.mdot).normalized() - xhat).norm() < 1e-9);
}

TEST_CASE("path validation") {
  TaskPath path;
  CHECK_THROWS_AS(validate_path(path), FingerError);
  path.waypoints = {Vec3(0, 60, 40), Vec3(0, 60, 40)};
  CHECK_THROWS_AS(validate_path(path), FingerError);
  path.waypoints.assign(51, Vec3::Zero());
  for (int i = 0; i < 51; ++i) path.waypoints[i] = Vec3(0, 60 + 0.1 * i, 40);
  CHECK_THROWS_AS(validate_path(path), FingerError);
  CHECK_NOTHROW(validate_path(path, 60));
  path.v_desired = 0;
  CHECK_THROWS_AS(validate_path(path, 60), FingerError);
}

TEST_CASE("single waypoint at the current pose") {
  const auto& p = support::params();
  Plant plant(p, plant_preset("perfect"));
  TaskPath path;
  path.waypoints = {fk({}, p).vec()};
  const Execution ex = execute_task_path(path, RmrcConfig{}, plant, p);
  CHECK(ex.approach.setpoints.size() == 1);
  REQUIRE(ex.waypoints.size() == 1);
  CHECK(ex.waypoints[0].iterations == 0);
  CHECK(ex.trace.size() == 1);
}

TEST_CASE("a 40 mm square does not fit the default finger") {
  const auto& p = support::params();
  BenchmarkSpec spec;
  spec.size_mm = 40;
  try {
    generate_path(spec, p);
    FAIL("expected Unreachable");
  } catch (const FingerError& e) {
    CHECK(e.code() == ErrorCode::Unreachable);
    CHECK(std::string(e.what()).find("waypoint") != std::string::npos);
  }
}

TEST_CASE("largest square that fits, 10 mm/s, perfect plant") {
  const auto& p = support::params();
  BenchmarkSpec spec;
  spec.size_mm = 28;
  spec.center = Vec3(0, 62, 34);
  const TaskPath path = generate_path(spec, p);
  Plant plant(p, plant_preset("perfect"));
  RmrcConfig cfg;
  const Execution ex = execute_task_path(path, cfg, plant, p);
  REQUIRE(ex.waypoints.size() == path.waypoints.size());
  for (const auto& w : ex.waypoints) CHECK(w.final_error.cwiseAbs().maxCoeff() <= cfg.tolerance_mm);
}

TEST_CASE("step path runs at 5 mm/s between corners") {
  const auto& p = support::params();
  BenchmarkSpec spec;
  spec.shape = Shape::Step;
  const TaskPath path = generate_path(spec, p);
  CHECK(path.v_desired == 5.0);
  Plant plant(p, plant_preset("perfect"));
  const Execution ex = execute_task_path(path, RmrcConfig{}, plant, p);
  CHECK(ex.waypoints.size() == path.waypoints.size());
  std::vector<double> speeds;
  for (std::size_t k = 1; k < ex.trace.size(); ++k) speeds.push_back((ex.trace.x[k] - ex.trace.x[k - 1]).norm() * ex.trace.fps);
  std::nth_element(speeds.begin(), speeds.begin() + speeds.size() / 2, speeds.end());
  CHECK(speeds[speeds.size() / 2] == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("error is non-increasing once inside one control step") {
  const auto& p = support::params();
  for (const auto& spec : standard_benchmarks()) {
    const TaskPath path = generate_path(spec, p);
    Plant plant(p, plant_preset("perfect"));
    RmrcConfig cfg;
    const Execution ex = execute_task_path(path, cfg, plant, p);
    const double step = path.v_desired * cfg.dt_ctrl;
    for (const auto& w : ex.waypoints) {
      bool inside = false;
      for (std::size_t k = 0; k < w.errors.size(); ++k) {
        if (inside) CHECK(w.errors[k] <= w.errors[k - 1] + 1e-12);
        inside = inside || w.errors[k] <= step;
      }
    }
    CHECK(ex.max_direction_error < 1e-9);
  }
}

TEST_CASE("forced velocity scaling keeps the direction") {
  const auto& p = support::params();
  BenchmarkSpec spec;
  spec.v_desired = 60;
  const TaskPath path = generate_path(spec, p);
  Plant plant(p, plant_preset("perfect"));
  const Execution ex = execute_task_path(path, RmrcConfig{}, plant, p);
  CHECK(ex.scaled_steps > 0);
  CHECK(ex.max_direction_error < 1e-9);
  CHECK(ex.waypoints.size() == path.waypoints.size());
}

TEST_CASE("iteration cap raises WaypointTimeout") {
  const auto& p = support::params();
  const TaskPath path = generate_path(BenchmarkSpec{}, p);
  Plant plant(p, plant_preset("perfect"));
  RmrcConfig cfg;
  cfg.max_iterations = 3;
  try {
    execute_task_path(path, cfg, plant, p);
    FAIL("expected WaypointTimeout");
  } catch (const FingerError& e) {
    CHECK(e.code() == ErrorCode::WaypointTimeout);
    CHECK(std::string(e.what()).find("waypoint 1") != std::string::npos);
  }
}

TEST_CASE("planner config file") {
  const auto kv = KeyValueFile::parse("tolerance_mm = 0.05\nv_desired_mm_s = 8\ndelta_s = 0.5\n");
  const RmrcConfig c = rmrc_config_from_keyvalue(kv);
  CHECK(c.tolerance_mm == 0.05);
  CHECK(c.v_desired == 8);
  CHECK(c.joint.delta == 0.5);
  CHECK_THROWS_AS(rmrc_config_from_keyvalue(KeyValueFile::parse("tolerance = 1\n")), FingerError);
  CHECK_THROWS_AS(rmrc_config_from_keyvalue(KeyValueFile::parse("dt_ctrl_s = 0\n")), FingerError);
}
