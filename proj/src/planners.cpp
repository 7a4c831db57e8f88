#include "fingerkin/planners.hpp"

#include <cmath>
#include <limits>

#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"

namespace fingerkin {

namespace {

constexpr double kSpeedSlack = 1e-9;

bool same_joints(const JointState& a, const JointState& b) {
  for (int i = 0; i < JointState::kSize; ++i)
    if (std::abs(a.get(i) - b.get(i)) > 1e-12) return false;
  return true;
}

}  // namespace

JointPlan plan_joint_space(const JointState& q_goal, const MotorState& m_cur, const KinematicParams& p,
                           const JointPlannerConfig& cfg) {
  return plan_joint_space(q_goal, m_cur, p.v_max, p, cfg);
}

JointPlan plan_joint_space(const JointState& q_goal, const MotorState& m_cur, const Vec3& v_max,
                           const KinematicParams& p, const JointPlannerConfig& cfg) {
  if (!(cfg.dt > 0) || !(cfg.delta > 0)) throw FingerError(ErrorCode::InvalidInput, "dt and delta must be positive");
  const JointState q_cur = m2q(m_cur, p);
  const MotorState m_goal = q2m(q_goal, p, m_cur);

  JointPlan plan;
  plan.dt = cfg.dt;
  if (same_joints(q_cur, q_goal)) {
    plan.setpoints = {m_cur};
    return plan;
  }

  double t = 0.0;
  for (int i = 0; i < 3; ++i) t = std::max(t, std::abs(m_goal[i] - m_cur[i]) / v_max[i]);

  for (;;) {
    const long n = std::max(1L, static_cast<long>(std::ceil(t / cfg.dt - 1e-9)));
    std::vector<MotorState> sp;
    sp.reserve(static_cast<std::size_t>(n) + 1);
    sp.push_back(m_cur);
    bool feasible = true;
    for (long k = 1; k <= n; ++k) {
      const JointState qk = lerp(q_cur, q_goal, double(k) / double(n));
      const MotorState mk = q2m(qk, p, sp.back());
      for (int i = 0; i < 3; ++i)
        if (std::abs(mk[i] - sp.back()[i]) / cfg.dt > v_max[i] * (1.0 + kSpeedSlack)) feasible = false;
      sp.push_back(mk);
    }
    if (feasible) {
      plan.setpoints = std::move(sp);
      plan.duration = double(n) * cfg.dt;
      return plan;
    }
    t += cfg.delta;
    ++plan.retries;
    if (t > cfg.max_duration)
      throw FingerError(ErrorCode::Infeasible, "no feasible duration below " + std::to_string(cfg.max_duration) + " s");
  }
}

double plan_speed_ratio(const JointPlan& plan, const Vec3& v_max) {
  double worst = 0.0;
  for (std::size_t k = 1; k < plan.setpoints.size(); ++k)
    for (int i = 0; i < 3; ++i)
      worst = std::max(worst, std::abs(plan.setpoints[k][i] - plan.setpoints[k - 1][i]) / plan.dt / v_max[i]);
  return worst;
}

std::string to_string(Plane plane) {
  switch (plane) {
    case Plane::Flexion: return "flexion";
    case Plane::Abduction: return "abduction";
    case Plane::Free: return "free";
  }
  return "free";
}

Plane plane_from_string(const std::string& s) {
  if (s == "flexion") return Plane::Flexion;
  if (s == "abduction") return Plane::Abduction;
  if (s == "free") return Plane::Free;
  throw FingerError(ErrorCode::InvalidInput, "unknown plane '" + s + "'");
}

double TaskPath::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) l += (waypoints[i] - waypoints[i - 1]).norm();
  return l;
}

bool TaskPath::closed(double tol) const {
  return waypoints.size() >= 2 && (waypoints.front() - waypoints.back()).norm() <= tol;
}

void validate_path(const TaskPath& path, int max_points) {
  const auto n = static_cast<int>(path.waypoints.size());
  if (n < 1) throw FingerError(ErrorCode::InvalidInput, "path has no waypoints");
  if (n > max_points)
    throw FingerError(ErrorCode::InvalidInput,
                      "path has " + std::to_string(n) + " waypoints, limit is " + std::to_string(max_points));
  if (!(path.v_desired > 0)) throw FingerError(ErrorCode::InvalidInput, "v_desired must be positive");
  for (int i = 0; i < n; ++i) {
    if (!path.waypoints[i].allFinite())
      throw FingerError(ErrorCode::InvalidInput, "waypoint " + std::to_string(i) + " is not finite");
    if (i > 0 && (path.waypoints[i] - path.waypoints[i - 1]).norm() < 1e-9)
      throw FingerError(ErrorCode::InvalidInput, "waypoints " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                                     " coincide");
  }
}

RmrcConfig rmrc_config_from_keyvalue(const KeyValueFile& kv, RmrcConfig c) {
  c.tolerance_mm = kv.number_or("tolerance_mm", c.tolerance_mm);
  c.v_desired = kv.number_or("v_desired_mm_s", c.v_desired);
  c.dt_ctrl = kv.number_or("dt_ctrl_s", c.dt_ctrl);
  c.fps = kv.number_or("fps", c.fps);
  c.max_points = static_cast<int>(kv.number_or("max_points", c.max_points));
  c.max_iterations = static_cast<int>(kv.number_or("max_iterations", c.max_iterations));
  c.joint.delta = kv.number_or("delta_s", c.joint.delta);
  c.joint.max_duration = kv.number_or("max_duration_s", c.joint.max_duration);
  c.joint.dt = c.dt_ctrl;
  if (!(c.tolerance_mm > 0) || !(c.v_desired > 0) || !(c.dt_ctrl > 0) || !(c.fps > 0) || !(c.joint.delta > 0) ||
      c.max_points < 1 || c.max_iterations < 0)
    throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": planner settings must be positive");
  const auto unused = kv.unused_keys();
  if (!unused.empty()) throw FingerError(ErrorCode::InvalidParams, kv.origin() + ": unknown key '" + unused.front() + "'");
  return c;
}

RateCommand resolve_task_velocity(const Vec3& xdot, const JacobianMatrix& J, const Vec3& v_max) {
  RateCommand rc;
  rc.xdot = xdot;
  if (xdot.isZero(0.0)) return rc;
  rc.mdot = solve_motor_rates(J, xdot);
  double ratio = 0.0;
  for (int i = 0; i < 3; ++i) ratio = std::max(ratio, std::abs(rc.mdot[i]) / v_max[i]);
  if (ratio > 1.0) {
    rc.scale = 1.0 / ratio;
    rc.mdot *= rc.scale;
  }
  return rc;
}

RateCommand rmrc_step(const Vec3& x_goal, const MotorState& m_cur, const RmrcConfig& cfg, const KinematicParams& p) {
  const JointState q = m2q(m_cur, p);
  const Vec3 e = x_goal - fk_joints(q, p);
  const double en = e.norm();
  if (en == 0.0) return {};
  return resolve_task_velocity(e / en * cfg.v_desired, jacobian(m_cur, q, p), p.v_max);
}

Execution execute_task_path(const TaskPath& path, const RmrcConfig& cfg, Plant& plant, const KinematicParams& p) {
  validate_path(path, cfg.max_points);
  if (!(cfg.tolerance_mm > 0) || !(cfg.dt_ctrl > 0) || !(cfg.fps > 0))
    throw FingerError(ErrorCode::InvalidInput, "tolerance, dt_ctrl and fps must be positive");
  if (plant.config().dt_sim > cfg.dt_ctrl / 2)
    throw FingerError(ErrorCode::InvalidInput, "dt_sim must be at most dt_ctrl / 2");

  Execution ex;
  const double dt = cfg.dt_ctrl;
  const double v = path.v_desired;
  const double step = v * dt;
  const auto& wp = path.waypoints;

  // Approach: joint-space move to the first waypoint, played back as rates.
  const MotorState m0 = plant.read();
  const JointState q0 = m2q(m0, p);
  const JointState q_first = x2q(FingertipPose::from(wp.front()), p, q0);
  JointPlannerConfig jcfg = cfg.joint;
  jcfg.dt = dt;
  ex.approach = plan_joint_space(q_first, m0, p, jcfg);
  for (std::size_t k = 1; k < ex.approach.setpoints.size(); ++k) {
    plant.command((ex.approach.setpoints[k].vec() - ex.approach.setpoints[k - 1].vec()) / dt);
    plant.advance(dt);
  }

  std::optional<JointState> hint = q_first;

  auto issue = [&](const Vec3& xdot, const MotorState& m, const JointState& q) {
    const JacobianMatrix J = jacobian(m, q, p);
    const RateCommand rc = resolve_task_velocity(xdot, J, p.v_max);
    if (rc.scale < 1.0) ++ex.scaled_steps;
    if (xdot.norm() > 0) {
      const Vec3 realized = J.J * rc.mdot;
      if (realized.norm() > 0)
        ex.max_direction_error =
            std::max(ex.max_direction_error, (realized.normalized() - xdot.normalized()).norm());
    }
    plant.command(rc.mdot);
    plant.advance(dt);
  };

  const int n = static_cast<int>(wp.size());
  for (int i = 0; i < n; ++i) {
    const Vec3& goal = wp[i];
    const bool last = i + 1 == n;
    const Vec3 u_next = last ? Vec3::Zero() : Vec3((wp[i + 1] - goal).normalized());

    MotorState m = plant.read();
    JointState q = m2q(m, p, hint);
    const double seg = i == 0 ? (goal - fk_joints(q, p)).norm() : (goal - wp[i - 1]).norm();
    const int cap = cfg.max_iterations > 0 ? cfg.max_iterations
                                           : std::max(10, 10 * static_cast<int>(std::ceil(seg / step)));

    double prev = std::numeric_limits<double>::infinity();
    bool landed = false;
    std::vector<double> seen;
    for (int it = 0;; ++it) {
      if (it > 0) {
        m = plant.read();
        q = m2q(m, p, hint);
      }
      hint = q;
      const Vec3 e = goal - fk_joints(q, p);
      const double en = e.norm();
      const bool within = e.cwiseAbs().maxCoeff() <= cfg.tolerance_mm;
      const bool stalled = en >= prev;
      seen.push_back(en);

      if (within && (stalled || (!last && en <= step) || (last && landed) || en == 0.0)) {
        ex.waypoints.push_back({i, it, e, std::move(seen)});
        // The measured path starts once the first waypoint has converged.
        if (i == 0) ex.t_start = plant.time();
        // Spend what is left of this control period on the next segment.
        if (!last && en <= step) issue((e + (step - en) * u_next) / dt, m, q);
        break;
      }
      if (it >= cap)
        throw FingerError(ErrorCode::WaypointTimeout,
                          "waypoint " + std::to_string(i) + " not reached after " + std::to_string(cap) +
                              " control steps (error " + std::to_string(en) + " mm)");
      if (en <= step) {
        issue(e / dt, m, q);
        landed = true;
      } else {
        issue(e / en * v, m, q);
      }
      prev = en;
    }
  }

  plant.command(Vec3::Zero());
  ex.t_end = plant.time();
  const double span = ex.t_end - ex.t_start;
  const double duration = std::ceil(span * cfg.fps - 1e-9) / cfg.fps;
  const double settle = ex.t_start + duration - plant.time();
  if (settle > 0) plant.advance_steps(static_cast<long>(std::ceil(settle / plant.config().dt_sim)) + 1);
  ex.trace = sample_trace(plant, cfg.fps, duration, ex.t_start);
  return ex;
}

}  // namespace fingerkin
