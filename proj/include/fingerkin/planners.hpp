#pragma once

#include <string>
#include <vector>

#include "fingerkin/diffkin.hpp"
#include "fingerkin/params.hpp"
#include "fingerkin/plant.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

struct JointPlan {
  std::vector<MotorState> setpoints;  // setpoints[0] is the starting motor state
  double dt = 0.01;
  double duration = 0.0;
  int retries = 0;  // times the duration was extended by delta
};

struct JointPlannerConfig {
  double dt = 0.01;
  double delta = 0.25;
  double max_duration = 60.0;
};

/// Joint-space interpolation with the motor-speed feasibility loop. The
/// duration starts at max |dM_i| / v_max_i and grows by delta until every
/// per-step motor speed is within v_max. M_goal = q2m(Q_goal).
JointPlan plan_joint_space(const JointState& q_goal, const MotorState& m_cur, const KinematicParams& p,
                           const JointPlannerConfig& cfg = {});
JointPlan plan_joint_space(const JointState& q_goal, const MotorState& m_cur, const Vec3& v_max,
                           const KinematicParams& p, const JointPlannerConfig& cfg = {});

/// Largest per-step |dM_i / dt| / v_max_i over the plan; <= 1 when feasible.
double plan_speed_ratio(const JointPlan& plan, const Vec3& v_max);

enum class Plane { Flexion, Abduction, Free };

std::string to_string(Plane plane);
Plane plane_from_string(const std::string& s);

struct TaskPath {
  std::vector<Vec3> waypoints;
  double v_desired = 10.0;
  Plane plane = Plane::Free;

  double length() const;
  bool closed(double tol = 1e-9) const;
};

/// Throws InvalidInput unless 1 <= N <= max_points and consecutive waypoints differ.
void validate_path(const TaskPath& path, int max_points = 50);

struct RmrcConfig {
  double tolerance_mm = 0.1;
  double v_desired = 10.0;
  double dt_ctrl = 0.01;
  int max_iterations = 0;  // per waypoint; 0 derives it from the segment length
  int max_points = 50;
  double fps = 30.0;
  JointPlannerConfig joint;
};

/// Keys: tolerance_mm, v_desired_mm_s, dt_ctrl_s, delta_s, fps, max_points,
/// max_iterations, max_duration_s. Missing keys keep their defaults.
RmrcConfig rmrc_config_from_keyvalue(const KeyValueFile& kv, RmrcConfig base = {});

struct RateCommand {
  Vec3 mdot = Vec3::Zero();
  Vec3 xdot = Vec3::Zero();  // requested task velocity before scaling
  double scale = 1.0;        // common factor applied to keep every motor under v_max
};

/// Mdot = J^-1 xdot, then every component shrinks by one common factor if any
/// motor would exceed its speed limit, so the task direction is preserved.
RateCommand resolve_task_velocity(const Vec3& xdot, const JacobianMatrix& J, const Vec3& v_max);

/// One step of the rate controller toward X_goal at v_desired.
RateCommand rmrc_step(const Vec3& x_goal, const MotorState& m_cur, const RmrcConfig& cfg, const KinematicParams& p);

struct WaypointReport {
  int index = 0;
  int iterations = 0;
  Vec3 final_error = Vec3::Zero();  // goal - fk(encoders) at handoff
  std::vector<double> errors;       // |E| seen at each control step, handoff included
};

struct Execution {
  TrialTrace trace;
  JointPlan approach;
  std::vector<WaypointReport> waypoints;
  double t_start = 0.0;  // plant time when the first waypoint converged; the trace starts here
  double t_end = 0.0;    // plant time of the final zero-velocity command
  double max_direction_error = 0.0;  // worst |J Mdot / |J Mdot| - xdot / |xdot||
  int scaled_steps = 0;
};

/// Moves to the first waypoint through the joint planner, then drives the rate
/// controller through every waypoint until all axes are within tolerance.
/// Throws WaypointTimeout naming the waypoint if the iteration cap is hit.
Execution execute_task_path(const TaskPath& path, const RmrcConfig& cfg, Plant& plant, const KinematicParams& p);

}  // namespace fingerkin
