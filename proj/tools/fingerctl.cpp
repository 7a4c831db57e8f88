// fingerctl: command-line front end for the finger kinematics toolkit.
// Angles are degrees on the command line and radians in every file.

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/format.h>
#include <iostream>
#include <numbers>

#include "fingerkin/benchmark.hpp"
#include "fingerkin/csv_io.hpp"
#include "fingerkin/diffkin.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/loops.hpp"
#include "fingerkin/metrics.hpp"
#include "fingerkin/planners.hpp"
#include "fingerkin/plant.hpp"

using namespace fingerkin;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidParams:
    case ErrorCode::InvalidInput:
    case ErrorCode::EmptyInput:
    case ErrorCode::NonPositiveSigma:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NotClosed:
    case ErrorCode::Io:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

struct Common {
  std::string params = std::string(FINGERKIN_DATA_DIR) + "/default_params.cfg";
  std::string planner;
  std::string plant_config;
  std::string preset = "perfect";
  std::uint64_t seed = 1;
};

RmrcConfig planner_config(const Common& c) {
  return c.planner.empty() ? RmrcConfig{} : rmrc_config_from_keyvalue(KeyValueFile::load(c.planner));
}

PlantConfig plant_config(const Common& c) {
  return c.plant_config.empty() ? plant_preset(c.preset) : load_plant_config(c.plant_config);
}

void print_joints(const JointState& q) {
  fmt::print("q1_deg,q2_deg,q3_deg,q4_deg,beta_deg\n{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", deg(q.q1), deg(q.q2),
             deg(q.q3), deg(q.q4), deg(q.beta));
}

// Joint state with q4 and beta filled in from the linkage.
JointState coupled_joints(double q1, double q2, double q3, const KinematicParams& p) {
  JointState q;
  q.q1 = q1;
  q.q2 = q2;
  q.q3 = q3;
  q.q4 = solve_loop5(q3, p);
  q.beta = solve_loop4_inverse(q3, p);
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinematics, planning and benchmark harness for a linkage-driven robotic finger"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--params", common.params, "Finger parameter file")->capture_default_str();
  app.add_option("--seed", common.seed, "Seed for plant noise")->capture_default_str();

  // validate-params
  auto* validate = app.add_subcommand("validate-params", "Load, calibrate and check a parameter file");
  bool dump = false;
  validate->add_flag("--dump", dump, "Print the parameters back in file format");

  // fk
  auto* fk_cmd = app.add_subcommand("fk", "Fingertip position for motor positions");
  double m1_deg = 0, m2 = 0, m3 = 0;
  fk_cmd->add_option("--m1-deg", m1_deg, "Abduction motor angle, degrees");
  fk_cmd->add_option("--m2", m2, "Carriage 2 position, mm");
  fk_cmd->add_option("--m3", m3, "Carriage 3 position, mm");

  // ik
  auto* ik_cmd = app.add_subcommand("ik", "Motor positions for a fingertip position");
  double x = 0, y = 0, z = 0;
  ik_cmd->add_option("--x", x, "mm")->required();
  ik_cmd->add_option("--y", y, "mm")->required();
  ik_cmd->add_option("--z", z, "mm")->required();

  // jacobian
  auto* jac_cmd = app.add_subcommand("jacobian", "Motor-space Jacobian as CSV");
  jac_cmd->add_option("--m1-deg", m1_deg, "Abduction motor angle, degrees");
  jac_cmd->add_option("--m2", m2, "mm");
  jac_cmd->add_option("--m3", m3, "mm");

  // plan-joint
  auto* plan_cmd = app.add_subcommand("plan-joint", "Joint-space plan from the current motors to a goal");
  double q1_deg = 0, q2_deg = 0, q3_deg = 0;
  double from_m1_deg = 0, from_m2 = 0, from_m3 = 0;
  double plan_dt = 0.01, delta = 0.25;
  std::string plan_out;
  plan_cmd->add_option("--q1-deg", q1_deg, "Goal abduction, degrees");
  plan_cmd->add_option("--q2-deg", q2_deg, "Goal MCP flexion, degrees");
  plan_cmd->add_option("--q3-deg", q3_deg, "Goal PIP flexion, degrees; q4 and beta follow from the linkage");
  plan_cmd->add_option("--from-m1-deg", from_m1_deg, "Start m1, degrees");
  plan_cmd->add_option("--from-m2", from_m2, "Start m2, mm");
  plan_cmd->add_option("--from-m3", from_m3, "Start m3, mm");
  plan_cmd->add_option("--dt", plan_dt, "Plan step, s")->capture_default_str();
  plan_cmd->add_option("--delta", delta, "Duration increment on a speed violation, s")->capture_default_str();
  plan_cmd->add_option("--out", plan_out, "Write the plan CSV here instead of stdout");

  // run-path
  auto* run_cmd = app.add_subcommand("run-path", "Follow a waypoint CSV on the simulated plant");
  std::string path_file, trace_out;
  double v_desired = 0;
  run_cmd->add_option("--path", path_file, "Waypoint CSV (x_mm,y_mm,z_mm)")->required();
  run_cmd->add_option("--v", v_desired, "Desired speed, mm/s (default from planner config)");
  run_cmd->add_option("--planner", common.planner, "Planner config file");
  run_cmd->add_option("--preset", common.preset, "perfect | abduction-degraded")->capture_default_str();
  run_cmd->add_option("--plant", common.plant_config, "Plant config file (overrides --preset)");
  run_cmd->add_option("--out", trace_out, "Trace CSV output");

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the square, circle and step benchmarks");
  std::string shape = "all", plane = "all", out_dir = "bench_out";
  int trials = 5;
  double size = 0, bench_v = 0;
  bench_cmd->add_option("--shape", shape, "square | circle | step | all")->capture_default_str();
  bench_cmd->add_option("--plane", plane, "flexion | abduction | all")->capture_default_str();
  bench_cmd->add_option("--trials", trials, "Trials per benchmark")->capture_default_str();
  bench_cmd->add_option("--size", size, "Side, radius or tread in mm (0 = default)");
  bench_cmd->add_option("--v", bench_v, "Desired speed, mm/s (0 = default per shape)");
  bench_cmd->add_option("--preset", common.preset, "perfect | abduction-degraded")->capture_default_str();
  bench_cmd->add_option("--plant", common.plant_config, "Plant config file (overrides --preset)");
  bench_cmd->add_option("--planner", common.planner, "Planner config file");
  bench_cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Metrics for measured or simulated trace CSVs");
  std::vector<std::string> traces;
  std::string analyze_path, analyze_out;
  double analyze_v = 0, half_width = 1.5, sigma = 0, fps = 0;
  analyze_cmd->add_option("--path", analyze_path, "Reference waypoint CSV")->required();
  analyze_cmd->add_option("--trace", traces, "Trace CSV, one per trial")->required();
  analyze_cmd->add_option("--v", analyze_v, "Desired speed, mm/s")->required();
  analyze_cmd->add_option("--half-width", half_width, "Corridor half width, mm")->capture_default_str();
  analyze_cmd->add_option("--sigma", sigma, "Per-trial sigma, mm, when the traces carry none");
  analyze_cmd->add_option("--fps", fps, "Frame rate (default from the time column)");
  analyze_cmd->add_option("--out", analyze_out, "Summary CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    const KinematicParams p = load_params(common.params);

    if (*validate) {
      fmt::print("ok: {}\n", common.params);
      const Vec3 home = fk_joints(JointState{}, p);
      fmt::print("home fingertip: {:.6f} {:.6f} {:.6f} mm\n", home.x(), home.y(), home.z());
      fmt::print("total length: {:.6f} mm\n", p.total_length());
      if (dump) fmt::print("{}", params_to_text(p));
      return 0;
    }

    if (*fk_cmd) {
      const MotorState m{rad(m1_deg), m2, m3};
      const JointState q = m2q(m, p);
      const Vec3 X = fk_joints(q, p);
      fmt::print("x_mm,y_mm,z_mm\n{:.6f},{:.6f},{:.6f}\n", X.x(), X.y(), X.z());
      print_joints(q);
      return 0;
    }

    if (*ik_cmd) {
      const JointState q = x2q({x, y, z}, p);
      const MotorState m = q2m(q, p);
      fmt::print("m1_deg,m2_mm,m3_mm\n{:.6f},{:.6f},{:.6f}\n", deg(m.m1), m.m2, m.m3);
      print_joints(q);
      return 0;
    }

    if (*jac_cmd) {
      const JacobianMatrix J = jacobian({rad(m1_deg), m2, m3}, p);
      fmt::print("row,d_dm1_mm_per_rad,d_dm2,d_dm3\n");
      const char* rows[3] = {"x", "y", "z"};
      for (int i = 0; i < 3; ++i)
        fmt::print("{},{:.9f},{:.9f},{:.9f}\n", rows[i], J.J(i, 0), J.J(i, 1), J.J(i, 2));
      fmt::print("# cond {:.6g} det {:.6g}\n", J.cond, J.det);
      return 0;
    }

    if (*plan_cmd) {
      const JointState goal = coupled_joints(rad(q1_deg), rad(q2_deg), rad(q3_deg), p);
      JointPlannerConfig cfg;
      cfg.dt = plan_dt;
      cfg.delta = delta;
      const JointPlan plan = plan_joint_space(goal, {rad(from_m1_deg), from_m2, from_m3}, p, cfg);
      std::string csv = "k,t_s,m1_rad,m2_mm,m3_mm\n";
      for (std::size_t k = 0; k < plan.setpoints.size(); ++k) {
        const auto& s = plan.setpoints[k];
        csv += fmt::format("{},{},{},{},{}\n", k, fmt6(double(k) * plan.dt), fmt::format("{:.9f}", s.m1),
                           fmt::format("{:.9f}", s.m2), fmt::format("{:.9f}", s.m3));
      }
      if (plan_out.empty()) fmt::print("{}", csv);
      else write_text(plan_out, csv);
      std::cerr << fmt::format("duration {:.2f} s, {} retries, peak speed ratio {:.4f}\n", plan.duration,
                               plan.retries, plan_speed_ratio(plan, p.v_max));
      return 0;
    }

    if (*run_cmd) {
      RmrcConfig cfg = planner_config(common);
      TaskPath path;
      path.waypoints = read_path_csv(path_file);
      path.v_desired = v_desired > 0 ? v_desired : cfg.v_desired;
      cfg.v_desired = path.v_desired;
      Plant plant(p, plant_config(common), common.seed);
      const Execution ex = execute_task_path(path, cfg, plant, p);
      if (!trace_out.empty()) write_text(trace_out, trace_csv(ex.trace));
      const ErrorSeries te = trajectory_norm_error(ex.trace, path, path.v_desired);
      const ErrorSeries pe = path_following_error(ex.trace, path);
      fmt::print("waypoints reached: {}/{}\n", ex.waypoints.size(), path.waypoints.size());
      fmt::print("frames: {}\n", ex.trace.size());
      fmt::print("max trajectory error: {:.6f} mm (frame {})\n", te.max, te.argmax);
      fmt::print("max path error: {:.6f} mm (frame {})\n", pe.max, pe.argmax);
      if (path.closed()) fmt::print("start/end distance: {:.6f} mm\n", start_end_repeatability(ex.trace, path));
      return 0;
    }

    if (*bench_cmd) {
      std::vector<BenchmarkSpec> specs;
      for (const auto& s : standard_benchmarks()) {
        if (shape != "all" && to_string(s.shape) != shape) continue;
        if (plane != "all" && to_string(s.plane) != plane) continue;
        specs.push_back(s);
      }
      if (shape != "all") shape_from_string(shape);
      if (plane != "all") plane_from_string(plane);
      if (trials < 1) throw FingerError(ErrorCode::InvalidInput, "trials must be at least 1");
      std::filesystem::create_directories(out_dir);
      const RmrcConfig cfg = planner_config(common);
      const PlantConfig plant = plant_config(common);
      std::string summary = summary_header();
      for (auto s : specs) {
        s.trials = trials;
        s.seed = common.seed;
        s.preset = plant.name;
        if (size > 0) s.size_mm = size;
        if (bench_v > 0) s.v_desired = bench_v;
        const BenchmarkResult r = run_benchmark(s, p, cfg, &plant);
        write_benchmark_files(r, out_dir);
        summary += summary_row(r);
        fmt::print("{:<18} traj {:.4f} +- {:.4f} mm  path {:.4f} +- {:.4f} mm\n", s.name(), r.trajectory_max.mean,
                   r.trajectory_max.sigma, r.path_max.mean, r.path_max.sigma);
      }
      write_text(out_dir + "/summary.csv", summary);
      return 0;
    }

    if (*analyze_cmd) {
      TaskPath path;
      path.waypoints = read_path_csv(analyze_path);
      path.v_desired = analyze_v;
      std::vector<double> traj, path_err, rep, sig;
      std::string out = "trace,frames,traj_max_mm,traj_raw_max_mm,path_max_mm,repeat_mm,corridor_max_dev_mm,corridor_pass\n";
      for (const auto& f : traces) {
        TrialTrace tr = read_trace_csv(f, fps);
        if (tr.sigma_mm <= 0) tr.sigma_mm = sigma;
        const ErrorSeries te = trajectory_norm_error(tr, path, analyze_v);
        const ErrorSeries pe = path_following_error(tr, path);
        const CorridorResult c = corridor_check(tr, path, half_width);
        const double r = path.closed() ? start_end_repeatability(tr, path) : 0.0;
        out += fmt::format("{},{},{},{},{},{},{},{}\n", f, tr.size(), fmt6(te.max), fmt6(te.raw_max), fmt6(pe.max),
                           path.closed() ? fmt6(r) : "", fmt6(c.max_deviation), c.pass ? "pass" : "fail");
        traj.push_back(te.max);
        path_err.push_back(pe.max);
        rep.push_back(r);
        sig.push_back(tr.sigma_mm);
      }
      const WeightedStat wt = weighted_mean(traj, sig);
      const WeightedStat wp = weighted_mean(path_err, sig);
      out += fmt::format("# {} weighted traj_max {} +- {} mm, path_max {} +- {} mm", kMetricsVersion, fmt6(wt.mean),
                         fmt6(wt.sigma), fmt6(wp.mean), fmt6(wp.sigma));
      if (path.closed()) {
        const WeightedStat wr = weighted_mean(rep, sig);
        out += fmt::format(", repeat {} +- {} mm", fmt6(wr.mean), fmt6(wr.sigma));
      }
      out += "\n";
      if (analyze_out.empty()) fmt::print("{}", out);
      else write_text(analyze_out, out);
      return 0;
    }
  } catch (const FingerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
