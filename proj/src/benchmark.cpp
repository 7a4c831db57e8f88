#include "fingerkin/benchmark.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "fingerkin/csv_io.hpp"
#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"

namespace fingerkin {

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::Square: return "square";
    case Shape::Circle: return "circle";
    case Shape::Step: return "step";
  }
  return "square";
}

Shape shape_from_string(const std::string& s) {
  if (s == "square") return Shape::Square;
  if (s == "circle") return Shape::Circle;
  if (s == "step") return Shape::Step;
  throw FingerError(ErrorCode::InvalidInput, "unknown shape '" + s + "'");
}

std::string BenchmarkSpec::name() const { return to_string(shape) + "_" + to_string(plane); }

BenchmarkSpec resolved(const BenchmarkSpec& spec) {
  BenchmarkSpec s = spec;
  if (s.plane == Plane::Free) throw FingerError(ErrorCode::InvalidInput, "benchmarks run in the flexion or abduction plane");
  if (s.size_mm == 0.0) s.size_mm = s.shape == Shape::Square ? 20.0 : (s.shape == Shape::Circle ? 10.0 : 2.0);
  if (s.v_desired == 0.0) s.v_desired = s.shape == Shape::Step && s.plane == Plane::Flexion ? 5.0 : 10.0;
  if (s.corridor_half_width == 0.0) s.corridor_half_width = s.plane == Plane::Flexion ? 1.5 : 2.0;
  if (!(s.size_mm > 0)) throw FingerError(ErrorCode::InvalidInput, "path size must be positive");
  if (!(s.v_desired > 0)) throw FingerError(ErrorCode::InvalidInput, "v_desired must be positive");
  if (s.trials < 1) throw FingerError(ErrorCode::InvalidInput, "trials must be at least 1");
  if (s.segments < 3) throw FingerError(ErrorCode::InvalidInput, "a circle needs at least 3 segments");
  if (s.steps < 1) throw FingerError(ErrorCode::InvalidInput, "a step path needs at least 1 step");
  if (!(s.trace_sigma_mm > 0)) throw FingerError(ErrorCode::NonPositiveSigma, "trace sigma must be positive");
  if (!(s.corridor_half_width > 0)) throw FingerError(ErrorCode::InvalidInput, "corridor half width must be positive");
  return s;
}

TaskPath generate_path(const BenchmarkSpec& spec_in, const KinematicParams& p) {
  const BenchmarkSpec spec = resolved(spec_in);
  std::vector<Eigen::Vector2d> uv;
  const double a = spec.size_mm;
  switch (spec.shape) {
    case Shape::Square: {
      const double h = a / 2.0;
      uv = {{-h, -h}, {h, -h}, {h, h}, {-h, h}, {-h, -h}};
      break;
    }
    case Shape::Circle:
      for (int k = 0; k < spec.segments; ++k) {
        const double th = 2.0 * std::numbers::pi * k / spec.segments;
        uv.emplace_back(a * std::cos(th), a * std::sin(th));
      }
      uv.push_back(uv.front());
      break;
    case Shape::Step: {
      Eigen::Vector2d c(-spec.steps * a / 2.0, -spec.steps * a / 2.0);
      uv.push_back(c);
      for (int k = 0; k < spec.steps; ++k) {
        c.x() += a;
        uv.push_back(c);
        c.y() += a;
        uv.push_back(c);
      }
      break;
    }
  }

  TaskPath path;
  path.v_desired = spec.v_desired;
  path.plane = spec.plane;
  for (const auto& w : uv) {
    // Flexion paths keep x fixed; abduction paths keep y fixed.
    path.waypoints.push_back(spec.plane == Plane::Flexion ? Vec3(spec.center.x(), spec.center.y() + w.x(), spec.center.z() + w.y())
                                                          : Vec3(spec.center.x() + w.x(), spec.center.y(), spec.center.z() + w.y()));
  }
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    try {
      ik(FingertipPose::from(path.waypoints[i]), p);
    } catch (const FingerError& e) {
      throw FingerError(ErrorCode::Unreachable,
                        fmt::format("{} waypoint {} ({:.3f}, {:.3f}, {:.3f}) mm: {}", spec.name(), i,
                                    path.waypoints[i].x(), path.waypoints[i].y(), path.waypoints[i].z(), e.what()));
    }
  }
  return path;
}

std::vector<BenchmarkSpec> standard_benchmarks() {
  std::vector<BenchmarkSpec> out;
  for (Plane plane : {Plane::Flexion, Plane::Abduction})
    for (Shape shape : {Shape::Square, Shape::Circle, Shape::Step}) {
      BenchmarkSpec s;
      s.shape = shape;
      s.plane = plane;
      out.push_back(resolved(s));
    }
  return out;
}

BenchmarkResult run_benchmark(const BenchmarkSpec& spec_in, const KinematicParams& p, const RmrcConfig& base,
                              const PlantConfig* plant_override) {
  BenchmarkResult r;
  r.spec = resolved(spec_in);
  r.path = generate_path(r.spec, p);
  r.closed = r.path.closed();
  const PlantConfig plant_cfg = plant_override ? *plant_override : plant_preset(r.spec.preset);

  RmrcConfig cfg = base;
  cfg.v_desired = r.spec.v_desired;

  std::vector<double> traj, path_err, rep, sig;
  for (int k = 0; k < r.spec.trials; ++k) {
    Plant plant(p, plant_cfg, r.spec.seed + static_cast<std::uint64_t>(k));
    TrialResult t;
    try {
      t.execution = execute_task_path(r.path, cfg, plant, p);
    } catch (const FingerError& e) {
      throw FingerError(e.code(), fmt::format("{} trial {}: {}", r.spec.name(), k, e.what()), e.loop());
    }
    t.execution.trace.sigma_mm = r.spec.trace_sigma_mm;
    t.trajectory = trajectory_norm_error(t.execution.trace, r.path, r.spec.v_desired);
    t.path = path_following_error(t.execution.trace, r.path);
    if (r.closed) t.repeatability = start_end_repeatability(t.execution.trace, r.path);
    t.corridor = corridor_check(t.execution.trace, r.path, r.spec.corridor_half_width);
    traj.push_back(t.trajectory.max);
    path_err.push_back(t.path.max);
    rep.push_back(t.repeatability);
    sig.push_back(r.spec.trace_sigma_mm);
    r.trials.push_back(std::move(t));
  }
  r.trajectory_max = weighted_mean(traj, sig);
  r.path_max = weighted_mean(path_err, sig);
  if (r.closed) r.repeatability = weighted_mean(rep, sig);
  return r;
}

std::string summary_header() {
  return "version,path,plane,preset,v_desired_mm_s,trials,traj_max_mm,traj_sigma_mm,path_max_mm,path_sigma_mm,"
         "repeat_mm,repeat_sigma_mm,corridor_half_width_mm,corridor_max_dev_mm,corridor_pass,waypoints_reached\n";
}

std::string summary_row(const BenchmarkResult& r) {
  double dev = 0.0;
  bool pass = true;
  int reached = 0;
  for (const auto& t : r.trials) {
    dev = std::max(dev, t.corridor.max_deviation);
    pass = pass && t.corridor.pass;
    reached += static_cast<int>(t.execution.waypoints.size());
  }
  const std::string rep = r.closed ? fmt6(r.repeatability.mean) : "";
  const std::string rep_sigma = r.closed ? fmt6(r.repeatability.sigma) : "";
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", kMetricsVersion, to_string(r.spec.shape),
                     to_string(r.spec.plane), r.spec.preset, fmt6(r.spec.v_desired), r.spec.trials,
                     fmt6(r.trajectory_max.mean), fmt6(r.trajectory_max.sigma), fmt6(r.path_max.mean),
                     fmt6(r.path_max.sigma), rep, rep_sigma, fmt6(r.spec.corridor_half_width), fmt6(dev),
                     pass ? "pass" : "fail", reached);
}

std::vector<std::string> write_benchmark_files(const BenchmarkResult& r, const std::string& dir) {
  std::vector<std::string> files;
  const std::string stem = dir + "/" + r.spec.name();
  write_text(stem + "_path.csv", path_csv(r.path.waypoints));
  files.push_back(stem + "_path.csv");
  for (std::size_t k = 0; k < r.trials.size(); ++k) {
    const std::string f = fmt::format("{}_trial{}.csv", stem, k);
    write_text(f, trace_csv(r.trials[k].execution.trace));
    files.push_back(f);
  }
  write_text(stem + "_summary.csv", summary_header() + summary_row(r));
  files.push_back(stem + "_summary.csv");
  return files;
}

}  // namespace fingerkin
