#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fingerkin/metrics.hpp"
#include "fingerkin/planners.hpp"

namespace fingerkin {

enum class Shape { Square, Circle, Step };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& s);

struct BenchmarkSpec {
  Shape shape = Shape::Square;
  Plane plane = Plane::Flexion;
  double size_mm = 0.0;     // square side, circle radius or step tread; 0 picks the default
  int segments = 32;        // circle polygon
  int steps = 5;            // staircase steps
  double v_desired = 0.0;   // mm/s; 0 picks 5 for the flexion step, else 10
  int trials = 5;
  std::string preset = "perfect";
  Vec3 center = Vec3(0.0, 62.0, 40.0);
  std::uint64_t seed = 1;
  double trace_sigma_mm = 0.05;  // per-trial sigma used for the weighted means
  double corridor_half_width = 0.0;  // 0 picks 1.5 (flexion) or 2.0 (abduction)

  std::string name() const;  // e.g. "square_flexion"
};

/// Fills every zero default with the value for its shape and plane, and
/// rejects non-positive speeds, sizes and trial counts.
BenchmarkSpec resolved(const BenchmarkSpec& spec);

/// Waypoints for a benchmark, checked through x2q. Throws Unreachable naming the first bad waypoint.
TaskPath generate_path(const BenchmarkSpec& spec, const KinematicParams& p);

/// Square, circle and step in each plane.
std::vector<BenchmarkSpec> standard_benchmarks();

struct TrialResult {
  Execution execution;
  ErrorSeries trajectory;
  ErrorSeries path;
  double repeatability = 0.0;  // only meaningful for closed paths
  CorridorResult corridor;
};

struct BenchmarkResult {
  BenchmarkSpec spec;
  TaskPath path;
  std::vector<TrialResult> trials;
  WeightedStat trajectory_max;
  WeightedStat path_max;
  WeightedStat repeatability;
  bool closed = false;
};

/// Runs spec.trials executions on fresh plants seeded with seed + trial index.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const KinematicParams& p, const RmrcConfig& base = {},
                              const PlantConfig* plant_override = nullptr);

std::string summary_header();
std::string summary_row(const BenchmarkResult& r);

/// Writes <name>_path.csv, <name>_trial<k>.csv per trial and appends nothing else.
/// Returns the file names written.
std::vector<std::string> write_benchmark_files(const BenchmarkResult& r, const std::string& dir);

}  // namespace fingerkin
