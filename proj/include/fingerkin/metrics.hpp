#pragma once

#include <string>
#include <vector>

#include "fingerkin/planners.hpp"
#include "fingerkin/plant.hpp"
#include "fingerkin/types.hpp"

namespace fingerkin {

/// Stamped on every summary row so results from different metric definitions never mix.
inline constexpr const char* kMetricsVersion = "fingerkin-metrics-v1";

struct ErrorSeries {
  std::vector<double> errors;  // per frame, mm
  double max = 0.0;            // over frames up to the first one whose expectation reaches the path end
  int argmax = 0;
  double raw_max = 0.0;        // over every frame
  int raw_argmax = 0;
  double step = 0.0;           // s, mm per frame
  int active_frames = 0;       // frames counted in `max`
};

struct WeightedStat {
  double mean = 0.0;
  double sigma = 0.0;
  int count = 0;
};

struct CorridorResult {
  bool pass = true;
  double max_deviation = 0.0;
  int frame = 0;
};

/// Points at arc length k * s along the polyline, k = 0 .. n_frames - 1, held at the end.
std::vector<Vec3> expected_positions(const std::vector<Vec3>& path, double s, std::size_t n_frames);
std::vector<Vec3> expected_positions(const TaskPath& path, double v, double fps, std::size_t n_frames);

/// |measured - expected(k * v / fps)| per frame.
ErrorSeries trajectory_norm_error(const TrialTrace& trace, const TaskPath& path, double v);

/// Same comparison with s refit to (path length) / (frames - 1).
ErrorSeries path_following_error(const TrialTrace& trace, const TaskPath& path);

/// Distance between the first and last trace samples. Throws NotClosed for open paths.
double start_end_repeatability(const TrialTrace& trace, const TaskPath& path);

/// Inverse-variance weighted mean and its uncertainty.
WeightedStat weighted_mean(const std::vector<double>& values, const std::vector<double>& sigmas);

double point_to_segment(const Vec3& x, const Vec3& a, const Vec3& b);
double point_to_polyline(const Vec3& x, const std::vector<Vec3>& path);

/// Every sample must lie within half_width of the path polyline.
CorridorResult corridor_check(const TrialTrace& trace, const TaskPath& path, double half_width);

}  // namespace fingerkin
