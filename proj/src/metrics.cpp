#include "fingerkin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fingerkin/errors.hpp"

namespace fingerkin {

namespace {

ErrorSeries compare(const TrialTrace& trace, const TaskPath& path, double s) {
  if (trace.empty()) throw FingerError(ErrorCode::LengthMismatch, "trace has no samples");
  if (path.waypoints.empty()) throw FingerError(ErrorCode::EmptyInput, "path has no waypoints");
  const auto expected = expected_positions(path.waypoints, s, trace.size());
  const double total = path.length();

  ErrorSeries es;
  es.step = s;
  es.errors.resize(trace.size());
  bool arrived = false;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double e = (trace.x[k] - expected[k]).norm();
    es.errors[k] = e;
    if (e > es.raw_max || k == 0) {
      es.raw_max = e;
      es.raw_argmax = static_cast<int>(k);
    }
    if (!arrived) {
      ++es.active_frames;
      if (e > es.max || k == 0) {
        es.max = e;
        es.argmax = static_cast<int>(k);
      }
      // Frames after the expectation has reached the end only measure settling.
      if (double(k) * s >= total) arrived = true;
    }
  }
  return es;
}

}  // namespace

std::vector<Vec3> expected_positions(const std::vector<Vec3>& path, double s, std::size_t n_frames) {
  if (path.empty()) throw FingerError(ErrorCode::EmptyInput, "path has no waypoints");
  std::vector<Vec3> out;
  out.reserve(n_frames);
  std::size_t seg = 0;
  double seg_start = 0.0;  // arc length at path[seg]
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double d = double(k) * s;
    while (seg + 1 < path.size() && seg_start + (path[seg + 1] - path[seg]).norm() < d) {
      seg_start += (path[seg + 1] - path[seg]).norm();
      ++seg;
    }
    if (seg + 1 >= path.size()) {
      out.push_back(path.back());
      continue;
    }
    const double len = (path[seg + 1] - path[seg]).norm();
    const double f = std::clamp((d - seg_start) / len, 0.0, 1.0);
    out.push_back(f == 1.0 ? path[seg + 1] : Vec3(path[seg] + f * (path[seg + 1] - path[seg])));
  }
  return out;
}

std::vector<Vec3> expected_positions(const TaskPath& path, double v, double fps, std::size_t n_frames) {
  return expected_positions(path.waypoints, v / fps, n_frames);
}

ErrorSeries trajectory_norm_error(const TrialTrace& trace, const TaskPath& path, double v) {
  if (!(v > 0) || !(trace.fps > 0)) throw FingerError(ErrorCode::InvalidInput, "speed and fps must be positive");
  return compare(trace, path, v / trace.fps);
}

ErrorSeries path_following_error(const TrialTrace& trace, const TaskPath& path) {
  if (trace.empty()) throw FingerError(ErrorCode::LengthMismatch, "trace has no samples");
  const double s = trace.size() > 1 ? path.length() / double(trace.size() - 1) : 0.0;
  return compare(trace, path, s);
}

double start_end_repeatability(const TrialTrace& trace, const TaskPath& path) {
  if (!path.closed()) throw FingerError(ErrorCode::NotClosed, "path start and end differ");
  if (trace.empty()) throw FingerError(ErrorCode::LengthMismatch, "trace has no samples");
  return (trace.x.front() - trace.x.back()).norm();
}

WeightedStat weighted_mean(const std::vector<double>& values, const std::vector<double>& sigmas) {
  if (values.empty()) throw FingerError(ErrorCode::EmptyInput, "no values to average");
  if (values.size() != sigmas.size()) throw FingerError(ErrorCode::LengthMismatch, "values and sigmas differ in length");
  double wsum = 0.0, xsum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(sigmas[i] > 0)) throw FingerError(ErrorCode::NonPositiveSigma, "sigma " + std::to_string(i) + " is not positive");
    const double w = 1.0 / (sigmas[i] * sigmas[i]);
    wsum += w;
    xsum += w * values[i];
  }
  return {xsum / wsum, 1.0 / std::sqrt(wsum), static_cast<int>(values.size())};
}

double point_to_segment(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

double point_to_polyline(const Vec3& x, const std::vector<Vec3>& path) {
  if (path.empty()) throw FingerError(ErrorCode::EmptyInput, "path has no waypoints");
  if (path.size() == 1) return (x - path.front()).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.size(); ++i) best = std::min(best, point_to_segment(x, path[i - 1], path[i]));
  return best;
}

CorridorResult corridor_check(const TrialTrace& trace, const TaskPath& path, double half_width) {
  if (!(half_width > 0)) throw FingerError(ErrorCode::InvalidInput, "corridor half width must be positive");
  CorridorResult r;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double d = point_to_polyline(trace.x[k], path.waypoints);
    if (d > r.max_deviation) {
      r.max_deviation = d;
      r.frame = static_cast<int>(k);
    }
  }
  r.pass = r.max_deviation <= half_width;
  return r;
}

}  // namespace fingerkin
