#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fingerkin/params.hpp"
#include "fingerkin/types.hpp"

namespace support {

inline const fingerkin::KinematicParams& params() {
  static const fingerkin::KinematicParams p = fingerkin::load_params(std::string(FINGERKIN_DATA_DIR) + "/default_params.cfg");
  return p;
}

inline fingerkin::MotorState random_motor(std::mt19937_64& rng, const fingerkin::KinematicParams& p, double shrink = 1.0) {
  fingerkin::MotorState m;
  double* v[3] = {&m.m1, &m.m2, &m.m3};
  for (int i = 0; i < 3; ++i) {
    const auto& r = p.motor_limits[i];
    const double mid = r.mid(), half = 0.5 * r.width() * shrink;
    *v[i] = std::uniform_real_distribution<double>(mid - half, mid + half)(rng);
  }
  return m;
}

// Rotations written out here rather than taken from the library, so the
// residual oracles share no code with the solvers under test.
inline Eigen::Matrix3d rx(double a) {
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}
inline Eigen::Matrix3d ry(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}

namespace oracle {
using P = fingerkin::KinematicParams;
using V = Eigen::Vector3d;

inline double loop2(double m2, double q1, double q2, const P& p) {
  return (p.P2 + V(0, 0, m2) - ry(q1) * rx(q2) * p.OA).norm() - p.l2;
}
inline double loop3(double m3, double q1, double q2, double beta, const P& p) {
  const double b1 = beta + p.beta_offset;
  return (p.P3 + V(0, 0, m3) - ry(q1) * rx(q2) * p.OA - ry(q1) * rx(q2 + b1) * p.AB).norm() - p.l3;
}
inline double loop4(double beta, double q3, const P& p) {
  const double b1 = beta + p.beta_offset;
  return (-rx(b1) * p.AC + p.AD + rx(q3) * p.DF).norm() - p.l4;
}
inline double loop5(double q3, double q4, const P& p) {
  return (rx(q3) * p.DG + rx(q3) * rx(q4) * p.GH - p.DE).norm() - p.l5;
}
}  // namespace oracle

/// Fingertip position computed in long double from the geometry alone: each
/// loop angle is Newton-polished on its own squared-norm residual, starting
/// from `seed`. Used where double-precision fk noise would swamp the check.
inline Eigen::Matrix<long double, 3, 1> fk_long(const fingerkin::MotorState& m, const fingerkin::JointState& seed,
                                                const fingerkin::KinematicParams& p) {
  using L = long double;
  using V3 = Eigen::Matrix<L, 3, 1>;
  using M3 = Eigen::Matrix<L, 3, 3>;
  auto rxl = [](L a) {
    M3 r;
    r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return r;
  };
  auto ryl = [](L a) {
    M3 r;
    r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return r;
  };
  auto v = [](const Eigen::Vector3d& x) { return V3(x.x(), x.y(), x.z()); };
  auto polish = [](const std::function<L(L)>& f, L q) {
    for (int it = 0; it < 60; ++it) {
      const L h = 1e-7L;
      const L d = (f(q + h) - f(q - h)) / (2 * h);
      const L step = f(q) / d;
      q -= step;
      if (std::abs(step) < 1e-18L) break;
    }
    return q;
  };
  const L q1 = m.m1;
  const L q2 = polish([&](L q) { return (v(p.P2) + V3(0, 0, m.m2) - ryl(q1) * rxl(q) * v(p.OA)).squaredNorm() - L(p.l2) * p.l2; },
                      seed.q2);
  const L b = polish([&](L x) {
    return (v(p.P3) + V3(0, 0, m.m3) - ryl(q1) * rxl(q2) * v(p.OA) - ryl(q1) * rxl(q2 + x + p.beta_offset) * v(p.AB))
               .squaredNorm() - L(p.l3) * p.l3;
  }, seed.beta);
  const L q3 = polish([&](L q) {
    return (-rxl(b + p.beta_offset) * v(p.AC) + v(p.AD) + rxl(q) * v(p.DF)).squaredNorm() - L(p.l4) * p.l4;
  }, seed.q3);
  const L q4 = polish([&](L q) {
    return (rxl(q3) * v(p.DG) + rxl(q3) * rxl(q) * v(p.GH) - v(p.DE)).squaredNorm() - L(p.l5) * p.l5;
  }, seed.q4);
  const V3 OD(0, p.OD_y, p.OD_z), DG(0, p.DG_y, p.DG_z), GI(0, 0, p.GI_z);
  return ryl(q1) * rxl(q2) * (OD + rxl(q3) * (DG + rxl(q4) * GI));
}

/// Zeros of |f| on [-pi, pi]: a 1e-3 rad scan finds every local minimum, then
/// each is refined by an exhaustive 1e-6 rad sweep over its bracket.
inline std::vector<double> sweep_minima(const std::function<double(double)>& f) {
  constexpr double coarse = 1e-3, fine = 1e-6;
  const double pi = std::numbers::pi;
  const int n = static_cast<int>(std::ceil(2 * pi / coarse));
  std::vector<double> val(n + 1);
  for (int i = 0; i <= n; ++i) val[i] = std::abs(f(-pi + i * coarse));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) {
    const double left = i > 0 ? val[i - 1] : INFINITY, right = i < n ? val[i + 1] : INFINITY;
    if (!(val[i] <= left && val[i] < right)) continue;
    const double c = -pi + i * coarse;
    double best = c, best_v = val[i];
    for (int k = -1000; k <= 1000; ++k) {
      const double q = c + k * fine;
      const double v = std::abs(f(q));
      if (v < best_v) {
        best_v = v;
        best = q;
      }
    }
    out.push_back(best);
  }
  return out;
}

/// Distance from q to the nearest sweep minimum whose residual is small.
inline double sweep_distance(const std::function<double(double)>& f, double q, double accept = 1e-4) {
  double d = INFINITY;
  for (double r : sweep_minima(f))
    if (std::abs(f(r)) < accept) d = std::min(d, std::abs(std::remainder(r - q, 2 * std::numbers::pi)));
  return d;
}

/// Grid of the sweep plus a hair of slack for rounding.
inline constexpr double kSweepTol = 1e-6 + 1e-9;

}  // namespace support
