#include "fingerkin/trig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fingerkin/errors.hpp"

namespace fingerkin {

Mat3 rot_x(double q) {
  const double c = std::cos(q), s = std::sin(q);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double q) {
  const double c = std::cos(q), s = std::sin(q);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double q) {
  const double c = std::cos(q), s = std::sin(q);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Mat3 rot_axis(Axis axis, double q) {
  switch (axis) {
    case Axis::X: return rot_x(q);
    case Axis::Y: return rot_y(q);
    case Axis::Z: return rot_z(q);
  }
  return Mat3::Identity();
}

Mat3 drot_axis(Axis axis, double q) {
  const double c = std::cos(q), s = std::sin(q);
  Mat3 d;
  switch (axis) {
    case Axis::X:
      d << 0, 0, 0,
           0, -s, -c,
           0, c, -s;
      break;
    case Axis::Y:
      d << -s, 0, c,
           0, 0, 0,
           -c, 0, -s;
      break;
    case Axis::Z:
      d << -s, -c, 0,
           c, -s, 0,
           0, 0, 0;
      break;
  }
  return d;
}

double wrap_angle(double q) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(q + std::numbers::pi, two_pi);
  if (w < 0) w += two_pi;
  return w - std::numbers::pi;
}

std::array<double, 2> trig_roots(const TrigCoefficients& c, int loop) {
  const double r = std::hypot(c.A, c.B);
  if (!(r > 0.0) || !std::isfinite(r))
    throw FingerError(ErrorCode::DegenerateLoop, "A = B = 0, angle unconstrained", loop);
  double arg = -c.C / r;
  if (std::abs(arg) > 1.0 + kAcosClamp || !std::isfinite(arg))
    throw FingerError(ErrorCode::Unsolvable, "loop cannot close (|C|/sqrt(A^2+B^2) = " + std::to_string(std::abs(arg)) + ")",
                      loop);
  // acos loses digits near +-1; the atan2 form keeps them.
  const double phase = std::atan2(c.A, c.B);
  const double spread = std::atan2(std::sqrt(std::max(0.0, (r - c.C) * (r + c.C))), -c.C);
  return {wrap_angle(phase + spread), wrap_angle(phase - spread)};
}

double solve_trig(const TrigCoefficients& c, int loop) {
  const auto roots = trig_roots(c, loop);
  return c.branch == Branch::Plus ? roots[0] : roots[1];
}

TrigCoefficients loop_reduce(const Vec3& U, const Vec3& V, double l, const RotationForm& form, Branch branch) {
  // U^T pre R_axis(q) V = u^T R_axis(q) V with u = pre^T U.
  const Vec3 u = form.pre.transpose() * U;
  const double s = (U.squaredNorm() + V.squaredNorm() - l * l) / 2.0;
  TrigCoefficients t;
  t.branch = branch;
  switch (form.axis) {
    case Axis::X:
      // u.(Vx, c Vy - s Vz, s Vy + c Vz)
      t.A = u.z() * V.y() - u.y() * V.z();
      t.B = u.y() * V.y() + u.z() * V.z();
      t.C = u.x() * V.x() - s;
      break;
    case Axis::Y:
      // u.(c Vx + s Vz, Vy, -s Vx + c Vz)
      t.A = u.x() * V.z() - u.z() * V.x();
      t.B = u.x() * V.x() + u.z() * V.z();
      t.C = u.y() * V.y() - s;
      break;
    case Axis::Z:
      // u.(c Vx - s Vy, s Vx + c Vy, Vz)
      t.A = u.y() * V.x() - u.x() * V.y();
      t.B = u.x() * V.x() + u.y() * V.y();
      t.C = u.z() * V.z() - s;
      break;
  }
  return t;
}

}  // namespace fingerkin
