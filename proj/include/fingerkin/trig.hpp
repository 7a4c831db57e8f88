#pragma once

#include <array>

#include "fingerkin/types.hpp"

namespace fingerkin {

/// Which root of A sin q + B cos q + C = 0: atan2(A, B) + acos(.) or - acos(.).
enum class Branch { Plus, Minus };

enum class Axis { X, Y, Z };

struct TrigCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  Branch branch = Branch::Plus;
};

/// Single-unknown rotation R(q) = pre * R_axis(q).
struct RotationForm {
  Axis axis = Axis::X;
  Mat3 pre = Mat3::Identity();
};

/// Arguments of acos within this distance of +-1 are clamped.
inline constexpr double kAcosClamp = 1e-12;

Mat3 rot_x(double q);
Mat3 rot_y(double q);
Mat3 rot_z(double q);
Mat3 rot_axis(Axis axis, double q);
/// d/dq of rot_axis(axis, q).
Mat3 drot_axis(Axis axis, double q);

/// Wraps to [-pi, pi).
double wrap_angle(double q);

/// Both roots {plus, minus} of A sin q + B cos q + C = 0, wrapped to [-pi, pi).
/// Throws FingerError(DegenerateLoop) when A = B = 0 and Unsolvable when
/// |C| / sqrt(A^2 + B^2) exceeds 1 + kAcosClamp. `loop` tags the error.
std::array<double, 2> trig_roots(const TrigCoefficients& c, int loop = 0);

/// The root selected by `c.branch`.
double solve_trig(const TrigCoefficients& c, int loop = 0);

/// Rewrites the loop equation ||U - R(q) V|| = l into A sin q + B cos q + C = 0
/// using U^T R V = (|U|^2 + |V|^2 - l^2) / 2.
TrigCoefficients loop_reduce(const Vec3& U, const Vec3& V, double l, const RotationForm& form,
                             Branch branch = Branch::Plus);

}  // namespace fingerkin
