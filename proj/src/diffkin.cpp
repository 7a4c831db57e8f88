#include "fingerkin/diffkin.hpp"

#include <cmath>
#include <limits>

#include "fingerkin/errors.hpp"
#include "fingerkin/kinematics.hpp"
#include "fingerkin/trig.hpp"

namespace fingerkin {

namespace {

double checked(double den, int loop) {
  if (std::abs(den) < kSingularDenominator)
    throw FingerError(ErrorCode::SingularLoop, "implicit-derivative denominator vanished", loop);
  return den;
}

}  // namespace

LoopPartials loop_partials(const MotorState& m, const JointState& q, const KinematicParams& p) {
  LoopPartials lp;
  auto& d = lp.d;
  const Vec3 z(0, 0, 1);

  const Mat3 Ry1 = rot_y(q.q1), dRy1 = drot_axis(Axis::Y, q.q1);
  const Mat3 Rx2 = rot_x(q.q2), dRx2 = drot_axis(Axis::X, q.q2);

  // q1 is the motor angle itself.
  d(0, 0) = 1.0;

  // Loop 2: r = P2 + m2 z - Ry(q1) Rx(q2) OA. With A2, B2, C2 the components of r,
  // r.r = l2^2 gives D2 dq1 + E2 dq2 + C2 dm2 = 0.
  const Vec3 r2 = p.P2 + m.m2 * z - Ry1 * Rx2 * p.OA;
  const double C2 = r2.z();
  const double D2 = r2.dot(-dRy1 * Rx2 * p.OA);
  const double E2 = checked(r2.dot(-Ry1 * dRx2 * p.OA), 2);
  d(1, 0) = -D2 / E2 * d(0, 0);
  d(1, 1) = -C2 / E2;

  // Loop 3: r = P3 + m3 z - R2 OA - Ry(q1) Rx(q2 + b1) AB.
  const double b1 = q.beta + p.beta_offset;
  const Mat3 Rx2b = rot_x(q.q2 + b1), dRx2b = drot_axis(Axis::X, q.q2 + b1);
  const Vec3 r3 = p.P3 + m.m3 * z - Ry1 * Rx2 * p.OA - Ry1 * Rx2b * p.AB;
  const double F1 = r3.dot(-dRy1 * Rx2 * p.OA - dRy1 * Rx2b * p.AB);
  const double F2 = r3.dot(-Ry1 * dRx2 * p.OA - Ry1 * dRx2b * p.AB);
  const double Fm = r3.z();
  const double Fb = checked(r3.dot(-Ry1 * dRx2b * p.AB), 3);
  for (int i = 0; i < 3; ++i)
    d(4, i) = -(F1 * d(0, i) + F2 * d(1, i) + (i == 2 ? Fm : 0.0)) / Fb;

  // Loop 4: r = -Rx(b1) AC + AD + Rx(q3) DF; beta drives q3 alone.
  const Vec3 r4 = -rot_x(b1) * p.AC + p.AD + rot_x(q.q3) * p.DF;
  const double Gb = r4.dot(-drot_axis(Axis::X, b1) * p.AC);
  const double G3 = checked(r4.dot(drot_axis(Axis::X, q.q3) * p.DF), 4);
  for (int i = 0; i < 3; ++i) d(2, i) = -Gb / G3 * d(4, i);

  // Loop 5: r = Rx(q3) DG + Rx(q3) Rx(q4) GH - DE.
  const Mat3 R3 = rot_x(q.q3), dR3 = drot_axis(Axis::X, q.q3);
  const Mat3 R4 = rot_x(q.q4), dR4 = drot_axis(Axis::X, q.q4);
  const Vec3 r5 = R3 * p.DG + R3 * R4 * p.GH - p.DE;
  const double H3 = r5.dot(dR3 * p.DG + dR3 * R4 * p.GH);
  const double H4 = checked(r5.dot(R3 * dR4 * p.GH), 5);
  for (int i = 0; i < 3; ++i) d(3, i) = -H3 / H4 * d(2, i);

  return lp;
}

JacobianMatrix jacobian(const MotorState& m, const KinematicParams& p) { return jacobian(m, m2q(m, p), p); }

JacobianMatrix jacobian(const MotorState& m, const JointState& q, const KinematicParams& p) {
  const LoopPartials lp = loop_partials(m, q, p);
  Vec3 dX[4];
  for (int j = 0; j < 4; ++j) dX[j] = fk_joint_partial(q, j, p);

  JacobianMatrix out;
  out.J.col(0) = dX[0] * lp(0, 0) + dX[1] * lp(1, 0) + dX[2] * lp(2, 0) + dX[3] * lp(3, 0);
  out.J.col(1) = dX[1] * lp(1, 1) + dX[2] * lp(2, 1) + dX[3] * lp(3, 1);
  out.J.col(2) = dX[2] * lp(2, 2) + dX[3] * lp(3, 2);

  out.det = out.J.determinant();
  // Singular values are the square roots of the eigenvalues of J^T J.
  const Eigen::SelfAdjointEigenSolver<Mat3> es(out.J.transpose() * out.J, Eigen::EigenvaluesOnly);
  const Vec3 ev = es.eigenvalues();  // ascending
  out.cond = ev(0) > 0.0 ? std::sqrt(ev(2) / ev(0)) : std::numeric_limits<double>::infinity();
  return out;
}

Mat3 inverse3(const Mat3& a) {
  Mat3 adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double det = a(0, 0) * adj(0, 0) + a(0, 1) * adj(1, 0) + a(0, 2) * adj(2, 0);
  if (det == 0.0 || !std::isfinite(det)) throw FingerError(ErrorCode::NearSingular, "determinant is zero");
  return adj / det;
}

Vec3 solve_motor_rates(const JacobianMatrix& J, const Vec3& xdot) {
  if (!(J.cond <= kMaxCondition))
    throw FingerError(ErrorCode::NearSingular, "Jacobian condition number " + std::to_string(J.cond) + " over limit");
  return inverse3(J.J) * xdot;
}

}  // namespace fingerkin
