#include "vessel_split/rotations.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace vsplit {

Quat operator*(const Quat& p, const Quat& q) {
  return {p.w * q.w - p.v.dot(q.v), p.w * q.v + q.w * p.v + p.v.cross(q.v)};
}

Eigen::Matrix4d left_matrix(const Quat& p) {
  Eigen::Matrix4d l;
  l(0, 0) = p.w;
  l.block<1, 3>(0, 1) = -p.v.transpose();
  l.block<3, 1>(1, 0) = p.v;
  l.block<3, 3>(1, 1) = p.w * Mat3::Identity() + hat(p.v);
  return l;
}

Eigen::Matrix4d right_matrix(const Quat& q) {
  Eigen::Matrix4d r;
  r(0, 0) = q.w;
  r.block<1, 3>(0, 1) = -q.v.transpose();
  r.block<3, 1>(1, 0) = q.v;
  r.block<3, 3>(1, 1) = q.w * Mat3::Identity() - hat(q.v);
  return r;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  if ((m + m.transpose()).norm() > 1e-10) {
    throw std::invalid_argument("vee: matrix is not skew-symmetric");
  }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Quat checked_unit(const Quat& q) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= kUnitTolerance)) {
    throw NonUnitQuaternionError("quaternion norm " + std::to_string(n) + " is not unit");
  }
  return {q.w / n, q.v / n};
}

Mat3 euler_rodrigues(const Quat& q_in) {
  const Quat q = checked_unit(q_in);
  const double q0 = q.w, q1 = q.v.x(), q2 = q.v.y(), q3 = q.v.z();
  Mat3 r;
  r << 1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q0 * q2 + q1 * q3),
       2 * (q0 * q3 + q1 * q2), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1),
       2 * (q1 * q3 - q0 * q2), 2 * (q0 * q1 + q2 * q3), 1 - 2 * (q1 * q1 + q2 * q2);
  return r;
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return r;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

Quat quat_from_euler(const EulerAngles& a) {
  const double cr = std::cos(a.roll / 2), sr = std::sin(a.roll / 2);
  const double cp = std::cos(a.pitch / 2), sp = std::sin(a.pitch / 2);
  const double cy = std::cos(a.yaw / 2), sy = std::sin(a.yaw / 2);
  // qz(yaw) * qy(pitch) * qx(roll)
  Quat q{cy * cp * cr + sy * sp * sr,
         cy * cp * sr - sy * sp * cr,
         cy * sp * cr + sy * cp * sr,
         sy * cp * cr - cy * sp * sr};
  if (q.w < 0.0) q = -q;
  return q;
}

namespace {

void check_pitch(double pitch, const char* where) {
  if (std::abs(pitch) > std::numbers::pi / 2 - kGimbalEps) {
    throw GimbalLockError(std::string(where) + ": pitch " + std::to_string(pitch) +
                          " too close to +-pi/2, Euler angles are singular");
  }
}

}  // namespace

EulerAngles euler_from_quat(const Quat& q) {
  const Mat3 r = euler_rodrigues(q);
  EulerAngles a;
  a.pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  check_pitch(a.pitch, "euler_from_quat");
  a.roll = std::atan2(r(2, 1), r(2, 2));
  a.yaw = std::atan2(r(1, 0), r(0, 0));
  return a;
}

Mat3 pi_e(const EulerAngles& a) {
  const double ct = std::cos(a.pitch), st = std::sin(a.pitch);
  const double cp = std::cos(a.yaw), sp = std::sin(a.yaw);
  Mat3 m;
  m << ct * cp, -sp, 0,
       ct * sp, cp, 0,
       -st, 0, 1;
  return m;
}

Mat3 pi_e_inv(const EulerAngles& a) {
  check_pitch(a.pitch, "pi_e_inv");
  const double ct = std::cos(a.pitch), tt = std::tan(a.pitch);
  const double cp = std::cos(a.yaw), sp = std::sin(a.yaw);
  Mat3 m;
  m << cp / ct, sp / ct, 0,
       -sp, cp, 0,
       tt * cp, tt * sp, 1;
  return m;
}

namespace detail {

Mat3 so3_exp_closed(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  return Mat3::Identity() + (std::sin(theta) / theta) * k +
         ((1.0 - std::cos(theta)) / (theta * theta)) * k * k;
}

Mat3 so3_exp_series(const Vec3& w) {
  const double t2 = w.squaredNorm();
  const Mat3 k = hat(w);
  const double a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0);
  const double b = 0.5 - t2 / 24.0 * (1.0 - t2 / 30.0);
  return Mat3::Identity() + a * k + b * k * k;
}

}  // namespace detail

Mat3 so3_exp(const Vec3& w) {
  return w.norm() < 1e-4 ? detail::so3_exp_series(w) : detail::so3_exp_closed(w);
}

Quat quat_exp(const Vec3& w) {
  const double theta = w.norm();
  const double half = 0.5 * theta;
  double sinc_half;  // sin(theta/2) / theta
  if (theta < 1e-4) {
    const double h2 = half * half;
    sinc_half = 0.5 * (1.0 - h2 / 6.0 * (1.0 - h2 / 20.0));
  } else {
    sinc_half = std::sin(half) / theta;
  }
  return {std::cos(half), sinc_half * w};
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

}  // namespace vsplit
