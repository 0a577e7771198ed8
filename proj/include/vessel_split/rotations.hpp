#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace vsplit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Distance from pitch = +-pi/2 at which Euler-angle maps are declared singular.
inline constexpr double kGimbalEps = 1e-6;

/// Quaternions within this distance of unit norm are renormalized silently.
inline constexpr double kUnitTolerance = 1e-8;

class GimbalLockError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NonUnitQuaternionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quaternion q = (w, v) with real part w and imaginary part v.
/// Used both as a general element of H and, when unit, as attitude.
struct Quat {
  double w = 1.0;
  Vec3 v = Vec3::Zero();

  Quat() = default;
  Quat(double w_, const Vec3& v_) : w(w_), v(v_) {}
  Quat(double w_, double x, double y, double z) : w(w_), v(x, y, z) {}

  static Quat identity() { return {}; }
  static Quat from_coeffs(const Eigen::Vector4d& c) { return {c[0], Vec3(c[1], c[2], c[3])}; }

  Eigen::Vector4d coeffs() const { return {w, v.x(), v.y(), v.z()}; }
  double norm() const { return std::sqrt(w * w + v.squaredNorm()); }
  Quat conj() const { return {w, -v}; }
  Quat normalized() const {
    const double n = norm();
    return {w / n, v / n};
  }
  Quat operator+(const Quat& o) const { return {w + o.w, v + o.v}; }
  Quat operator-(const Quat& o) const { return {w - o.w, v - o.v}; }
  Quat operator-() const { return {-w, -v}; }
  Quat operator*(double s) const { return {w * s, v * s}; }
};

/// Hamilton product (p0 q0 - p.q, p0 q + q0 p + p x q).
Quat operator*(const Quat& p, const Quat& q);

/// 4x4 matrices with p*q = L(p) q = R(q) p.
Eigen::Matrix4d left_matrix(const Quat& p);
Eigen::Matrix4d right_matrix(const Quat& q);

/// Roll, pitch, yaw for Q = Rz(yaw) Ry(pitch) Rx(roll).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Vec3 as_vector() const { return {roll, pitch, yaw}; }
  static EulerAngles from_vector(const Vec3& a) { return {a[0], a[1], a[2]}; }
};

Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws std::invalid_argument when |M + M^T| > 1e-10.
Vec3 vee(const Mat3& m);

/// Euler-Rodrigues map E(q) = I + 2 q0 hat(qv) + 2 hat(qv)^2.
/// Inputs within kUnitTolerance of unit norm are renormalized, others throw.
Mat3 euler_rodrigues(const Quat& q);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// Unit quaternion of Rz(yaw) Ry(pitch) Rx(roll), canonicalized to w >= 0.
Quat quat_from_euler(const EulerAngles& a);

/// ZYX extraction. Throws GimbalLockError within kGimbalEps of pitch = +-pi/2.
EulerAngles euler_from_quat(const Quat& q);

/// Euler-rate matrix: spatial angular velocity = pi_e(theta) * d(theta)/dt.
Mat3 pi_e(const EulerAngles& a);

/// Analytic inverse of pi_e. Throws GimbalLockError near pitch = +-pi/2.
Mat3 pi_e_inv(const EulerAngles& a);

/// exp(hat(w)) by Rodrigues' formula, switching to a series for tiny |w|.
Mat3 so3_exp(const Vec3& w);

namespace detail {
Mat3 so3_exp_closed(const Vec3& w);
Mat3 so3_exp_series(const Vec3& w);
}  // namespace detail

/// Unit quaternion (cos(|w|/2), sin(|w|/2) w/|w|), so that E(result) = so3_exp(w).
Quat quat_exp(const Vec3& w);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Throws NonUnitQuaternionError if |q| is off by more than kUnitTolerance,
/// otherwise returns q normalized.
Quat checked_unit(const Quat& q);

}  // namespace vsplit
