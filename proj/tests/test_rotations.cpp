#include "oracles.hpp"
#include "vessel_split/rotations.hpp"

#include <doctest.h>

#include <numbers>

using namespace vsplit;
using std::numbers::pi;

namespace {

Mat3 rz_formula(double psi) {
  Mat3 r;
  r << std::cos(psi), -std::sin(psi), 0, std::sin(psi), std::cos(psi), 0, 0, 0, 1;
  return r;
}

}  // namespace

TEST_CASE("hat matches the displayed skew matrix and the cross product") {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((hat(Vec3(1, 2, 3)) - expected).norm() == 0.0);
  CHECK(hat(Vec3::Zero()).norm() == 0.0);
  CHECK((hat(Vec3::UnitX()) * Vec3::UnitY() - Vec3::UnitZ()).norm() == 0.0);

  oracle::Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Vec3 v = rng.vec3(-5, 5), u = rng.vec3(-5, 5);
    CHECK((hat(v) * u - v.cross(u)).norm() < 1e-13);
    CHECK((hat(2.0 * v + u) - (2.0 * hat(v) + hat(u))).norm() < 1e-13);
  }
}

TEST_CASE("vee inverts hat and rejects non-skew input") {
  Mat3 m;
  m << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((vee(m) - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK(vee(Mat3::Zero()).norm() == 0.0);
  oracle::Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec3 v = rng.vec3(-3, 3);
    CHECK((vee(hat(v)) - v).norm() == 0.0);
  }
  CHECK_THROWS_AS(vee(Mat3::Identity()), std::invalid_argument);
}

TEST_CASE("quaternion product: identity, pure-quaternion case, matrix forms") {
  oracle::Rng rng(3);
  const Quat q = rng.unit_quat();
  CHECK(((Quat::identity() * q).coeffs() - q.coeffs()).norm() == 0.0);
  const Quat e3 = Quat(0, 1, 0, 0) * Quat(0, 0, 1, 0);
  CHECK((e3.coeffs() - Eigen::Vector4d(0, 0, 0, 1)).norm() == 0.0);

  for (int i = 0; i < 50; ++i) {
    const Quat p(rng.uniform(-2, 2), rng.vec3(-2, 2));
    const Quat r(rng.uniform(-2, 2), rng.vec3(-2, 2));
    const Quat s(rng.uniform(-2, 2), rng.vec3(-2, 2));
    const Eigen::Vector4d pr = (p * r).coeffs();
    CHECK((pr - left_matrix(p) * r.coeffs()).norm() < 1e-13);
    CHECK((pr - right_matrix(r) * p.coeffs()).norm() < 1e-13);
    CHECK(std::abs((p * r).norm() - p.norm() * r.norm()) < 1e-13 * p.norm() * r.norm());
    CHECK((((p * r) * s).coeffs() - (p * (r * s)).coeffs()).norm() < 1e-12);
    CHECK(((p * (r + s)).coeffs() - (p * r + p * s).coeffs()).norm() < 1e-12);
  }
}

TEST_CASE("conjugate of a unit quaternion is its inverse") {
  oracle::Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Quat q = rng.unit_quat();
    CHECK(((q * q.conj()).coeffs() - Eigen::Vector4d(1, 0, 0, 0)).norm() < 1e-14);
  }
}

TEST_CASE("Euler-Rodrigues map") {
  CHECK((euler_rodrigues(Quat::identity()) - Mat3::Identity()).norm() == 0.0);
  const Quat qz(std::cos(pi / 4), 0, 0, std::sin(pi / 4));
  CHECK((euler_rodrigues(qz) - rz_formula(pi / 2)).norm() < 1e-15);

  oracle::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Quat p = rng.unit_quat(), q = rng.unit_quat();
    const Mat3 r = euler_rodrigues(q);
    CHECK((r - euler_rodrigues(-q)).norm() < 1e-15);
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    // homomorphism
    CHECK((euler_rodrigues(p * q) - euler_rodrigues(p) * r).norm() < 1e-12);
    // rotates vectors like conjugation q (0,u) q^c
    const Vec3 u = rng.vec3(-1, 1);
    CHECK(((q * Quat(0, u) * q.conj()).v - r * u).norm() < 1e-14);
  }
}

TEST_CASE("Euler-Rodrigues tolerates tiny norm drift and rejects larger") {
  const Quat nearly(1.0 + 5e-9, 0, 0, 0);
  CHECK((euler_rodrigues(nearly) - Mat3::Identity()).norm() < 1e-15);
  CHECK_THROWS_AS(euler_rodrigues(Quat(1.0 + 1e-6, 0, 0, 0)), NonUnitQuaternionError);
}

TEST_CASE("quaternion from Euler angles follows Rz Ry Rx") {
  CHECK((quat_from_euler({0, 0, 0}).coeffs() - Eigen::Vector4d(1, 0, 0, 0)).norm() == 0.0);
  const double psi = 0.7;
  CHECK((quat_from_euler({0, 0, psi}).coeffs() -
         Eigen::Vector4d(std::cos(psi / 2), 0, 0, std::sin(psi / 2)))
            .norm() < 1e-16);

  oracle::Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const EulerAngles a{rng.uniform(-pi, pi), rng.uniform(-1.4, 1.4), rng.uniform(-pi, pi)};
    const Quat q = quat_from_euler(a);
    CHECK(q.w >= 0.0);
    const Mat3 expected = rot_z(a.yaw) * rot_y(a.pitch) * rot_x(a.roll);
    CHECK((euler_rodrigues(q) - expected).norm() < 1e-12);
    CHECK((rot_z(a.yaw) - rz_formula(a.yaw)).norm() < 1e-16);
  }
}

TEST_CASE("Euler extraction round trips") {
  const EulerAngles zero = euler_from_quat(Quat::identity());
  CHECK(zero.as_vector().norm() == 0.0);

  const EulerAngles a0{0.05, -0.02, 0.10};
  CHECK((euler_from_quat(quat_from_euler(a0)).as_vector() - a0.as_vector()).norm() < 1e-12);

  oracle::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const EulerAngles a{rng.uniform(-pi, pi), rng.uniform(-1.4, 1.4), rng.uniform(-pi, pi)};
    const EulerAngles b = euler_from_quat(quat_from_euler(a));
    Vec3 d = b.as_vector() - a.as_vector();
    for (int k = 0; k < 3; ++k) d[k] = wrap_angle(d[k]);
    CHECK(d.norm() < 1e-10);
    CHECK(b.roll > -pi);
    CHECK(b.roll <= pi);
  }
  // sign of q does not matter
  for (int i = 0; i < 50; ++i) {
    const Quat q = rng.tame_quat();
    CHECK((euler_from_quat(q).as_vector() - euler_from_quat(-q).as_vector()).norm() < 1e-14);
    const Quat back = quat_from_euler(euler_from_quat(q));
    const double same = std::min((back.coeffs() - q.coeffs()).norm(), (back.coeffs() + q.coeffs()).norm());
    CHECK(same < 1e-12);
  }
}

TEST_CASE("Euler extraction refuses gimbal lock") {
  CHECK_THROWS_AS(euler_from_quat(quat_from_euler({0.1, pi / 2, 0.2})), GimbalLockError);
  CHECK_THROWS_AS(euler_from_quat(quat_from_euler({0.0, -pi / 2 + 1e-8, 0.0})), GimbalLockError);
  CHECK_NOTHROW(euler_from_quat(quat_from_euler({0.0, pi / 2 - 1e-3, 0.0})));
}

TEST_CASE("Euler-angle kinematic matrix and its inverse") {
  CHECK((pi_e({0, 0, 0}) - Mat3::Identity()).norm() < 1e-16);
  const EulerAngles a{0.0, 0.3, 0.7};
  const Mat3 numeric = pi_e(a).inverse();  // generic LU inverse as the oracle
  CHECK((pi_e_inv(a) - numeric).norm() < 1e-13);

  oracle::Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const EulerAngles b{rng.uniform(-pi, pi), rng.uniform(-1.4, 1.4), rng.uniform(-pi, pi)};
    CHECK((pi_e(b) * pi_e_inv(b) - Mat3::Identity()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(pi_e_inv({0.0, pi / 2, 0.0}), GimbalLockError);
}

TEST_CASE("Euler-angle rates follow from the quaternion kinematics") {
  // theta' computed by central differences along q' = 1/2 q (0, omega) must
  // equal pi_e_inv * E(q) * omega.
  oracle::Rng rng(9);
  const double d = 1e-6;
  for (int i = 0; i < 30; ++i) {
    const Quat q = rng.tame_quat();
    const Vec3 w = rng.vec3(-1, 1);
    auto at = [&](double t) {
      // exact flow for constant body rate
      const double n = w.norm();
      const Quat step(std::cos(0.5 * n * t), std::sin(0.5 * n * t) * w / n);
      return euler_from_quat((q * step).normalized()).as_vector();
    };
    Vec3 fd = (at(d) - at(-d)) / (2 * d);
    const EulerAngles a = euler_from_quat(q);
    const Vec3 analytic = pi_e_inv(a) * euler_rodrigues(q) * w;
    CHECK((fd - analytic).norm() < 1e-6);
  }
}

TEST_CASE("SO(3) exponential") {
  CHECK((so3_exp(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  CHECK((so3_exp(Vec3(0, 0, pi / 2)) - rz_formula(pi / 2)).norm() < 1e-15);

  oracle::Rng rng(10);
  for (int i = 0; i < 50; ++i) {
    const Vec3 w = rng.vec3(-2, 2);
    const Mat3 r = so3_exp(w);
    const Vec3 v = rng.vec3(-1, 1);
    CHECK(std::abs((r * v).norm() - v.norm()) < 1e-14);
    CHECK((r * w - w).norm() < 1e-14);
    CHECK((r.transpose() * r - Mat3::Identity()).norm() < 1e-14);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-14);
    // angle between v_perp and its image is |w|
    const Vec3 axis = w.normalized();
    const Vec3 perp = (v - axis * axis.dot(v)).normalized();
    CHECK(std::abs(std::acos(std::clamp(perp.dot(r * perp), -1.0, 1.0)) - std::min(w.norm(), 2 * pi - w.norm())) < 1e-7);
    // quaternion form agrees
    CHECK((euler_rodrigues(quat_exp(w)) - r).norm() < 1e-14);
  }
  for (int i = 0; i < 20; ++i) {
    const Vec3 w = rng.vec3(-1, 1).normalized() * 1e-9;
    CHECK((detail::so3_exp_series(w) - detail::so3_exp_closed(w)).norm() < 1e-15);
  }
}

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(0.54) == 0.54);
}
