#include "oracles.hpp"
#include "vessel_split/rotations.hpp"
#include "vessel_split/special_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace vsplit;
using Eigen::Matrix3d;

namespace {

// AGM iterated until the two means coincide exactly.
double agm_K(double k) {
  double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 100 && a != b; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    if (an == a) break;
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

}  // namespace

TEST_CASE("complete elliptic integral") {
  CHECK(elliptic_K(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-16));
  for (double k : {0.1, 0.5, 0.9, 0.99, 0.999999}) {
    CHECK(std::abs(elliptic_K(k) - agm_K(k)) <= 2e-15 * agm_K(k));
  }
  for (double k : {0.1, 0.5, 0.9, 0.99}) {
    CHECK(std::abs(elliptic_K(k) - std::comp_ellint_1(k)) <= 4e-15 * agm_K(k));
  }
  // 30-digit value; the library's comp_ellint_1 loses ~1e-12 this close to 1
  CHECK(std::abs(elliptic_K(0.999999) - 7.94747977354796703266620036207) < 1e-14);
  CHECK_THROWS_AS(elliptic_K(1.0), std::domain_error);
  CHECK_THROWS_AS(elliptic_K(1.0 - 1e-13), std::domain_error);
  CHECK(elliptic_K(1.0 - 1e-11) > 10.0);
}

TEST_CASE("incomplete integral inverts the amplitude") {
  for (double k : {0.0, 0.3, 0.8, 0.99}) {
    for (double phi : {-5.0, -1.0, 0.0, 0.4, 1.5, 3.0, 7.0}) {
      const double u = elliptic_F(phi, k);
      const EllipticTriple t = jacobi_sn_cn_dn(u, k);
      CHECK(std::abs(t.sn - std::sin(phi)) < 1e-13);
      CHECK(std::abs(t.cn - std::cos(phi)) < 1e-13);
    }
  }
  CHECK(elliptic_F(0.5, 1.0) == doctest::Approx(std::atanh(std::sin(0.5))));
}

TEST_CASE("Jacobi functions: special values and degenerations") {
  for (double k : {0.0, 0.2, 0.7, 1.0}) {
    const EllipticTriple t = jacobi_sn_cn_dn(0.0, k);
    CHECK(t.sn == 0.0);
    CHECK(t.cn == 1.0);
    CHECK(t.dn == 1.0);
  }
  for (double u : {-3.0, -0.4, 0.9, 12.0}) {
    const EllipticTriple t0 = jacobi_sn_cn_dn(u, 0.0);
    CHECK(std::abs(t0.sn - std::sin(u)) < 1e-15);
    CHECK(std::abs(t0.cn - std::cos(u)) < 1e-15);
    CHECK(t0.dn == 1.0);
    const EllipticTriple t1 = jacobi_sn_cn_dn(u, 1.0);
    CHECK(std::abs(t1.sn - std::tanh(u)) < 1e-15);
    CHECK(std::abs(t1.cn - 1.0 / std::cosh(u)) < 1e-15);
    CHECK(std::abs(t1.dn - 1.0 / std::cosh(u)) < 1e-15);
  }
  // close to the degenerate moduli the general path joins the limits
  CHECK(std::abs(jacobi_sn_cn_dn(0.8, 1e-9).sn - std::sin(0.8)) < 1e-12);
  CHECK(std::abs(jacobi_sn_cn_dn(0.8, 1.0 - 1e-12).sn - std::tanh(0.8)) < 1e-10);
}

TEST_CASE("Jacobi identities over a grid of moduli and arguments") {
  std::vector<double> ks;
  for (int i = 0; i <= 9; ++i) ks.push_back(0.1 * i);
  ks.push_back(0.99);
  ks.push_back(1.0);
  for (double k : ks) {
    const double big_k = k < 1.0 ? elliptic_K(k) : 5.0;
    for (int j = -40; j <= 40; ++j) {
      const double u = 4.0 * big_k * j / 40.0;
      const EllipticTriple t = jacobi_sn_cn_dn(u, k);
      CHECK(std::abs(t.sn * t.sn + t.cn * t.cn - 1.0) < 1e-13);
      CHECK(std::abs(t.dn * t.dn + k * k * t.sn * t.sn - 1.0) < 1e-13);
    }
  }
}

TEST_CASE("Jacobi periodicity and derivative consistency") {
  oracle::Rng rng(11);
  for (double k : {0.1, 0.5, 0.9, 0.99}) {
    const double four_k = 4.0 * elliptic_K(k);
    for (int i = 0; i < 20; ++i) {
      const double u = rng.uniform(-10, 10);
      CHECK(std::abs(jacobi_sn_cn_dn(u + four_k, k).sn - jacobi_sn_cn_dn(u, k).sn) < 1e-11);
      CHECK(std::abs(jacobi_sn_cn_dn(u + four_k, k).cn - jacobi_sn_cn_dn(u, k).cn) < 1e-11);
      // sn' = cn dn by central differences
      const double d = 1e-5;
      const double fd = (jacobi_sn_cn_dn(u + d, k).sn - jacobi_sn_cn_dn(u - d, k).sn) / (2 * d);
      const EllipticTriple t = jacobi_sn_cn_dn(u, k);
      CHECK(std::abs(fd - t.cn * t.dn) < 1e-9);
    }
  }
}

TEST_CASE("Jacobi addition theorem at u/2") {
  oracle::Rng rng(12);
  for (double k : {0.0, 0.3, 0.75, 0.95, 1.0}) {
    for (int i = 0; i < 25; ++i) {
      const double u = rng.uniform(-8, 8);
      const EllipticTriple h = jacobi_sn_cn_dn(0.5 * u, k);
      const EllipticTriple f = jacobi_sn_cn_dn(u, k);
      const double den = 1.0 - k * k * std::pow(h.sn, 4);
      CHECK(std::abs(f.sn - 2.0 * h.sn * h.cn * h.dn / den) < 1e-10);
      CHECK(std::abs(f.cn - (h.cn * h.cn - h.sn * h.sn * h.dn * h.dn) / den) < 1e-10);
      CHECK(std::abs(f.dn - (h.dn * h.dn - k * k * h.sn * h.sn * h.cn * h.cn) / den) < 1e-10);
    }
  }
}

TEST_CASE("3x3 matrix exponential") {
  CHECK((expm3(Matrix3d::Zero()) - Matrix3d::Identity()).norm() == 0.0);
  const Eigen::Vector3d d(0.3, -2.0, 4.5);
  const Matrix3d e = expm3(Matrix3d(d.asDiagonal()));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(e(i, i) - std::exp(d[i])) <= 1e-13 * std::exp(d[i]));
  CHECK(std::abs(e(0, 1)) + std::abs(e(1, 2)) == 0.0);

  oracle::Rng rng(13);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d w = rng.vec3(-3, 3);
    CHECK((expm3(hat(w)) - so3_exp(w)).norm() < 1e-13);
    Matrix3d z;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) z(r, c) = rng.uniform(-1.5, 1.5);
    const Matrix3d ez = expm3(z);
    CHECK((ez * expm3(-z) - Matrix3d::Identity()).norm() < 1e-12);
    const double s = rng.uniform(-1, 1), t = rng.uniform(-1, 1);
    CHECK((expm3((s + t) * z) - expm3(s * z) * expm3(t * z)).norm() < 1e-11 * expm3((s + t) * z).norm());
    const Eigen::MatrixXd ref = oracle::expm_taylor(z);
    CHECK((ez - ref).norm() < 1e-13 * ref.norm());
  }
}

TEST_CASE("phi functions: closed values") {
  const PhiPair zero = phi_functions(Matrix3d::Zero());
  CHECK((zero.phi1 - Matrix3d::Identity()).norm() == 0.0);
  CHECK((zero.phi2 - 0.5 * Matrix3d::Identity()).norm() == 0.0);
  const PhiPair one = phi_functions(Matrix3d::Identity());
  CHECK(std::abs(one.phi1(0, 0) - (std::exp(1.0) - 1.0)) < 1e-14);
  CHECK(std::abs(one.phi2(0, 0) - (std::exp(1.0) - 2.0)) < 1e-14);
  CHECK(std::abs(one.phi1(0, 1)) == 0.0);
}

TEST_CASE("phi functions match quadrature of their defining integrals") {
  oracle::Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    Matrix3d z;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) z(r, c) = rng.uniform(-1, 1);
    z *= 5.0 / z.norm();
    auto integrand = [&](int kind) {
      return [&, kind](double x) {
        const Eigen::MatrixXd e = oracle::expm_taylor(z * (1.0 - x));
        Eigen::MatrixXd m = kind == 1 ? e : Eigen::MatrixXd(e * x);
        return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(m.data(), 9));
      };
    };
    const Eigen::VectorXd q1 = oracle::simpson(integrand(1), 0.0, 1.0, 1e-13);
    const Eigen::VectorXd q2 = oracle::simpson(integrand(2), 0.0, 1.0, 1e-13);
    const PhiPair p = phi_functions(z);
    const Eigen::VectorXd p1 = Eigen::Map<const Eigen::VectorXd>(p.phi1.data(), 9);
    const Eigen::VectorXd p2 = Eigen::Map<const Eigen::VectorXd>(p.phi2.data(), 9);
    CHECK(oracle::rel_err(p1, q1) < 1e-10);
    CHECK(oracle::rel_err(p2, q2) < 1e-10);
  }
}

TEST_CASE("phi recurrences hold for invertible, singular and tiny matrices") {
  oracle::Rng rng(15);
  std::vector<Matrix3d> cases;
  for (int i = 0; i < 10; ++i) {
    Matrix3d z;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) z(r, c) = rng.uniform(-2, 2);
    cases.push_back(z);
    // rank-deficient: two equal rows, or a rank-one product
    Matrix3d s = z;
    s.row(2) = s.row(0);
    cases.push_back(s);
    const Eigen::Vector3d a = rng.vec3(-1, 1), b = rng.vec3(-1, 1);
    cases.push_back(a * b.transpose());
    cases.push_back(1e-4 * z);
    cases.push_back(hat(rng.vec3(-2, 2)));
  }
  cases.push_back(Matrix3d::Zero());
  for (const Matrix3d& z : cases) {
    const PhiPair p = phi_functions(z);
    const Matrix3d e = expm3(z);
    CHECK((e - (Matrix3d::Identity() + z * p.phi1)).norm() < 1e-12 * std::max(1.0, e.norm()));
    CHECK((p.phi1 - (Matrix3d::Identity() + z * p.phi2)).norm() < 1e-12 * std::max(1.0, p.phi1.norm()));
    CHECK((phi1(z) - p.phi1).norm() == 0.0);
    CHECK((phi2(z) - p.phi2).norm() == 0.0);
  }
}

TEST_CASE("affine flow solves the forced linear system") {
  oracle::Rng rng(16);
  for (int i = 0; i < 10; ++i) {
    Matrix3d a;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = rng.uniform(-1, 1);
    const Eigen::Vector3d y0 = rng.vec3(-1, 1), w1 = rng.vec3(-1, 1), w2 = rng.vec3(-1, 1);
    const double gamma = rng.uniform(0.1, 2.0);
    const Eigen::Vector3d got = affine_flow(a, gamma, y0, w1, w2);
    const PhiPair p = phi_functions(gamma * a);
    const Eigen::Vector3d formula = expm3(gamma * a) * y0 + gamma * p.phi1 * w1 + gamma * gamma * p.phi2 * w2;
    CHECK(oracle::rel_err(got, formula) < 1e-13);
    const oracle::Field f = [&](double t, const oracle::Vec& y) -> oracle::Vec {
      return a * Eigen::Vector3d(y) + w1 + t * w2;
    };
    CHECK(oracle::rel_err(got, oracle::rk4(f, y0, gamma, 20000)) < 1e-12);
  }
  CHECK((affine_flow(Matrix3d::Zero(), 0.0, Eigen::Vector3d(1, 2, 3), Eigen::Vector3d::Ones(),
                     Eigen::Vector3d::Ones()) -
         Eigen::Vector3d(1, 2, 3))
            .norm() == 0.0);
}
