#include "vessel_split/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace vsplit {

namespace {

constexpr double kAgmTol = 1e-16;
constexpr int kMaxAgm = 32;

}  // namespace

double elliptic_K(double k) {
  k = std::abs(k);
  if (!(k < 1.0 - 1e-12)) throw std::domain_error("elliptic_K: modulus must satisfy k < 1");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < kMaxAgm && std::abs(a - b) > kAgmTol * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (a + b);
}

double elliptic_F(double phi, double k) {
  k = std::abs(k);
  if (k > 1.0) throw std::domain_error("elliptic_F: modulus must satisfy k <= 1");
  const double n = std::round(phi / std::numbers::pi);
  const double r = phi - n * std::numbers::pi;
  if (k == 1.0) {
    if (n != 0.0 || std::abs(r) >= std::numbers::pi / 2) {
      throw std::domain_error("elliptic_F: amplitude reaches the k = 1 singularity");
    }
    return std::atanh(std::sin(r));
  }
  const double base = std::ellint_1(k, std::abs(r));
  return 2.0 * n * elliptic_K(k) + std::copysign(base, r);
}

EllipticTriple jacobi_sn_cn_dn(double u, double k) {
  k = std::abs(k);
  if (k > 1.0) throw std::domain_error("jacobi_sn_cn_dn: modulus must satisfy k <= 1");
  if (k == 0.0) return {std::sin(u), std::cos(u), 1.0};
  if (k == 1.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }

  std::array<double, kMaxAgm + 1> a{};
  std::array<double, kMaxAgm + 1> c{};
  a[0] = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  c[0] = k;
  int n = 0;
  while (n < kMaxAgm && std::abs(c[n]) > kAgmTol * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }

  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) {
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn^2 = cn^2 + k'^2 sn^2 has no cancellation; the ratio cn / cos(phi_{1} - phi_0)
  // is 0/0 at odd quarter periods.
  const double kc2 = (1.0 - k) * (1.0 + k);
  return {sn, cn, std::sqrt(cn * cn + kc2 * sn * sn)};
}

Eigen::Matrix3d expm3(const Eigen::Matrix3d& z) { return expm<3>(z); }

PhiPair phi_functions(const Eigen::Matrix3d& z) {
  using Mat3 = Eigen::Matrix3d;
  if (z.cwiseAbs().colwise().sum().maxCoeff() < 1e-2) {
    // phi_1 = sum Z^k/(k+1)!, phi_2 = sum Z^k/(k+2)!
    Mat3 p1 = Mat3::Zero(), p2 = Mat3::Zero();
    Mat3 zk = Mat3::Identity();
    double f1 = 1.0, f2 = 0.5;
    for (int k = 0; k <= 10; ++k) {
      p1 += f1 * zk;
      p2 += f2 * zk;
      zk = zk * z;
      f1 /= (k + 2);
      f2 /= (k + 3);
    }
    return {p1, p2};
  }
  Eigen::Matrix<double, 9, 9> aug = Eigen::Matrix<double, 9, 9>::Zero();
  aug.block<3, 3>(0, 0) = z;
  aug.block<3, 3>(0, 3) = Mat3::Identity();
  aug.block<3, 3>(3, 6) = Mat3::Identity();
  const Eigen::Matrix<double, 9, 9> e = expm<9>(aug);
  return {e.block<3, 3>(0, 3), e.block<3, 3>(0, 6)};
}

Eigen::Matrix3d phi1(const Eigen::Matrix3d& z) { return phi_functions(z).phi1; }
Eigen::Matrix3d phi2(const Eigen::Matrix3d& z) { return phi_functions(z).phi2; }

Eigen::Vector3d affine_flow(const Eigen::Matrix3d& a, double gamma, const Eigen::Vector3d& y0,
                            const Eigen::Vector3d& w1, const Eigen::Vector3d& w2) {
  if (gamma == 0.0) return y0;
  const Eigen::Vector3d u = gamma * gamma * w2;
  const Eigen::Vector3d v = gamma * w1;
  // The forcing enters linearly, so it can be rescaled to keep the
  // augmented norm (and hence the number of squarings) governed by gamma*A.
  const double scale = std::max({1.0, u.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff()});
  Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
  m.block<3, 3>(0, 0) = gamma * a;
  m.block<3, 1>(0, 3) = u / scale;
  m.block<3, 1>(0, 4) = v / scale;
  m(3, 4) = 1.0;
  const Eigen::Matrix<double, 5, 5> e = expm<5>(m);
  return e.block<3, 3>(0, 0) * y0 + scale * e.block<3, 1>(0, 4);
}

}  // namespace vsplit
