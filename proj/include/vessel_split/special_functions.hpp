#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace vsplit {

struct EllipticTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

/// Complete elliptic integral of the first kind K(k), by the
/// arithmetic-geometric mean. Throws std::domain_error for k >= 1 - 1e-12.
double elliptic_K(double k);

/// Incomplete integral F(phi, k) for any real amplitude phi; k in [0, 1].
/// At k = 1 the amplitude must satisfy |phi| < pi/2.
double elliptic_F(double phi, double k);

/// Jacobi sn, cn, dn of argument u and modulus k in [0, 1], by descending
/// Landen (AGM) transformation. k = 0 and k = 1 use the closed forms.
EllipticTriple jacobi_sn_cn_dn(double u, double k);

/// Fixed-size matrix exponential: scaling so that |Z|_1 / 2^s <= 0.5,
/// Taylor series through Z^13, then s squarings.
template <int N>
Eigen::Matrix<double, N, N> expm(const Eigen::Matrix<double, N, N>& z) {
  using M = Eigen::Matrix<double, N, N>;
  const double norm = z.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const M a = z / std::ldexp(1.0, s);
  M term = M::Identity();
  M sum = M::Identity();
  for (int k = 1; k <= 13; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

Eigen::Matrix3d expm3(const Eigen::Matrix3d& z);

struct PhiPair {
  Eigen::Matrix3d phi1;
  Eigen::Matrix3d phi2;
};

/// phi_1(Z) and phi_2(Z), where phi_k(z) = 1/(k-1)! int_0^1 e^{z(1-x)} x^{k-1} dx.
/// Well defined for singular Z.
PhiPair phi_functions(const Eigen::Matrix3d& z);
Eigen::Matrix3d phi1(const Eigen::Matrix3d& z);
Eigen::Matrix3d phi2(const Eigen::Matrix3d& z);

/// Solution at time gamma of y' = A y + w1 + sigma w2, y(0) = y0:
///   e^{gamma A} y0 + gamma phi_1(gamma A) w1 + gamma^2 phi_2(gamma A) w2,
/// evaluated with one 5x5 exponential of the augmented matrix.
Eigen::Vector3d affine_flow(const Eigen::Matrix3d& a, double gamma, const Eigen::Vector3d& y0,
                            const Eigen::Vector3d& w1, const Eigen::Vector3d& w2);

}  // namespace vsplit
