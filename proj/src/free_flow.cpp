#include "vessel_split/free_flow.hpp"

#include "vessel_split/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vsplit {

namespace {

int levi_civita(int i, int j, int k) {
  return (i - j) * (j - k) * (k - i) / 2;
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

EulerTopSolution EulerTopSolution::solve(const Vec3& omega0, const Vec3& inertia) {
  EulerTopSolution sol;
  sol.omega0_ = omega0;

  const Vec3 m = inertia.cwiseProduct(omega0);
  const double wn = omega0.norm();
  if (wn == 0.0 || m.cross(omega0).norm() <= 1e-12 * m.norm() * wn) return sol;

  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return inertia[i] < inertia[j]; });
  const int lo = idx[0], mid = idx[1], hi = idx[2];

  const double e2 = omega0.dot(m);   // twice the kinetic energy
  const double m2 = m.squaredNorm();
  const double gap = m2 - e2 * inertia[mid];

  const bool distinct = !nearly_equal(inertia[mid], inertia[lo]) &&
                        !nearly_equal(inertia[mid], inertia[hi]);
  const bool separatrix = distinct && std::abs(gap) < 1e-10 * m2;

  const int c = gap >= 0.0 ? hi : lo;
  const int a = c == hi ? lo : hi;
  const int b = mid;
  const double ia = inertia[a], ib = inertia[b], ic = inertia[c];

  const double amp_a = std::sqrt(std::max(0.0, (e2 * ic - m2) / (ia * (ic - ia))));
  const double amp_b = std::sqrt(std::max(0.0, (e2 * ic - m2) / (ib * (ic - ib))));
  const double amp_c = std::sqrt(std::max(0.0, (m2 - e2 * ia) / (ic * (ic - ia))));
  sol.lambda_ = std::sqrt((ic - ib) * (m2 - e2 * ia) / (ia * ib * ic));
  if (separatrix) {
    sol.k_ = 1.0;
  } else {
    const double k2 = (ib - ia) * (e2 * ic - m2) / ((ic - ib) * (m2 - e2 * ia));
    sol.k_ = std::sqrt(std::clamp(k2, 0.0, 1.0));
  }
  sol.case_ = separatrix ? TopCase::separatrix : TopCase::generic_elliptic;

  // Sign bookkeeping so the Euler equations hold with lambda > 0.
  const double eps = sign_of(omega0[c]);
  const double alpha = separatrix ? sign_of(omega0[a]) : 1.0;
  const double sigma = -alpha * eps * levi_civita(a, b, c) * sign_of(ib - ic);
  sol.amp_ = Vec3(alpha * amp_a, sigma * amp_b, eps * amp_c);
  sol.axes_ = {a, b, c};

  const double sn0 = amp_b > 0.0 ? omega0[b] / sol.amp_[1] : 0.0;
  const double cn0 = amp_a > 0.0 ? omega0[a] / sol.amp_[0] : 1.0;
  double amplitude_angle = std::atan2(sn0, cn0);
  if (separatrix) {
    // cn0 >= 0 here; keep strictly inside (-pi/2, pi/2)
    amplitude_angle = std::clamp(amplitude_angle, -std::numbers::pi / 2 + 1e-15,
                                 std::numbers::pi / 2 - 1e-15);
  }
  sol.u0_ = elliptic_F(amplitude_angle, sol.k_);
  return sol;
}

Vec3 EulerTopSolution::operator()(double t) const {
  if (case_ == TopCase::axis_equilibrium) return omega0_;
  const EllipticTriple e = jacobi_sn_cn_dn(lambda_ * t + u0_, k_);
  Vec3 w;
  w[axes_[0]] = amp_[0] * e.cn;
  w[axes_[1]] = amp_[1] * e.sn;
  w[axes_[2]] = amp_[2] * e.dn;
  return w;
}

Vec3 magnus_rotation_vector(const EulerTopSolution& sol, double gamma, int order) {
  // Left-invariant form of the Magnus series for Y' = A(t) Y applied to
  // A = -hat(w); the body-frame rotation vector is its negative.
  auto a = [&](double c) -> Vec3 { return -gamma * sol(c * gamma); };
  Vec3 omega_left;
  switch (order) {
    case 2:
      omega_left = a(0.5);
      break;
    case 4: {
      const double d = std::sqrt(3.0) / 6.0;
      const Vec3 a1 = a(0.5 - d), a2 = a(0.5 + d);
      omega_left = 0.5 * (a1 + a2) - (std::sqrt(3.0) / 12.0) * a1.cross(a2);
      break;
    }
    case 6: {
      const double d = std::sqrt(15.0) / 10.0;
      const Vec3 a1 = a(0.5 - d), a2 = a(0.5), a3 = a(0.5 + d);
      const Vec3 b1 = a2;
      const Vec3 b2 = (std::sqrt(15.0) / 3.0) * (a3 - a1);
      const Vec3 b3 = (10.0 / 3.0) * (a3 - 2.0 * a2 + a1);
      const Vec3 c1 = b1.cross(b2);
      const Vec3 c2 = -(1.0 / 60.0) * b1.cross(2.0 * b3 + c1);
      omega_left = b1 + b3 / 12.0 + (1.0 / 240.0) * (-20.0 * b1 - b3 + c1).cross(b2 + c2);
      break;
    }
    default:
      throw std::invalid_argument("magnus order must be 2, 4 or 6");
  }
  return -omega_left;
}

Quat magnus_attitude(const Quat& q0, const EulerTopSolution& sol, double gamma, int order) {
  if (gamma == 0.0) return q0;
  return (q0 * quat_exp(magnus_rotation_vector(sol, gamma, order))).normalized();
}

State s1_flow(const State& s, double gamma, const Vec3& x_ref, const Vec3& inertia, int order) {
  if (gamma == 0.0) return s;
  const EulerTopSolution sol = EulerTopSolution::solve(s.omega, inertia);
  const Mat3 rot0 = euler_rodrigues(s.q);
  const Vec3 dx = rot0 * s.v;

  State r = s;
  r.omega = sol(gamma);
  r.q = magnus_attitude(s.q, sol, gamma, order);
  r.v = euler_rodrigues(r.q).transpose() * dx;
  r.x = s.x + gamma * dx;
  r.phi_x = s.phi_x + gamma * (s.x - x_ref) + 0.5 * gamma * gamma * dx;
  return r;
}

}  // namespace vsplit
