#pragma once

#include "vessel_split/rotations.hpp"
#include "vessel_split/vessel_model.hpp"

#include <array>

namespace vsplit {

enum class TopCase { axis_equilibrium, generic_elliptic, separatrix };

/// Closed-form solution of the torque-free Euler equations T w' = T w x w.
///
/// With the principal axes relabelled (a, b, c), where b carries the middle
/// inertia and c is the axis the motion circulates around,
///   w_a = A_a cn(lambda t + u0, k), w_b = A_b sn(...), w_c = A_c dn(...),
/// with signed amplitudes. On the separatrix (k = 1) cn and dn become sech.
/// Rotation about a principal axis, or any w parallel to T w, is constant.
class EulerTopSolution {
 public:
  static EulerTopSolution solve(const Vec3& omega0, const Vec3& inertia);

  Vec3 operator()(double t) const;

  TopCase case_tag() const { return case_; }
  double modulus() const { return k_; }
  double frequency() const { return lambda_; }
  /// Signed amplitudes of the cn, sn and dn components.
  const Vec3& amplitudes() const { return amp_; }
  double phase() const { return u0_; }
  /// Original axis index carried by the cn, sn and dn components.
  const std::array<int, 3>& axis_permutation() const { return axes_; }

 private:
  TopCase case_ = TopCase::axis_equilibrium;
  double k_ = 0.0;
  double lambda_ = 0.0;
  Vec3 amp_ = Vec3::Zero();
  double u0_ = 0.0;
  std::array<int, 3> axes_{0, 1, 2};
  Vec3 omega0_ = Vec3::Zero();
};

/// Attitude after time gamma of q' = 1/2 q (0, w(t)) with w(t) taken from the
/// exact Euler-top solution, by the Magnus expansion truncated at order 2, 4
/// or 6 (1, 2 or 3 Gauss-Legendre samples). The result is renormalized.
Quat magnus_attitude(const Quat& q0, const EulerTopSolution& sol, double gamma, int order);

/// Rotation vector Omega with Q(gamma) = Q0 exp(hat(Omega)), for the given
/// body angular velocity samples at the Gauss-Legendre nodes of the order.
Vec3 magnus_rotation_vector(const EulerTopSolution& sol, double gamma, int order);

/// Exact flow (up to the Magnus truncation in the attitude) of the free
/// rigid-body sub-system over time gamma.
State s1_flow(const State& s, double gamma, const Vec3& x_ref, const Vec3& inertia, int order);

}  // namespace vsplit
