#include "vessel_split/linear_flow.hpp"

#include "vessel_split/special_functions.hpp"

namespace vsplit {

S2Operators build_s2_operators(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                               bool active) {
  const Mat3 rot = euler_rodrigues(s.q);
  const ControlErrors e = control_errors(s, ctrl);
  const Vec3 inv_t = p.inertia.cwiseInverse();

  S2Operators op;
  op.theta_tilde = e.theta_tilde;
  op.A = Mat3((-inv_t.cwiseProduct(p.damping_rot)).asDiagonal());
  op.B = Mat3((-p.damping_trans / p.mass).asDiagonal());

  Vec3 moment = rot.transpose() * restoring_moment(s.q, p);
  Vec3 force = rot.transpose() * restoring_force(s.x, p);

  if (active) {
    // j = Pi_e^-1 Q0 maps body rates to Euler-angle rates.
    const Mat3 j = pi_e_inv(e.theta) * rot;
    op.A -= inv_t.asDiagonal() * (j.transpose() * ctrl.kd_rot.asDiagonal() * j);
    op.B -= rot.transpose() * ctrl.kd_trans.asDiagonal() * rot / p.mass;
    moment += j.transpose() * (ctrl.kp_rot.cwiseProduct(e.theta_tilde) +
                               ctrl.ki_rot.cwiseProduct(s.phi_theta));
    const Vec3 ramp = ctrl.w_r2_uses_absolute_theta ? e.theta.as_vector() : e.theta_tilde;
    op.w_r2 = -(j.transpose() * ctrl.ki_rot.cwiseProduct(ramp)).cwiseProduct(inv_t);
    force += rot.transpose() * (ctrl.kp_trans.cwiseProduct(s.x - ctrl.x_ref) +
                                ctrl.ki_trans.cwiseProduct(s.phi_x));
  }
  op.w_r1 = -moment.cwiseProduct(inv_t);
  op.w_t = -force / p.mass;
  return op;
}

State s2_flow(const State& s, double gamma, const VesselParams& p, const ControlConfig& ctrl,
              bool active) {
  if (gamma == 0.0) return s;
  const S2Operators op = build_s2_operators(s, p, ctrl, active);
  State r = s;
  r.omega = affine_flow(op.A, gamma, s.omega, op.w_r1, op.w_r2);
  r.v = affine_flow(op.B, gamma, s.v, op.w_t, Vec3::Zero());
  r.phi_theta = s.phi_theta + gamma * op.theta_tilde;
  return r;
}

}  // namespace vsplit
