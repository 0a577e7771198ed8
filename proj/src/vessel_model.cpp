#include "vessel_split/vessel_model.hpp"

#include <limits>
#include <stdexcept>

namespace vsplit {

StateVector State::to_vector() const {
  StateVector y;
  y << omega, q.w, q.v, v, x, phi_theta, phi_x;
  return y;
}

State State::from_vector(const StateVector& y) {
  State s;
  s.omega = y.segment<3>(0);
  s.q = Quat(y[3], y.segment<3>(4));
  s.v = y.segment<3>(7);
  s.x = y.segment<3>(10);
  s.phi_theta = y.segment<3>(13);
  s.phi_x = y.segment<3>(16);
  return s;
}

StateVector StateDerivative::to_vector() const {
  StateVector y;
  y << omega, q.w, q.v, v, x, phi_theta, phi_x;
  return y;
}

StateDerivative StateDerivative::operator+(const StateDerivative& o) const {
  StateDerivative r;
  r.omega = omega + o.omega;
  r.q = q + o.q;
  r.v = v + o.v;
  r.x = x + o.x;
  r.phi_theta = phi_theta + o.phi_theta;
  r.phi_x = phi_x + o.phi_x;
  return r;
}

void VesselParams::validate() const {
  if ((inertia.array() <= 0.0).any()) throw std::invalid_argument("inertia must be positive");
  if ((damping_rot.array() <= 0.0).any() || (damping_trans.array() <= 0.0).any()) {
    throw std::invalid_argument("damping must be positive definite");
  }
  if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
}

void ControlConfig::validate() const {
  for (const Vec3* k : {&kp_rot, &kd_rot, &ki_rot, &kp_trans, &kd_trans, &ki_trans}) {
    if ((k->array() < 0.0).any()) throw std::invalid_argument("controller gains must be nonnegative");
  }
}

ControlConfig ControlConfig::disabled() {
  ControlConfig c;
  c.kp_rot = c.kd_rot = c.ki_rot = Vec3::Zero();
  c.kp_trans = c.kd_trans = c.ki_trans = Vec3::Zero();
  c.t_on = std::numeric_limits<double>::infinity();
  return c;
}

State default_initial_state() {
  State s;
  s.q = quat_from_euler({0.05, -0.02, 0.10});
  s.x = Vec3(723.0, 0.0, 0.0);
  return s;
}

Vec3 restoring_moment(const Quat& q, const VesselParams& p) {
  const Mat3 rot = euler_rodrigues(q);
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 arm(p.gm_long * rot.col(0).dot(e3), p.gm_trans * rot.col(1).dot(e3), 0.0);
  return (rot * arm).cross(p.mass * p.gravity * e3);
}

Vec3 restoring_force(const Vec3& x, const VesselParams& p) {
  return {0.0, 0.0, p.heave_stiffness() * (x.z() - p.z_eq)};
}

ControlErrors control_errors(const State& s, const ControlConfig& ctrl) {
  ControlErrors e;
  e.theta = euler_from_quat(s.q);
  const Vec3 d = e.theta.as_vector() - ctrl.theta_ref.as_vector();
  e.theta_tilde = Vec3(wrap_angle(d[0]), wrap_angle(d[1]), wrap_angle(d[2]));
  e.x_tilde = s.x - ctrl.x_ref;
  return e;
}

ControlTorques control_torques(const State& s, const ControlConfig& ctrl, bool active) {
  if (!active) return {};
  const Mat3 rot = euler_rodrigues(s.q);
  const ControlErrors e = control_errors(s, ctrl);
  const Mat3 j = pi_e_inv(e.theta) * rot;
  const Vec3 theta_dot = j * s.omega;
  const Vec3 x_dot = rot * s.v;
  ControlTorques t;
  t.tau_r = -j.transpose() * (ctrl.kp_rot.cwiseProduct(e.theta_tilde) +
                              ctrl.kd_rot.cwiseProduct(theta_dot) +
                              ctrl.ki_rot.cwiseProduct(s.phi_theta));
  t.tau_t = -rot.transpose() * (ctrl.kp_trans.cwiseProduct(e.x_tilde) +
                                ctrl.kd_trans.cwiseProduct(x_dot) +
                                ctrl.ki_trans.cwiseProduct(s.phi_x));
  return t;
}

StateDerivative free_field(const State& s, const VesselParams& p, const ControlConfig& ctrl) {
  StateDerivative d;
  const Vec3 m = p.inertia.cwiseProduct(s.omega);
  d.omega = m.cross(s.omega).cwiseQuotient(p.inertia);
  d.q = s.q * Quat(0.0, 0.5 * s.omega);
  d.v = -s.omega.cross(s.v);
  d.x = euler_rodrigues(s.q) * s.v;
  d.phi_x = s.x - ctrl.x_ref;
  return d;
}

StateDerivative forced_field(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                             bool active) {
  StateDerivative d;
  const Mat3 rot = euler_rodrigues(s.q);
  const ControlTorques tau = control_torques(s, ctrl, active);
  d.omega = -(p.damping_rot.cwiseProduct(s.omega) + rot.transpose() * restoring_moment(s.q, p) -
              tau.tau_r)
                 .cwiseQuotient(p.inertia);
  d.v = -(p.damping_trans.cwiseProduct(s.v) + rot.transpose() * restoring_force(s.x, p) -
          tau.tau_t) /
        p.mass;
  d.phi_theta = control_errors(s, ctrl).theta_tilde;
  return d;
}

StateDerivative rhs_full(const State& s_in, const VesselParams& p, const ControlConfig& ctrl,
                         bool active) {
  // Intermediate Runge-Kutta stages drift off the unit sphere; the attitude
  // is read from the normalized quaternion while q' stays linear in q.
  State s = s_in;
  s.q = s_in.q.normalized();
  const Mat3 rot = euler_rodrigues(s.q);
  const ControlErrors e = control_errors(s, ctrl);
  const Vec3 m = p.inertia.cwiseProduct(s.omega);

  Vec3 tau_r = Vec3::Zero(), tau_t = Vec3::Zero();
  if (active) {
    const Mat3 j = pi_e_inv(e.theta) * rot;
    tau_r = -j.transpose() * (ctrl.kp_rot.cwiseProduct(e.theta_tilde) +
                              ctrl.kd_rot.cwiseProduct(j * s.omega) +
                              ctrl.ki_rot.cwiseProduct(s.phi_theta));
    tau_t = -rot.transpose() * (ctrl.kp_trans.cwiseProduct(e.x_tilde) +
                                ctrl.kd_trans.cwiseProduct(rot * s.v) +
                                ctrl.ki_trans.cwiseProduct(s.phi_x));
  }

  StateDerivative d;
  d.omega = (m.cross(s.omega) - (p.damping_rot.cwiseProduct(s.omega) +
                                 rot.transpose() * restoring_moment(s.q, p) - tau_r))
                .cwiseQuotient(p.inertia);
  d.q = s_in.q * Quat(0.0, 0.5 * s.omega);
  d.v = -s.omega.cross(s.v) -
        (p.damping_trans.cwiseProduct(s.v) + rot.transpose() * restoring_force(s.x, p) - tau_t) /
            p.mass;
  d.x = rot * s.v;
  d.phi_theta = e.theta_tilde;
  d.phi_x = e.x_tilde;
  return d;
}

Eigen::Matrix<double, 10, 1> PortVars::as_vector() const {
  Eigen::Matrix<double, 10, 1> xi;
  xi << m_ang, p_lin, mu, zbar;
  return xi;
}

PortVars port_variables(const State& s, const VesselParams& p) {
  PortVars xi;
  xi.m_ang = p.inertia.cwiseProduct(s.omega);
  xi.p_lin = p.mass * s.v;
  xi.mu = euler_rodrigues(s.q).transpose() * Vec3::UnitZ();
  xi.zbar = s.x.z() - p.z_eq;
  return xi;
}

Vec3 hydrostatic_diag(const VesselParams& p) {
  return p.mass * p.gravity * Vec3(p.gm_long, p.gm_trans, 0.0);
}

double hamiltonian(const PortVars& xi, const VesselParams& p) {
  const double kinetic = 0.5 * xi.m_ang.dot(xi.m_ang.cwiseQuotient(p.inertia)) +
                         0.5 * xi.p_lin.squaredNorm() / p.mass;
  const double potential = 0.5 * xi.mu.dot(hydrostatic_diag(p).cwiseProduct(xi.mu)) +
                           0.5 * p.heave_stiffness() * xi.zbar * xi.zbar;
  return kinetic + potential;
}

double hamiltonian(const State& s, const VesselParams& p) {
  return hamiltonian(port_variables(s, p), p);
}

Eigen::Matrix<double, 10, 1> hamiltonian_gradient(const PortVars& xi, const VesselParams& p) {
  Eigen::Matrix<double, 10, 1> g;
  g << xi.m_ang.cwiseQuotient(p.inertia), xi.p_lin / p.mass,
      hydrostatic_diag(p).cwiseProduct(xi.mu), p.heave_stiffness() * xi.zbar;
  return g;
}

Eigen::Matrix<double, 10, 10> structure_matrix(const PortVars& xi, const VesselParams& p) {
  Eigen::Matrix<double, 10, 10> s = Eigen::Matrix<double, 10, 10>::Zero();
  s.block<3, 3>(0, 0) = hat(xi.m_ang);
  s.block<3, 3>(0, 6) = hat(xi.mu);
  s.block<3, 3>(3, 3) = -p.mass * hat(xi.m_ang.cwiseQuotient(p.inertia));
  s.block<3, 1>(3, 9) = -xi.mu;
  s.block<3, 3>(6, 0) = hat(xi.mu);
  s.block<1, 3>(9, 3) = xi.mu.transpose();
  return s;
}

double supply_rate(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                   bool active) {
  const ControlTorques tau = control_torques(s, ctrl, active);
  return s.v.dot(-p.damping_trans.cwiseProduct(s.v) + tau.tau_t) +
         s.omega.dot(-p.damping_rot.cwiseProduct(s.omega) + tau.tau_r);
}

std::pair<double, double> scaled_control_norms(const State& s, const VesselParams& p,
                                               const ControlConfig& ctrl, bool active) {
  const ControlTorques tau = control_torques(s, ctrl, active);
  return {tau.tau_r.cwiseQuotient(p.inertia).norm(), tau.tau_t.norm() / p.mass};
}

}  // namespace vsplit
