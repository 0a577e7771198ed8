#pragma once

#include "vessel_split/rotations.hpp"

#include <Eigen/Dense>

#include <utility>

namespace vsplit {

inline constexpr int kStateDim = 19;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;

/// Full dynamical state. Attitude is a unit quaternion; the two phi_* members
/// are the integrals of the Euler-angle and position errors used by the PID law.
struct State {
  Vec3 omega = Vec3::Zero();  // body angular velocity, rad/s
  Quat q;                     // attitude, body -> spatial
  Vec3 v = Vec3::Zero();      // body linear velocity, m/s
  Vec3 x = Vec3::Zero();      // spatial position, m
  Vec3 phi_theta = Vec3::Zero();
  Vec3 phi_x = Vec3::Zero();

  /// Layout: omega(3), q(4), v(3), x(3), phi_theta(3), phi_x(3).
  StateVector to_vector() const;
  static State from_vector(const StateVector& y);
};

/// Time derivative of a State; q_dot is not a unit quaternion.
struct StateDerivative {
  Vec3 omega = Vec3::Zero();
  Quat q{0.0, Vec3::Zero()};
  Vec3 v = Vec3::Zero();
  Vec3 x = Vec3::Zero();
  Vec3 phi_theta = Vec3::Zero();
  Vec3 phi_x = Vec3::Zero();

  StateVector to_vector() const;
  StateDerivative operator+(const StateDerivative& o) const;
};

/// Rigid-body and hydrostatic parameters. Inertia and damping matrices are
/// diagonal and stored as their diagonals.
struct VesselParams {
  Vec3 inertia{2.873071e8, 2.90000e9, 2.726143e9};                 // T, kg m^2
  double mass = 6.3622085e6;                                       // m_v, kg
  Vec3 damping_rot{9.329153987e2, 6.514979127508227e8, 3.15094664584e4};  // D_r
  Vec3 damping_trans{3.53933789e1, 1.1781388e2, 1.4566249e6};      // D_t
  double gm_long = 103.628;   // longitudinal metacentric height, m
  double gm_trans = 2.1440;   // transverse metacentric height, m
  double gravity = 9.81;
  double water_density = 1.025e3;
  double waterplane_area = 1.3834e3;
  double z_eq = 0.0;

  /// Throws std::invalid_argument when any diagonal entry or the mass is not positive.
  void validate() const;

  /// c = g rho_w A_wp, heave stiffness.
  double heave_stiffness() const { return gravity * water_density * waterplane_area; }
};

/// PID gains (diagonals), set point and activation time.
struct ControlConfig {
  Vec3 kp_rot{0.0, 0.0, 1e8};
  Vec3 kd_rot{0.0, 0.0, 1e9};
  Vec3 ki_rot{0.0, 0.0, 2e5};
  Vec3 kp_trans{4e5, 4e5, 0.0};
  Vec3 kd_trans{4e6, 4e6, 0.0};
  Vec3 ki_trans{1e3, 1e3, 0.0};
  EulerAngles theta_ref{0.0, 0.0, 0.54};
  Vec3 x_ref{780.0, 20.0, 0.0};
  double t_on = 50.0;
  /// Use theta instead of theta - theta_ref in the second-order forcing of the
  /// rotational linear sub-flow (literal form of the published closed form).
  bool w_r2_uses_absolute_theta = false;

  /// Throws std::invalid_argument for negative gains.
  void validate() const;

  static ControlConfig disabled();
};

/// Initial state of the reference scenario: attitude (0.05, -0.02, 0.10),
/// position (723, 0, 0), at rest.
State default_initial_state();

/// Spatial restoring moment g_r^s = (Q r_r^b) x (m_v g e3).
Vec3 restoring_moment(const Quat& q, const VesselParams& p);

/// Spatial buoyancy force g_t^s = g rho_w A_wp (z - z_eq) e3.
Vec3 restoring_force(const Vec3& x, const VesselParams& p);

/// Attitude and position errors entering the PID law.
struct ControlErrors {
  EulerAngles theta;
  Vec3 theta_tilde;  // wrapped into (-pi, pi]
  Vec3 x_tilde;
};

ControlErrors control_errors(const State& s, const ControlConfig& ctrl);

struct ControlTorques {
  Vec3 tau_r = Vec3::Zero();
  Vec3 tau_t = Vec3::Zero();
};

/// Body-frame PID torques and forces; zero when inactive.
ControlTorques control_torques(const State& s, const ControlConfig& ctrl, bool active);

/// Full vector field in quaternion form (no disturbances).
StateDerivative rhs_full(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                         bool active);

/// Conservative, free rigid-body part of the field (exactly integrable).
StateDerivative free_field(const State& s, const VesselParams& p, const ControlConfig& ctrl);

/// Damping, restoring and control part of the field (linear once attitude is frozen).
StateDerivative forced_field(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                             bool active);

/// Port variables xi = (m, p, mu, zbar).
struct PortVars {
  Vec3 m_ang;
  Vec3 p_lin;
  Vec3 mu;
  double zbar = 0.0;

  Eigen::Matrix<double, 10, 1> as_vector() const;
};

PortVars port_variables(const State& s, const VesselParams& p);

/// G = m_v g diag(GM_L, GM_T, 0).
Vec3 hydrostatic_diag(const VesselParams& p);

/// H = 1/2 m^T T^-1 m + 1/2 p^T p / m_v + 1/2 mu^T G mu + 1/2 c zbar^2.
double hamiltonian(const State& s, const VesselParams& p);
double hamiltonian(const PortVars& xi, const VesselParams& p);

/// grad H = (T^-1 m, p / m_v, G mu, c zbar).
Eigen::Matrix<double, 10, 1> hamiltonian_gradient(const PortVars& xi, const VesselParams& p);

/// Skew-symmetric structure matrix S(xi) of the port-Hamiltonian form.
Eigen::Matrix<double, 10, 10> structure_matrix(const PortVars& xi, const VesselParams& p);

/// dH/dt = nu^T (-D nu + tau), nu = (v, omega).
double supply_rate(const State& s, const VesselParams& p, const ControlConfig& ctrl, bool active);

/// Scaled control norms (|T^-1 tau_r|, |tau_t| / m_v).
std::pair<double, double> scaled_control_norms(const State& s, const VesselParams& p,
                                               const ControlConfig& ctrl, bool active);

}  // namespace vsplit
