#pragma once

#include "vessel_split/vessel_model.hpp"

namespace vsplit {

/// Frozen-coefficient operators of the damping/restoring/control sub-system:
///   w'   = A w + w_r1 + sigma w_r2,
///   v'   = B v + w_t,
///   phi_theta' = theta_tilde (constant while the attitude is frozen).
struct S2Operators {
  Mat3 A = Mat3::Zero();
  Mat3 B = Mat3::Zero();
  Vec3 w_r1 = Vec3::Zero();
  Vec3 w_r2 = Vec3::Zero();
  Vec3 w_t = Vec3::Zero();
  Vec3 theta_tilde = Vec3::Zero();
};

/// Assembles the operators at the current attitude and position. With the
/// controller inactive all gain terms drop out.
S2Operators build_s2_operators(const State& s, const VesselParams& p, const ControlConfig& ctrl,
                               bool active);

/// Exact flow over time gamma by variation of constants with phi_1, phi_2.
/// Attitude, position and phi_x are returned unchanged.
State s2_flow(const State& s, double gamma, const VesselParams& p, const ControlConfig& ctrl,
              bool active);

}  // namespace vsplit
