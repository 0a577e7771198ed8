#pragma once

#include "vessel_split/vessel_model.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vsplit {

/// Coefficients of a symmetric composition
///   S2(a1 h) S1(b1 h) S2(a2 h) ... S2(a_{m+1} h) ... S1(b1 h) S2(a1 h),
/// where S2 is the damped/forced linear flow and S1 the free rigid-body flow.
struct SchemeCoefficients {
  std::vector<double> a;  // S2 weights, a.back() is the central one
  std::vector<double> b;  // S1 weights
  int order = 2;
  std::string name;

  struct Stage {
    bool free_flow;  // true: S1, false: S2
    double weight;
  };
  /// Full palindromic stage sequence.
  std::vector<Stage> expanded() const;
};

SchemeCoefficients strang_coefficients();
SchemeCoefficients sp4_coefficients();
SchemeCoefficients sp6_coefficients();

enum class Method { improved_euler, rk4, sp2, sp4, sp6 };

std::string_view method_name(Method m);
/// Accepts IE, RK4, SP2, SP4, SP6 (case-insensitive).
Method parse_method(std::string_view name);
bool is_splitting(Method m);
const SchemeCoefficients& scheme_for(Method m);
int method_order(Method m);

/// One step of a symmetric splitting scheme. magnus_order = 0 selects the
/// scheme order. The quaternion is renormalized once at the end.
State splitting_step(const State& s, double h, const SchemeCoefficients& scheme,
                     const VesselParams& p, const ControlConfig& ctrl, bool active,
                     int magnus_order = 0);

/// Classical four-stage Runge-Kutta on the full field.
State rk4_step(const State& s, double h, const VesselParams& p, const ControlConfig& ctrl,
               bool active);

/// Heun's improved Euler method on the full field.
State improved_euler_step(const State& s, double h, const VesselParams& p,
                          const ControlConfig& ctrl, bool active);

State step(Method m, const State& s, double h, const VesselParams& p, const ControlConfig& ctrl,
           bool active, int magnus_order = 0);

enum class Verdict { completed, unstable };

struct IntegrateOptions {
  /// Record every stride-th step (plus the initial and final points); 0 records
  /// only the endpoints.
  int stride = 1;
  /// When nonempty, record exactly at these times instead of by stride. Each
  /// must coincide with a step point.
  std::vector<double> sample_times;
  int magnus_order = 0;
  /// Shorten the step that straddles t_on so the controller switches on at t_on.
  bool land_on_activation = true;
  /// Zero phi_theta and phi_x when the controller switches on. When false the
  /// integral states keep what they accumulated before t_on.
  bool reset_integrals = true;
  double divergence_threshold = 1e6;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> hamiltonians;
  std::vector<std::pair<double, double>> control_norms;
  Verdict verdict = Verdict::completed;
  std::string failure_reason;
  double final_time = 0.0;
  State final_state;
  long long steps = 0;
};

/// Fixed-step integration from t0 to t_end. The controller switches on at
/// t_on, where the integral states are reset unless opts says otherwise.
/// Divergence (non-finite values, |omega| or |v| above the threshold, or a
/// singular attitude) ends the run with Verdict::unstable.
Trajectory integrate(const State& s0, double t0, double t_end, double h, Method method,
                     const VesselParams& p, const ControlConfig& ctrl,
                     const IntegrateOptions& opts = {});

}  // namespace vsplit
