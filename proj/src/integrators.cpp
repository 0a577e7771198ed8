#include "vessel_split/integrators.hpp"

#include "vessel_split/free_flow.hpp"
#include "vessel_split/linear_flow.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace vsplit {

std::vector<SchemeCoefficients::Stage> SchemeCoefficients::expanded() const {
  std::vector<Stage> seq;
  const std::size_t m = b.size();
  for (std::size_t i = 0; i < m; ++i) {
    seq.push_back({false, a[i]});
    seq.push_back({true, b[i]});
  }
  seq.push_back({false, a[m]});
  for (std::size_t i = m; i-- > 0;) {
    seq.push_back({true, b[i]});
    seq.push_back({false, a[i]});
  }
  return seq;
}

SchemeCoefficients strang_coefficients() { return {{0.5, 0.0}, {0.5}, 2, "SP2"}; }

SchemeCoefficients sp4_coefficients() {
  const double a1 = 0.0792036964311956500000000000000000000000;
  const double a2 = 0.353172906049773728818833445330;
  const double a3 = -0.042065080357719520000000000000000000000;
  const double b1 = 0.209515106613361881525060713987;
  const double b2 = -0.14385177317981800000000000000000000;
  return {{a1, a2, a3, 1.0 - 2.0 * (a1 + a2 + a3)}, {b1, b2, 0.5 - (b1 + b2)}, 4, "SP4"};
}

SchemeCoefficients sp6_coefficients() {
  const double a1 = 0.0502627644003923808654389538920;
  const double a2 = 0.413514300428346618921141630839;
  const double a3 = 0.045079889794397660000000000000000000;
  const double a4 = -0.188054853819571375656897886496;
  const double a5 = 0.541960678450781151905056284542;
  const double b1 = 0.148816447901042828823498193483;
  const double b2 = -0.132385865767782744686048193902;
  const double b3 = 0.0673076046921849473963237618218;
  const double b4 = 0.432666402578172649872653897748;
  return {{a1, a2, a3, a4, a5, 1.0 - 2.0 * (a1 + a2 + a3 + a4 + a5)},
          {b1, b2, b3, b4, 0.5 - (b1 + b2 + b3 + b4)},
          6,
          "SP6"};
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::improved_euler: return "IE";
    case Method::rk4: return "RK4";
    case Method::sp2: return "SP2";
    case Method::sp4: return "SP4";
    case Method::sp6: return "SP6";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "IE") return Method::improved_euler;
  if (up == "RK4") return Method::rk4;
  if (up == "SP2") return Method::sp2;
  if (up == "SP4") return Method::sp4;
  if (up == "SP6") return Method::sp6;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

bool is_splitting(Method m) { return m == Method::sp2 || m == Method::sp4 || m == Method::sp6; }

const SchemeCoefficients& scheme_for(Method m) {
  static const SchemeCoefficients sp2 = strang_coefficients();
  static const SchemeCoefficients sp4 = sp4_coefficients();
  static const SchemeCoefficients sp6 = sp6_coefficients();
  switch (m) {
    case Method::sp2: return sp2;
    case Method::sp4: return sp4;
    case Method::sp6: return sp6;
    default: throw std::invalid_argument("not a splitting method");
  }
}

int method_order(Method m) {
  switch (m) {
    case Method::improved_euler: return 2;
    case Method::rk4: return 4;
    default: return scheme_for(m).order;
  }
}

State splitting_step(const State& s, double h, const SchemeCoefficients& scheme,
                     const VesselParams& p, const ControlConfig& ctrl, bool active,
                     int magnus_order) {
  const int order = magnus_order > 0 ? magnus_order : scheme.order;
  State y = s;
  const std::size_t m = scheme.b.size();
  auto s2 = [&](double w) { if (w != 0.0) y = s2_flow(y, w * h, p, ctrl, active); };
  auto s1 = [&](double w) { if (w != 0.0) y = s1_flow(y, w * h, ctrl.x_ref, p.inertia, order); };
  for (std::size_t i = 0; i < m; ++i) {
    s2(scheme.a[i]);
    s1(scheme.b[i]);
  }
  s2(scheme.a[m]);
  for (std::size_t i = m; i-- > 0;) {
    s1(scheme.b[i]);
    s2(scheme.a[i]);
  }
  y.q = y.q.normalized();
  return y;
}

namespace {

State advance(const State& s, const StateVector& dy) {
  return State::from_vector(s.to_vector() + dy);
}

StateVector field(const State& s, const VesselParams& p, const ControlConfig& ctrl, bool active) {
  return rhs_full(s, p, ctrl, active).to_vector();
}

}  // namespace

State rk4_step(const State& s, double h, const VesselParams& p, const ControlConfig& ctrl,
               bool active) {
  const StateVector k1 = field(s, p, ctrl, active);
  const StateVector k2 = field(advance(s, 0.5 * h * k1), p, ctrl, active);
  const StateVector k3 = field(advance(s, 0.5 * h * k2), p, ctrl, active);
  const StateVector k4 = field(advance(s, h * k3), p, ctrl, active);
  State r = advance(s, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  r.q = r.q.normalized();
  return r;
}

State improved_euler_step(const State& s, double h, const VesselParams& p,
                          const ControlConfig& ctrl, bool active) {
  const StateVector k1 = field(s, p, ctrl, active);
  const StateVector k2 = field(advance(s, h * k1), p, ctrl, active);
  State r = advance(s, 0.5 * h * (k1 + k2));
  r.q = r.q.normalized();
  return r;
}

State step(Method m, const State& s, double h, const VesselParams& p, const ControlConfig& ctrl,
           bool active, int magnus_order) {
  switch (m) {
    case Method::improved_euler: return improved_euler_step(s, h, p, ctrl, active);
    case Method::rk4: return rk4_step(s, h, p, ctrl, active);
    default: return splitting_step(s, h, scheme_for(m), p, ctrl, active, magnus_order);
  }
}

namespace {

bool diverged(const State& s, double threshold) {
  return !s.to_vector().allFinite() || s.omega.norm() > threshold || s.v.norm() > threshold;
}

}  // namespace

Trajectory integrate(const State& s0, double t0, double t_end, double h, Method method,
                     const VesselParams& p, const ControlConfig& ctrl,
                     const IntegrateOptions& opts) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate: step size must be positive");
  if (!(t_end > t0)) throw std::invalid_argument("integrate: t_end must exceed t0");

  const double tol = 1e-9 * h;
  Trajectory traj;
  State s = s0;
  double t = t0;
  bool active = t0 >= ctrl.t_on - tol;
  std::size_t next_sample = 0;

  auto record = [&]() {
    traj.times.push_back(t);
    traj.states.push_back(s);
    try {
      traj.hamiltonians.push_back(hamiltonian(s, p));
      traj.control_norms.push_back(scaled_control_norms(s, p, ctrl, active));
    } catch (const std::domain_error&) {
      traj.hamiltonians.push_back(std::nan(""));
      traj.control_norms.push_back({std::nan(""), std::nan("")});
    }
  };
  auto at_sample = [&]() {
    bool hit = false;
    while (next_sample < opts.sample_times.size()) {
      const double ts = opts.sample_times[next_sample];
      if (std::abs(t - ts) <= 1e-6 * h) {
        hit = true;
        ++next_sample;
      } else if (ts < t) {
        throw std::invalid_argument("integrate: sample time " + std::to_string(ts) +
                                    " does not lie on the step grid");
      } else {
        break;
      }
    }
    return hit;
  };

  const bool by_samples = !opts.sample_times.empty();
  if (by_samples ? at_sample() : true) record();

  double anchor = t0;
  long long n = 0;
  try {
    while (t < t_end - tol) {
      double t_next = anchor + static_cast<double>(n + 1) * h;
      bool landing = false;
      if (!active && opts.land_on_activation && t < ctrl.t_on - tol && t_next > ctrl.t_on + tol) {
        t_next = ctrl.t_on;
        landing = true;
      }
      if (t_next > t_end - tol) t_next = t_end;

      s = step(method, s, t_next - t, p, ctrl, active, opts.magnus_order);
      t = t_next;
      ++traj.steps;
      if (landing) {
        anchor = t;
        n = 0;
      } else {
        ++n;
      }
      if (diverged(s, opts.divergence_threshold)) {
        traj.verdict = Verdict::unstable;
        traj.failure_reason = "diverged at t = " + std::to_string(t);
        break;
      }
      if (!active && t >= ctrl.t_on - tol) {
        active = true;
        if (opts.reset_integrals) {
          s.phi_theta.setZero();
          s.phi_x.setZero();
        }
      }
      const bool last = t >= t_end - tol;
      if (by_samples) {
        if (at_sample()) record();
      } else if ((opts.stride > 0 && traj.steps % opts.stride == 0) || (last && traj.times.back() != t)) {
        record();
      }
    }
  } catch (const std::domain_error& e) {
    traj.verdict = Verdict::unstable;
    traj.failure_reason = std::string(e.what()) + " at t = " + std::to_string(t);
  }
  if (traj.verdict == Verdict::completed && by_samples && next_sample < opts.sample_times.size()) {
    throw std::invalid_argument("integrate: sample times beyond the integration interval");
  }
  traj.final_time = t;
  traj.final_state = s;
  return traj;
}

}  // namespace vsplit
