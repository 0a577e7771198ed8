#include "vessel_split/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace vsplit {

namespace fs = std::filesystem;

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(canonical_text(cfg))); }

bool is_active(const ExperimentConfig& cfg, double t, double h) {
  return t >= cfg.ctrl.t_on - 1e-9 * h;
}

SeriesPoint series_point(const ExperimentConfig& cfg, const State& s, double t, double h,
                         double h0) {
  SeriesPoint pt;
  pt.t = t;
  try {
    const auto norms = scaled_control_norms(s, cfg.params, cfg.ctrl, is_active(cfg, t, h));
    pt.tau_r_norm = norms.first;
    pt.tau_t_norm = norms.second;
    pt.h_scaled = hamiltonian(s, cfg.params) / h0;
  } catch (const std::domain_error&) {
    pt.tau_r_norm = pt.tau_t_norm = pt.h_scaled = std::nan("");
  }
  return pt;
}

std::string cell_text(const TableCell& c) { return c.stable ? format_double(c.value) : "unstable"; }

}  // namespace

// ---- single run ------------------------------------------------------------

Trajectory run_simulation(const ExperimentConfig& cfg, Method method, double h) {
  IntegrateOptions opts;
  opts.stride = cfg.output_stride;
  opts.magnus_order = cfg.magnus_order;
  return integrate(cfg.s0, cfg.t0, cfg.t_end, h, method, cfg.params, cfg.ctrl, opts);
}

void write_trajectory_csv(std::ostream& out, const ExperimentConfig& cfg, const Trajectory& traj,
                          Method method, double h) {
  out << "# simulate\n";
  out << "# method = " << method_name(method) << "\n";
  out << "# h = " << format_double(h) << "\n";
  out << "# config_hash = " << config_hash(cfg) << "\n";
  out << "t,omega1,omega2,omega3,q0,q1,q2,q3,v1,v2,v3,x1,x2,x3,phi_theta1,phi_theta2,phi_theta3,"
         "phi_x1,phi_x2,phi_x3,H,tau_r_norm,tau_t_norm,theta_phi,theta_theta,theta_psi\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const StateVector y = traj.states[i].to_vector();
    out << format_double(traj.times[i]);
    for (int k = 0; k < kStateDim; ++k) out << ',' << format_double(y[k]);
    out << ',' << format_double(traj.hamiltonians[i]) << ',' << format_double(traj.control_norms[i].first)
        << ',' << format_double(traj.control_norms[i].second);
    Vec3 angles = Vec3::Constant(std::nan(""));
    try {
      angles = euler_from_quat(traj.states[i].q.normalized()).as_vector();
    } catch (const std::domain_error&) {
    }
    for (int k = 0; k < 3; ++k) out << ',' << format_double(angles[k]);
    out << '\n';
  }
  if (traj.verdict == Verdict::completed) {
    out << "# verdict = completed\n";
  } else {
    out << "# verdict = unstable: " << traj.failure_reason << "\n";
  }
}

// ---- reference solutions ---------------------------------------------------

State reference_endpoint(const ExperimentConfig& cfg, double t_end, double h_ref,
                         const HarnessOptions& opts) {
  const std::string key = canonical_text(cfg) + "reference=RK4\nt_end=" + format_double(t_end) +
                          "\nh=" + format_double(h_ref) + "\n";
  fs::path file;
  if (!opts.cache_dir.empty()) {
    file = fs::path(opts.cache_dir) / ("reference-" + hex64(fnv1a64(key)) + ".txt");
    std::ifstream in(file);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      const std::string text = buf.str();
      if (text.compare(0, key.size(), key) == 0) {
        std::istringstream values(text.substr(key.size()));
        StateVector y;
        std::string tok;
        int k = 0;
        while (k < kStateDim && values >> tok) y[k++] = std::stod(tok);
        if (k == kStateDim) return State::from_vector(y);
      }
    }
  }

  IntegrateOptions io;
  io.stride = 0;
  const Trajectory tr = integrate(cfg.s0, cfg.t0, t_end, h_ref, Method::rk4, cfg.params, cfg.ctrl, io);
  if (tr.verdict != Verdict::completed) {
    throw std::runtime_error("reference solution failed: " + tr.failure_reason);
  }

  if (!file.empty()) {
    fs::create_directories(file.parent_path());
    std::ostringstream tid;
    tid << std::this_thread::get_id();
    const fs::path tmp = file.string() + ".tmp" + tid.str();
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << key;
      const StateVector y = tr.final_state.to_vector();
      for (int k = 0; k < kStateDim; ++k) out << format_double(y[k]) << '\n';
    }
    fs::rename(tmp, file);
  }
  return tr.final_state;
}

std::vector<State> reference_at(const ExperimentConfig& cfg, const std::vector<double>& times,
                                double h_ref) {
  std::vector<State> out;
  out.reserve(times.size());
  State s = cfg.s0;
  double t = cfg.t0;
  IntegrateOptions io;
  io.stride = 0;
  for (double target : times) {
    if (target < t - 1e-12) throw std::invalid_argument("reference_at: times must increase");
    if (target > t + 1e-12) {
      const double span = target - t;
      const double n = std::ceil(span / h_ref - 1e-9);
      const Trajectory tr = integrate(s, t, target, span / n, Method::rk4, cfg.params, cfg.ctrl, io);
      if (tr.verdict != Verdict::completed) {
        throw std::runtime_error("reference solution failed: " + tr.failure_reason);
      }
      s = tr.final_state;
      t = target;
    }
    out.push_back(s);
  }
  return out;
}

// ---- order study -------------------------------------------------------------

std::array<double, 4> component_errors(const State& y, const State& ref) {
  auto rel = [](const Vec3& a, const Vec3& b) { return (a - b).norm() / b.norm(); };
  const Vec3 th = euler_from_quat(y.q.normalized()).as_vector();
  const Vec3 th_ref = euler_from_quat(ref.q.normalized()).as_vector();
  Vec3 dth = th - th_ref;
  for (int k = 0; k < 3; ++k) dth[k] = wrap_angle(dth[k]);
  return {rel(y.omega, ref.omega), dth.norm() / th_ref.norm(), rel(y.v, ref.v), rel(y.x, ref.x)};
}

std::pair<double, int> fit_slope(const std::vector<double>& hs, const std::vector<double>& errors,
                                 FitWindow window) {
  std::vector<std::size_t> order(hs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hs[a] > hs[b]; });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  double prev = std::nan("");
  for (std::size_t i : order) {
    const double e = errors[i];
    if (!std::isfinite(e) || e > window.upper) continue;
    // Once the error stops shrinking at least linearly the round-off floor is reached.
    if (e < window.lower || (n > 0 && e > 0.5 * prev)) break;
    const double x = std::log(hs[i]);
    const double y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
    prev = e;
  }
  if (n < 2) return {std::nan(""), n};
  return {(n * sxy - sx * sy) / (n * sxx - sx * sx), n};
}

OrderStudy order_study(const ExperimentConfig& cfg_in, const std::vector<Method>& methods,
                       const HarnessOptions& opts) {
  OrderStudy study;
  // Velocity and position stay identically zero while the controller is off,
  // so the study runs with the controller engaged from t0.
  ExperimentConfig cfg = cfg_in;
  cfg.ctrl.t_on = std::min(cfg.ctrl.t_on, cfg.t0);
  for (int k = 0; k <= 9; ++k) study.hs.push_back(std::ldexp(1.0, -k));
  const double t_end = cfg.t0 + study.t_end;

  const std::size_t cells = methods.size() * study.hs.size();
  std::vector<Trajectory> runs(cells);
  State ref;
  parallel_for(cells + 1, opts.threads, [&](std::size_t i) {
    if (i == cells) {
      ref = reference_endpoint(cfg, t_end, study.reference_step, opts);
      return;
    }
    IntegrateOptions io;
    io.stride = 0;
    io.magnus_order = cfg.magnus_order;
    runs[i] = integrate(cfg.s0, cfg.t0, t_end, study.hs[i % study.hs.size()],
                        methods[i / study.hs.size()], cfg.params, cfg.ctrl, io);
  });

  for (std::size_t i = 0; i < cells; ++i) {
    OrderRow row{methods[i / study.hs.size()], study.hs[i % study.hs.size()]};
    row.stable = runs[i].verdict == Verdict::completed;
    if (row.stable) {
      try {
        row.error = component_errors(runs[i].final_state, ref);
      } catch (const std::domain_error&) {
        row.stable = false;
      }
    }
    if (!row.stable) row.error.fill(std::nan(""));
    study.rows.push_back(row);
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    OrderFit fit{methods[m]};
    for (int c = 0; c < 4; ++c) {
      std::vector<double> errs;
      for (std::size_t j = 0; j < study.hs.size(); ++j) errs.push_back(study.rows[m * study.hs.size() + j].error[c]);
      const auto [slope, n] = fit_slope(study.hs, errs);
      fit.slope[c] = slope;
      fit.points[c] = n;
    }
    study.fits.push_back(fit);
  }
  return study;
}

void write_order_study_csv(std::ostream& out, const OrderStudy& study) {
  out << "# order study: relative endpoint errors at t = " << format_double(study.t_end) << "\n";
  out << "# reference = RK4 h = " << format_double(study.reference_step) << "\n";
  out << "method,component,h,error\n";
  for (const OrderRow& row : study.rows) {
    for (int c = 0; c < 4; ++c) {
      out << method_name(row.method) << ',' << kErrorComponents[c] << ',' << format_double(row.h) << ','
          << (row.stable ? format_double(row.error[c]) : "unstable") << '\n';
    }
  }
}

void write_order_slopes_csv(std::ostream& out, const OrderStudy& study) {
  const FitWindow w;
  out << "# least-squares slopes of log(error) vs log(h), errors within [" << format_double(w.lower)
      << ", " << format_double(w.upper) << "]\n";
  out << "method,component,slope,points\n";
  for (const OrderFit& fit : study.fits) {
    for (int c = 0; c < 4; ++c) {
      out << method_name(fit.method) << ',' << kErrorComponents[c] << ',' << format_double(fit.slope[c])
          << ',' << fit.points[c] << '\n';
    }
  }
}

// ---- tables ----------------------------------------------------------------

const TableCell& ErrorTable::find(double h, Method m) const {
  for (std::size_t r = 0; r < hs.size(); ++r) {
    if (std::abs(hs[r] - h) > 1e-12 * h) continue;
    for (std::size_t c = 0; c < methods.size(); ++c) {
      if (methods[c] == m) return at(r, c);
    }
  }
  throw std::out_of_range("no such table cell");
}

std::vector<double> default_energy_steps() { return {0.05, 0.10, 0.20, 1.00, 1.95, 2.00, 3.00, 5.00, 6.00}; }

std::vector<double> default_global_steps() {
  return {0.005, 0.010, 0.020, 0.050, 0.100, 0.200, 0.500, 1.000, 1.500, 1.950, 2.000, 3.000, 5.000, 6.000};
}

std::vector<Method> default_table_methods() {
  return {Method::improved_euler, Method::rk4, Method::sp2, Method::sp4};
}

namespace {

ErrorTable run_table(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                     const std::vector<double>& hs, const HarnessOptions& opts, double t_span,
                     double h_ref, bool energy) {
  ErrorTable table;
  table.quantity = energy ? "relative_energy_error" : "relative_global_error";
  table.t_end = cfg.t0 + t_span / opts.scale;
  table.reference_step = h_ref;
  table.hs = hs;
  table.methods = methods;
  table.cells.resize(hs.size() * methods.size());

  std::vector<Trajectory> runs(table.cells.size());
  State ref;
  parallel_for(runs.size() + 1, opts.threads, [&](std::size_t i) {
    if (i == runs.size()) {
      ref = reference_endpoint(cfg, table.t_end, h_ref, opts);
      return;
    }
    IntegrateOptions io;
    io.stride = 0;
    io.magnus_order = cfg.magnus_order;
    runs[i] = integrate(cfg.s0, cfg.t0, table.t_end, hs[i / methods.size()], methods[i % methods.size()],
                        cfg.params, cfg.ctrl, io);
  });

  const double h_ref_energy = hamiltonian(ref, cfg.params);
  const StateVector y_ref = ref.to_vector();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    TableCell& cell = table.cells[i];
    cell.stable = runs[i].verdict == Verdict::completed;
    if (!cell.stable) {
      cell.reason = runs[i].failure_reason;
      cell.value = std::nan("");
      continue;
    }
    const State& y = runs[i].final_state;
    cell.value = energy ? std::abs(hamiltonian(y, cfg.params) - h_ref_energy) / h_ref_energy
                        : (y.to_vector() - y_ref).norm() / y_ref.norm();
  }
  return table;
}

}  // namespace

ErrorTable energy_table(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                        const std::vector<double>& hs, const HarnessOptions& opts) {
  return run_table(cfg, methods, hs, opts, 50000.0, 0.005, true);
}

ErrorTable global_error_table(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                              const std::vector<double>& hs, const HarnessOptions& opts) {
  return run_table(cfg, methods, hs, opts, 780.0, 1e-4, false);
}

void write_error_table_csv(std::ostream& out, const ExperimentConfig& cfg, const ErrorTable& t) {
  out << "# quantity = " << t.quantity << "\n";
  out << "# t_end = " << format_double(t.t_end) << "\n";
  out << "# reference = RK4 h = " << format_double(t.reference_step) << "\n";
  out << "# config_hash = " << config_hash(cfg) << "\n";
  out << "h";
  for (Method m : t.methods) out << ',' << method_name(m);
  out << '\n';
  for (std::size_t r = 0; r < t.hs.size(); ++r) {
    out << format_double(t.hs[r]);
    for (std::size_t c = 0; c < t.methods.size(); ++c) out << ',' << cell_text(t.at(r, c));
    out << '\n';
  }
  for (std::size_t r = 0; r < t.hs.size(); ++r) {
    for (std::size_t c = 0; c < t.methods.size(); ++c) {
      const TableCell& cell = t.at(r, c);
      if (!cell.stable) {
        out << "# unstable " << method_name(t.methods[c]) << " h = " << format_double(t.hs[r]) << ": "
            << cell.reason << "\n";
      }
    }
  }
}

// ---- comparison with a fine reference --------------------------------------

double ComparedRun::sup_energy_deviation() const {
  double sup = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    sup = std::max(sup, std::abs(run[i].h_scaled - reference[i].h_scaled));
  }
  return verdict == Verdict::completed ? sup : std::numeric_limits<double>::infinity();
}

double ComparedRun::sup_control_deviation(bool rotational) const {
  double sup = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    const double a = rotational ? run[i].tau_r_norm : run[i].tau_t_norm;
    const double b = rotational ? reference[i].tau_r_norm : reference[i].tau_t_norm;
    sup = std::max(sup, std::abs(a - b));
  }
  return verdict == Verdict::completed ? sup : std::numeric_limits<double>::infinity();
}

ComparedRun compare_with_reference(const ExperimentConfig& cfg, Method method, double h,
                                   double t_end, double h_ref) {
  ComparedRun cr;
  cr.method = method;
  cr.h = h;
  IntegrateOptions io;
  io.stride = 1;
  io.magnus_order = cfg.magnus_order;
  const Trajectory tr = integrate(cfg.s0, cfg.t0, t_end, h, method, cfg.params, cfg.ctrl, io);
  cr.verdict = tr.verdict;
  const double h0 = hamiltonian(cfg.s0, cfg.params);
  const std::vector<State> ref = reference_at(cfg, tr.times, h_ref);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    cr.run.push_back(series_point(cfg, tr.states[i], tr.times[i], h, h0));
    cr.reference.push_back(series_point(cfg, ref[i], tr.times[i], h, h0));
  }
  return cr;
}

std::vector<ComparedRun> control_norm_study(const ExperimentConfig& cfg,
                                            const std::vector<Method>& methods, double h,
                                            double t_end, const HarnessOptions& opts) {
  std::vector<ComparedRun> out(methods.size());
  parallel_for(methods.size(), opts.threads,
               [&](std::size_t i) { out[i] = compare_with_reference(cfg, methods[i], h, t_end); });
  return out;
}

void write_compared_runs_csv(std::ostream& out, const ExperimentConfig& cfg,
                             const std::vector<ComparedRun>& runs) {
  out << "# scaled control norms and scaled energy; reference = RK4 h <= 0.001 on the same time points\n";
  out << "# config_hash = " << config_hash(cfg) << "\n";
  out << "series,method,h,t,tau_r_norm,tau_t_norm,H_over_H0\n";
  for (const ComparedRun& cr : runs) {
    for (int pass = 0; pass < 2; ++pass) {
      const auto& series = pass == 0 ? cr.run : cr.reference;
      for (const SeriesPoint& pt : series) {
        out << (pass == 0 ? "run" : "reference") << ',' << method_name(cr.method) << ','
            << format_double(cr.h) << ',' << format_double(pt.t) << ',' << format_double(pt.tau_r_norm) << ','
            << format_double(pt.tau_t_norm) << ',' << format_double(pt.h_scaled) << '\n';
      }
    }
  }
  for (const ComparedRun& cr : runs) {
    out << "# " << method_name(cr.method) << " h = " << format_double(cr.h)
        << ": verdict = " << (cr.verdict == Verdict::completed ? "completed" : "unstable")
        << ", sup |dH/H0| = " << format_double(cr.sup_energy_deviation())
        << ", sup |d tau_r| = " << format_double(cr.sup_control_deviation(true))
        << ", sup |d tau_t| = " << format_double(cr.sup_control_deviation(false)) << "\n";
  }
}

}  // namespace vsplit
