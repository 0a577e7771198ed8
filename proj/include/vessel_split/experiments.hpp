#pragma once

#include "vessel_split/config.hpp"
#include "vessel_split/integrators.hpp"

#include <array>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace vsplit {

struct HarnessOptions {
  /// Divides the end time of the long energy and global-error runs.
  double scale = 1.0;
  /// Directory for cached reference endpoints; empty disables caching.
  std::string cache_dir;
  /// Worker threads for independent cells; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Runs fn(i) for i in [0, n) on a small pool of threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// ---- single run ------------------------------------------------------------

Trajectory run_simulation(const ExperimentConfig& cfg, Method method, double h);

/// One row per recorded step: t, state, H, scaled control norms, Euler angles.
void write_trajectory_csv(std::ostream& out, const ExperimentConfig& cfg, const Trajectory& traj,
                          Method method, double h);

// ---- reference solutions ---------------------------------------------------

/// RK4 endpoint at t_end with step h_ref (the last step absorbs any remainder).
/// Cached on disk under opts.cache_dir keyed by the configuration hash.
State reference_endpoint(const ExperimentConfig& cfg, double t_end, double h_ref,
                         const HarnessOptions& opts);

/// RK4 solution at each of the given increasing times, using at most h_ref
/// between consecutive times.
std::vector<State> reference_at(const ExperimentConfig& cfg, const std::vector<double>& times,
                                double h_ref);

// ---- order study -------------------------------------------------------------

inline constexpr std::array<const char*, 4> kErrorComponents{"omega", "theta", "v", "x"};

struct OrderRow {
  Method method;
  double h = 0.0;
  bool stable = true;
  std::array<double, 4> error{};  // relative endpoint errors of omega, theta, v, x
};

struct OrderFit {
  Method method;
  std::array<double, 4> slope{};
  std::array<int, 4> points{};  // samples inside the fitting window
};

struct OrderStudy {
  double t_end = 10.0;
  double reference_step = 1e-4;
  std::vector<double> hs;
  std::vector<OrderRow> rows;
  std::vector<OrderFit> fits;
};

/// Errors below lower or above upper are left out of the slope fit.
struct FitWindow {
  double lower = 1e-12;
  double upper = 1e-2;
};

/// Relative errors of omega, Euler angles, v and x.
std::array<double, 4> component_errors(const State& y, const State& ref);

/// Least-squares slope of log(error) against log(h). Starting from the largest
/// h, points above the window are skipped; the fit stops at the first error
/// below the window or one that fails to halve relative to the previous point.
std::pair<double, int> fit_slope(const std::vector<double>& hs, const std::vector<double>& errors,
                                 FitWindow window = {});

/// h = 2^-k, k = 0..9 on [t0, t0 + 10] against RK4 with h = 1e-4. The
/// controller is switched on at t0 (or earlier if so configured).
OrderStudy order_study(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                       const HarnessOptions& opts);

void write_order_study_csv(std::ostream& out, const OrderStudy& study);
void write_order_slopes_csv(std::ostream& out, const OrderStudy& study);

// ---- tables ----------------------------------------------------------------

struct TableCell {
  bool stable = true;
  double value = 0.0;
  std::string reason;
};

struct ErrorTable {
  std::string quantity;  // "relative_energy_error" or "relative_global_error"
  double t_end = 0.0;
  double reference_step = 0.0;
  std::vector<double> hs;
  std::vector<Method> methods;
  std::vector<TableCell> cells;  // row-major: hs x methods

  const TableCell& at(std::size_t row, std::size_t col) const {
    return cells[row * methods.size() + col];
  }
  const TableCell& find(double h, Method m) const;
};

std::vector<double> default_energy_steps();
std::vector<double> default_global_steps();
std::vector<Method> default_table_methods();

/// |H_n - H(t_n)| / H(t_n) at t = 50000 / scale against RK4 with h = 0.005.
ErrorTable energy_table(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                        const std::vector<double>& hs, const HarnessOptions& opts);

/// |y_n - y(t_n)| / |y(t_n)| over the full quaternion-form state at t = 780 / scale
/// against RK4 with h = 1e-4.
ErrorTable global_error_table(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                              const std::vector<double>& hs, const HarnessOptions& opts);

void write_error_table_csv(std::ostream& out, const ExperimentConfig& cfg, const ErrorTable& t);

// ---- comparison with a fine reference along a trajectory -----------------

struct SeriesPoint {
  double t = 0.0;
  double tau_r_norm = 0.0;
  double tau_t_norm = 0.0;
  double h_scaled = 0.0;  // H_n / H_0
};

struct ComparedRun {
  Method method;
  double h = 0.0;
  Verdict verdict = Verdict::completed;
  std::vector<SeriesPoint> run;        // at every step point
  std::vector<SeriesPoint> reference;  // same times, fine RK4

  double sup_energy_deviation() const;
  /// Largest |run - reference| of the scaled rotational / translational control norms.
  double sup_control_deviation(bool rotational) const;
};

ComparedRun compare_with_reference(const ExperimentConfig& cfg, Method method, double h,
                                   double t_end, double h_ref = 1e-3);

/// SP4 and RK4 at h = 1.95 over [t0, t0 + 110].
std::vector<ComparedRun> control_norm_study(const ExperimentConfig& cfg,
                                            const std::vector<Method>& methods, double h,
                                            double t_end, const HarnessOptions& opts);

void write_compared_runs_csv(std::ostream& out, const ExperimentConfig& cfg,
                             const std::vector<ComparedRun>& runs);

}  // namespace vsplit
