#include "vessel_split/config.hpp"
#include "vessel_split/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace vsplit;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  double scale = 1.0;
  std::string methods;
  std::string steps;
  std::string cache;
  unsigned threads = 0;
  long long seed = 0;  // accepted for interface uniformity, the system is deterministic
};

void add_common(CLI::App* cmd, Common& c, bool with_steps) {
  cmd->add_option("--config", c.config, "configuration file (key = value under [sections])");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--scale", c.scale, "divide the end time of the long table runs by N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--methods", c.methods, "comma-separated subset of IE,RK4,SP2,SP4,SP6");
  if (with_steps) cmd->add_option("--steps", c.steps, "comma-separated step sizes");
  cmd->add_option("--cache", c.cache, "reference cache directory (default OUT/reference-cache)");
  cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
  cmd->add_option("--seed", c.seed, "ignored; runs are deterministic");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : s + ",") {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item += ch;
    }
  }
  return out;
}

std::vector<Method> methods_or(const Common& c, std::vector<Method> fallback) {
  if (c.methods.empty()) return fallback;
  std::vector<Method> out;
  for (const auto& name : split(c.methods)) out.push_back(parse_method(name));
  return out;
}

std::vector<double> steps_or(const Common& c, std::vector<double> fallback) {
  if (c.steps.empty()) return fallback;
  std::vector<double> out;
  for (const auto& s : split(c.steps)) {
    std::size_t used = 0;
    const double h = std::stod(s, &used);
    if (used != s.size() || !(h > 0.0)) throw std::invalid_argument("bad step size '" + s + "'");
    out.push_back(h);
  }
  return out;
}

ExperimentConfig load(const Common& c) { return c.config.empty() ? ExperimentConfig{} : load_config(c.config); }

HarnessOptions harness(const Common& c) {
  HarnessOptions o;
  o.scale = c.scale;
  o.threads = c.threads;
  o.cache_dir = c.cache.empty() ? (fs::path(c.out) / "reference-cache").string() : c.cache;
  return o;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  const fs::path p = fs::path(c.out) / name;
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  std::cout << p.string() << "\n";
  return f;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void print_table(const ErrorTable& t) {
  std::printf("%8s", "h");
  for (Method m : t.methods) std::printf("  %12s", std::string(method_name(m)).c_str());
  std::printf("\n");
  for (std::size_t r = 0; r < t.hs.size(); ++r) {
    std::printf("%8.3f", t.hs[r]);
    for (std::size_t c = 0; c < t.methods.size(); ++c) {
      const TableCell& cell = t.at(r, c);
      if (cell.stable) {
        std::printf("  %12.3e", cell.value);
      } else {
        std::printf("  %12s", "-");
      }
    }
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting integrators for a PID-controlled vessel model"};
  app.footer("Configuration keys:\n" + config_key_help());
  app.require_subcommand(1);

  Common c;
  double control_h = 1.95;
  double control_t_end = 110.0;

  auto* sim = app.add_subcommand("simulate", "integrate the scenario and write one CSV per method and step");
  add_common(sim, c, true);
  auto* order = app.add_subcommand("order-study", "endpoint errors on [0,10] for h = 2^-k, k = 0..9");
  add_common(order, c, false);
  auto* energy = app.add_subcommand("energy-table", "relative energy error at t = 50000 / scale");
  add_common(energy, c, true);
  auto* global = app.add_subcommand("global-error-table", "relative global error at t = 780 / scale");
  add_common(global, c, true);
  auto* norms = app.add_subcommand("control-norms", "scaled control norms and energy against a fine reference");
  add_common(norms, c, false);
  norms->add_option("--step", control_h, "step size")->capture_default_str();
  norms->add_option("--t-end", control_t_end, "length of the run, s")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load(c);
    const HarnessOptions opts = harness(c);

    if (sim->parsed()) {
      const auto methods = methods_or(c, cfg.methods);
      const auto hs = steps_or(c, cfg.h_list);
      const bool single = methods.size() == 1 && hs.size() == 1 && !cfg.output_path.empty();
      int failures = 0;
      for (Method m : methods) {
        for (double h : hs) {
          const Trajectory tr = run_simulation(cfg, m, h);
          const std::string name = single ? cfg.output_path
                                          : "trajectory_" + std::string(method_name(m)) + "_h" +
                                                short_number(h) + ".csv";
          auto f = open_out(c, name);
          write_trajectory_csv(f, cfg, tr, m, h);
          if (tr.verdict != Verdict::completed) {
            ++failures;
            std::cerr << method_name(m) << " h = " << h << ": " << tr.failure_reason << "\n";
          }
        }
      }
      return failures == 0 ? 0 : 3;
    }
    if (order->parsed()) {
      const OrderStudy study =
          order_study(cfg, methods_or(c, {Method::sp2, Method::sp4, Method::sp6}), opts);
      auto f = open_out(c, "order_study.csv");
      write_order_study_csv(f, study);
      auto g = open_out(c, "order_slopes.csv");
      write_order_slopes_csv(g, study);
      for (const OrderFit& fit : study.fits) {
        std::printf("%-4s", std::string(method_name(fit.method)).c_str());
        for (int k = 0; k < 4; ++k) std::printf("  %s %.3f", kErrorComponents[k], fit.slope[k]);
        std::printf("\n");
      }
      return 0;
    }
    if (energy->parsed() || global->parsed()) {
      const auto methods = methods_or(c, default_table_methods());
      const bool is_energy = energy->parsed();
      const auto hs = steps_or(c, is_energy ? default_energy_steps() : default_global_steps());
      const ErrorTable t = is_energy ? energy_table(cfg, methods, hs, opts)
                                     : global_error_table(cfg, methods, hs, opts);
      auto f = open_out(c, is_energy ? "energy_table.csv" : "global_error_table.csv");
      write_error_table_csv(f, cfg, t);
      print_table(t);
      return 0;
    }
    if (norms->parsed()) {
      const auto runs = control_norm_study(cfg, methods_or(c, {Method::sp4, Method::rk4}), control_h,
                                           cfg.t0 + control_t_end, opts);
      auto f = open_out(c, "control_norms.csv");
      write_compared_runs_csv(f, cfg, runs);
      for (const auto& r : runs) {
        std::printf("%-4s h=%g  sup|dH/H0|=%.3e  sup|d tau_r|=%.3e  sup|d tau_t|=%.3e\n",
                    std::string(method_name(r.method)).c_str(), r.h, r.sup_energy_deviation(),
                    r.sup_control_deviation(true), r.sup_control_deviation(false));
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
