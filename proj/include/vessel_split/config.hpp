#pragma once

#include "vessel_split/integrators.hpp"
#include "vessel_split/vessel_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsplit {

struct ExperimentConfig {
  VesselParams params;
  ControlConfig ctrl;
  State s0 = default_initial_state();
  double t0 = 0.0;
  double t_end = 200.0;
  std::vector<double> h_list{0.05};
  std::vector<Method> methods{Method::sp4};
  int output_stride = 1;
  std::string output_path;
  int magnus_order = 0;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "key = value" lines grouped under [section] headers. '#' and ';'
/// start comments. Unset keys keep the reference-scenario defaults.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

/// Human-readable list of all accepted keys, used for --help.
std::string config_key_help();

/// Canonical text form. Two configs with the same canonical text describe the
/// same experiment; the harness hashes it to key cached reference runs.
std::string canonical_text(const ExperimentConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& data);

/// Locale-independent formatting with 17 significant digits.
std::string format_double(double v);

}  // namespace vsplit
