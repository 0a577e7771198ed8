#include "vessel_split/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vsplit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::string v = trim(value);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("'" + text + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("'" + text + "' is not an integer");
  }
  return v;
}

Vec3 parse_vec3(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != 3) throw std::invalid_argument("expected three comma-separated numbers");
  return {parse_number(items[0]), parse_number(items[1]), parse_number(items[2])};
}

bool parse_bool(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("'" + text + "' is not a boolean");
}

struct Key {
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::map<std::string, Key>& key_table() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::map<std::string, Key> table = {
      {"vessel.inertia", {"T diagonal, kg m^2", [](C& c, S v) { c.params.inertia = parse_vec3(v); }}},
      {"vessel.mass", {"m_v, kg", [](C& c, S v) { c.params.mass = parse_number(v); }}},
      {"vessel.damping_rot", {"D_r diagonal", [](C& c, S v) { c.params.damping_rot = parse_vec3(v); }}},
      {"vessel.damping_trans",
       {"D_t diagonal", [](C& c, S v) { c.params.damping_trans = parse_vec3(v); }}},
      {"vessel.gm_long", {"longitudinal metacentric height, m",
                          [](C& c, S v) { c.params.gm_long = parse_number(v); }}},
      {"vessel.gm_trans", {"transverse metacentric height, m",
                           [](C& c, S v) { c.params.gm_trans = parse_number(v); }}},
      {"vessel.gravity", {"m/s^2", [](C& c, S v) { c.params.gravity = parse_number(v); }}},
      {"vessel.water_density",
       {"kg/m^3", [](C& c, S v) { c.params.water_density = parse_number(v); }}},
      {"vessel.waterplane_area",
       {"m^2", [](C& c, S v) { c.params.waterplane_area = parse_number(v); }}},
      {"vessel.z_eq", {"equilibrium heave, m", [](C& c, S v) { c.params.z_eq = parse_number(v); }}},

      {"control.kp_rot", {"rotational P gains", [](C& c, S v) { c.ctrl.kp_rot = parse_vec3(v); }}},
      {"control.kd_rot", {"rotational D gains", [](C& c, S v) { c.ctrl.kd_rot = parse_vec3(v); }}},
      {"control.ki_rot", {"rotational I gains", [](C& c, S v) { c.ctrl.ki_rot = parse_vec3(v); }}},
      {"control.kp_trans",
       {"translational P gains", [](C& c, S v) { c.ctrl.kp_trans = parse_vec3(v); }}},
      {"control.kd_trans",
       {"translational D gains", [](C& c, S v) { c.ctrl.kd_trans = parse_vec3(v); }}},
      {"control.ki_trans",
       {"translational I gains", [](C& c, S v) { c.ctrl.ki_trans = parse_vec3(v); }}},
      {"control.theta_ref", {"roll, pitch, yaw set point, rad",
                             [](C& c, S v) { c.ctrl.theta_ref = EulerAngles::from_vector(parse_vec3(v)); }}},
      {"control.x_ref", {"position set point, m", [](C& c, S v) { c.ctrl.x_ref = parse_vec3(v); }}},
      {"control.t_on", {"activation time, s (inf = never)",
                        [](C& c, S v) { c.ctrl.t_on = parse_number(v); }}},
      {"control.w_r2_absolute_theta",
       {"use theta instead of theta - theta_ref in the ramp forcing (bool)",
        [](C& c, S v) { c.ctrl.w_r2_uses_absolute_theta = parse_bool(v); }}},

      {"initial.omega", {"body angular velocity, rad/s", [](C& c, S v) { c.s0.omega = parse_vec3(v); }}},
      {"initial.euler", {"roll, pitch, yaw, rad",
                         [](C& c, S v) { c.s0.q = quat_from_euler(EulerAngles::from_vector(parse_vec3(v))); }}},
      {"initial.v", {"body linear velocity, m/s", [](C& c, S v) { c.s0.v = parse_vec3(v); }}},
      {"initial.x", {"spatial position, m", [](C& c, S v) { c.s0.x = parse_vec3(v); }}},
      {"initial.phi_theta", {"attitude error integral", [](C& c, S v) { c.s0.phi_theta = parse_vec3(v); }}},
      {"initial.phi_x", {"position error integral", [](C& c, S v) { c.s0.phi_x = parse_vec3(v); }}},

      {"run.t0", {"start time, s", [](C& c, S v) { c.t0 = parse_number(v); }}},
      {"run.t_end", {"end time, s", [](C& c, S v) { c.t_end = parse_number(v); }}},
      {"run.h_list", {"step sizes, comma-separated", [](C& c, S v) {
                        c.h_list.clear();
                        for (const auto& item : split_list(v)) c.h_list.push_back(parse_number(item));
                      }}},
      {"run.methods", {"any of IE, RK4, SP2, SP4, SP6", [](C& c, S v) {
                         c.methods.clear();
                         for (const auto& item : split_list(v)) c.methods.push_back(parse_method(item));
                       }}},
      {"run.output_stride", {"record every n-th step (0 = endpoints only)",
                             [](C& c, S v) { c.output_stride = parse_int(v); }}},
      {"run.output_path", {"CSV file written by simulate", [](C& c, S v) { c.output_path = v; }}},
      {"run.magnus_order", {"2, 4, 6, or 0 for the scheme order",
                            [](C& c, S v) { c.magnus_order = parse_int(v); }}},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    params.validate();
    ctrl.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (h_list.empty()) throw ConfigError("h_list must not be empty");
  for (double h : h_list) {
    if (!(h > 0.0)) throw ConfigError("h_list entries must be positive");
  }
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (!(t_end > t0)) throw ConfigError("t_end must exceed t0");
  if (output_stride < 0) throw ConfigError("output_stride must be non-negative");
  if (magnus_order != 0 && magnus_order != 2 && magnus_order != 4 && magnus_order != 6) {
    throw ConfigError("magnus_order must be 0, 2, 4 or 6");
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  const auto& table = key_table();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto cut = raw.find_first_of("#;");
    const std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) throw ConfigError(where + "unknown key '" + full + "'");
    try {
      it->second.set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + full + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string config_key_help() {
  std::string out;
  std::string section;
  for (const auto& [name, key] : key_table()) {
    const auto dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      out += "[" + sec + "]\n";
      section = sec;
    }
    std::string k = "  " + name.substr(dot + 1);
    k.resize(std::max<std::size_t>(k.size() + 1, 26), ' ');
    out += k + key.help + "\n";
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  auto num = [&](const char* k, double v) { out += std::string(k) + "=" + format_double(v) + "\n"; };
  auto vec = [&](const char* k, const Vec3& v) {
    out += std::string(k) + "=" + format_double(v[0]) + "," + format_double(v[1]) + "," +
           format_double(v[2]) + "\n";
  };
  const VesselParams& p = cfg.params;
  vec("inertia", p.inertia);
  num("mass", p.mass);
  vec("damping_rot", p.damping_rot);
  vec("damping_trans", p.damping_trans);
  num("gm_long", p.gm_long);
  num("gm_trans", p.gm_trans);
  num("gravity", p.gravity);
  num("water_density", p.water_density);
  num("waterplane_area", p.waterplane_area);
  num("z_eq", p.z_eq);
  const ControlConfig& c = cfg.ctrl;
  vec("kp_rot", c.kp_rot);
  vec("kd_rot", c.kd_rot);
  vec("ki_rot", c.ki_rot);
  vec("kp_trans", c.kp_trans);
  vec("kd_trans", c.kd_trans);
  vec("ki_trans", c.ki_trans);
  vec("theta_ref", c.theta_ref.as_vector());
  vec("x_ref", c.x_ref);
  num("t_on", c.t_on);
  out += std::string("w_r2_absolute_theta=") + (c.w_r2_uses_absolute_theta ? "1" : "0") + "\n";
  const StateVector y = cfg.s0.to_vector();
  out += "s0=";
  for (int i = 0; i < kStateDim; ++i) out += format_double(y[i]) + (i + 1 < kStateDim ? "," : "\n");
  num("t0", cfg.t0);
  out += "magnus_order=" + std::to_string(cfg.magnus_order) + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace vsplit
