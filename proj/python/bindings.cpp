#include "vessel_split/config.hpp"
#include "vessel_split/experiments.hpp"
#include "vessel_split/free_flow.hpp"
#include "vessel_split/integrators.hpp"
#include "vessel_split/linear_flow.hpp"
#include "vessel_split/special_functions.hpp"
#include "vessel_split/vessel_model.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace vsplit;

namespace {

// states go across as (n, 19) arrays in the to_vector layout
Eigen::MatrixXd stack(const std::vector<State>& states) {
  Eigen::MatrixXd out(states.size(), kStateDim);
  for (std::size_t i = 0; i < states.size(); ++i) out.row(i) = states[i].to_vector().transpose();
  return out;
}

State state_from(const Eigen::VectorXd& y) {
  if (y.size() != kStateDim) throw std::invalid_argument("state vector must have 19 entries");
  return State::from_vector(y);
}

py::dict table_dict(const ErrorTable& t) {
  py::dict d;
  d["quantity"] = t.quantity;
  d["t_end"] = t.t_end;
  d["reference_step"] = t.reference_step;
  d["h"] = t.hs;
  std::vector<std::string> names;
  for (Method m : t.methods) names.emplace_back(method_name(m));
  d["methods"] = names;
  Eigen::MatrixXd values(t.hs.size(), t.methods.size());
  for (std::size_t r = 0; r < t.hs.size(); ++r)
    for (std::size_t c = 0; c < t.methods.size(); ++c)
      values(r, c) = t.at(r, c).stable ? t.at(r, c).value : std::numeric_limits<double>::quiet_NaN();
  d["values"] = values;  // nan marks an unstable run
  return d;
}

std::string csv_of(const ExperimentConfig& cfg, const ErrorTable& t) {
  std::ostringstream out;
  write_error_table_csv(out, cfg, t);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Splitting integrators for a PID-controlled rigid vessel";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Method>(m, "Method")
      .value("IE", Method::improved_euler)
      .value("RK4", Method::rk4)
      .value("SP2", Method::sp2)
      .value("SP4", Method::sp4)
      .value("SP6", Method::sp6);
  m.def("parse_method", [](const std::string& s) { return parse_method(s); });
  m.def("method_name", [](Method x) { return std::string(method_name(x)); });
  m.def("method_order", &method_order);

  py::class_<EulerAngles>(m, "EulerAngles")
      .def(py::init<>())
      .def(py::init([](double r, double p, double y) { return EulerAngles{r, p, y}; }), py::arg("roll"),
           py::arg("pitch"), py::arg("yaw"))
      .def_readwrite("roll", &EulerAngles::roll)
      .def_readwrite("pitch", &EulerAngles::pitch)
      .def_readwrite("yaw", &EulerAngles::yaw)
      .def("__repr__", [](const EulerAngles& a) {
        return "EulerAngles(" + format_double(a.roll) + ", " + format_double(a.pitch) + ", " +
               format_double(a.yaw) + ")";
      });

  py::class_<State>(m, "State")
      .def(py::init<>())
      .def(py::init(&state_from), py::arg("y"))
      .def_readwrite("omega", &State::omega)
      .def_property(
          "q", [](const State& s) { return s.q.coeffs(); },
          [](State& s, const Eigen::Vector4d& c) { s.q = Quat::from_coeffs(c); })
      .def_readwrite("v", &State::v)
      .def_readwrite("x", &State::x)
      .def_readwrite("phi_theta", &State::phi_theta)
      .def_readwrite("phi_x", &State::phi_x)
      .def("to_vector", [](const State& s) { return Eigen::VectorXd(s.to_vector()); })
      .def("euler", [](const State& s) { return euler_from_quat(s.q); });

  py::class_<VesselParams>(m, "VesselParams")
      .def(py::init<>())
      .def_readwrite("inertia", &VesselParams::inertia)
      .def_readwrite("mass", &VesselParams::mass)
      .def_readwrite("damping_rot", &VesselParams::damping_rot)
      .def_readwrite("damping_trans", &VesselParams::damping_trans)
      .def_readwrite("gm_long", &VesselParams::gm_long)
      .def_readwrite("gm_trans", &VesselParams::gm_trans)
      .def_readwrite("gravity", &VesselParams::gravity)
      .def_readwrite("water_density", &VesselParams::water_density)
      .def_readwrite("waterplane_area", &VesselParams::waterplane_area)
      .def_readwrite("z_eq", &VesselParams::z_eq)
      .def("validate", &VesselParams::validate);

  py::class_<ControlConfig>(m, "ControlConfig")
      .def(py::init<>())
      .def_readwrite("kp_rot", &ControlConfig::kp_rot)
      .def_readwrite("kd_rot", &ControlConfig::kd_rot)
      .def_readwrite("ki_rot", &ControlConfig::ki_rot)
      .def_readwrite("kp_trans", &ControlConfig::kp_trans)
      .def_readwrite("kd_trans", &ControlConfig::kd_trans)
      .def_readwrite("ki_trans", &ControlConfig::ki_trans)
      .def_readwrite("theta_ref", &ControlConfig::theta_ref)
      .def_readwrite("x_ref", &ControlConfig::x_ref)
      .def_readwrite("t_on", &ControlConfig::t_on)
      .def_readwrite("w_r2_uses_absolute_theta", &ControlConfig::w_r2_uses_absolute_theta)
      .def("validate", &ControlConfig::validate);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("params", &ExperimentConfig::params)
      .def_readwrite("ctrl", &ExperimentConfig::ctrl)
      .def_readwrite("s0", &ExperimentConfig::s0)
      .def_readwrite("t0", &ExperimentConfig::t0)
      .def_readwrite("t_end", &ExperimentConfig::t_end)
      .def_readwrite("h_list", &ExperimentConfig::h_list)
      .def_readwrite("methods", &ExperimentConfig::methods)
      .def_readwrite("output_stride", &ExperimentConfig::output_stride)
      .def_readwrite("magnus_order", &ExperimentConfig::magnus_order)
      .def("validate", &ExperimentConfig::validate)
      .def("canonical_text", [](const ExperimentConfig& c) { return canonical_text(c); })
      .def("hash", [](const ExperimentConfig& c) { return fnv1a64(canonical_text(c)); });

  m.def("parse_config", &parse_config, py::arg("text"), py::arg("origin") = "<string>");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("format_double", &format_double);

  // model
  m.def("default_initial_state", &default_initial_state);
  m.def("hamiltonian", py::overload_cast<const State&, const VesselParams&>(&hamiltonian), py::arg("state"),
        py::arg("params") = VesselParams{});
  m.def(
      "rhs",
      [](const State& s, const VesselParams& p, const ControlConfig& c, bool active) {
        return Eigen::VectorXd(rhs_full(s, p, c, active).to_vector());
      },
      py::arg("state"), py::arg("params") = VesselParams{}, py::arg("ctrl") = ControlConfig{},
      py::arg("active") = true);
  m.def("supply_rate", &supply_rate, py::arg("state"), py::arg("params") = VesselParams{},
        py::arg("ctrl") = ControlConfig{}, py::arg("active") = true);

  // special functions
  m.def("elliptic_K", &elliptic_K, py::arg("k"));
  m.def("elliptic_F", &elliptic_F, py::arg("phi"), py::arg("k"));
  m.def(
      "jacobi_sn_cn_dn",
      [](double u, double k) {
        const EllipticTriple t = jacobi_sn_cn_dn(u, k);
        return py::make_tuple(t.sn, t.cn, t.dn);
      },
      py::arg("u"), py::arg("k"));
  m.def("expm3", &expm3);
  m.def("phi_functions", [](const Eigen::Matrix3d& z) {
    return py::make_tuple(Eigen::Matrix3d(phi1(z)), Eigen::Matrix3d(phi2(z)));
  });

  // sub-flows and steps
  m.def("euler_top", [](const Vec3& w0, const Vec3& inertia, const std::vector<double>& ts) {
    const EulerTopSolution sol = EulerTopSolution::solve(w0, inertia);
    Eigen::MatrixXd out(ts.size(), 3);
    for (std::size_t i = 0; i < ts.size(); ++i) out.row(i) = sol(ts[i]).transpose();
    return out;
  });
  m.def("s1_flow", &s1_flow, py::arg("state"), py::arg("gamma"), py::arg("x_ref"), py::arg("inertia"),
        py::arg("order") = 6);
  m.def("s2_flow", &s2_flow, py::arg("state"), py::arg("gamma"), py::arg("params") = VesselParams{},
        py::arg("ctrl") = ControlConfig{}, py::arg("active") = true);
  m.def("step", &step, py::arg("method"), py::arg("state"), py::arg("h"), py::arg("params") = VesselParams{},
        py::arg("ctrl") = ControlConfig{}, py::arg("active") = true, py::arg("magnus_order") = 0);

  m.def(
      "simulate",
      [](const ExperimentConfig& cfg, Method method, double h) {
        Trajectory tr;
        {
          py::gil_scoped_release release;
          tr = run_simulation(cfg, method, h);
        }
        py::dict d;
        d["t"] = tr.times;
        d["states"] = stack(tr.states);
        d["H"] = tr.hamiltonians;
        d["completed"] = tr.verdict == Verdict::completed;
        d["reason"] = tr.failure_reason;
        d["final_time"] = tr.final_time;
        d["steps"] = tr.steps;
        return d;
      },
      py::arg("cfg"), py::arg("method"), py::arg("h"));

  m.def(
      "order_study",
      [](const ExperimentConfig& cfg, const std::vector<Method>& methods, double scale) {
        HarnessOptions opts;
        opts.scale = scale;
        OrderStudy st;
        {
          py::gil_scoped_release release;
          st = order_study(cfg, methods, opts);
        }
        py::dict slopes;
        for (const OrderFit& f : st.fits) {
          py::dict per;
          for (std::size_t k = 0; k < kErrorComponents.size(); ++k) per[kErrorComponents[k]] = f.slope[k];
          slopes[py::str(std::string(method_name(f.method)))] = per;
        }
        py::dict d;
        d["h"] = st.hs;
        d["slopes"] = slopes;
        return d;
      },
      py::arg("cfg"), py::arg("methods"), py::arg("scale") = 1.0);

  auto table = [&m](const char* name, auto fn, auto default_steps) {
    m.def(
        name,
        [fn, default_steps](const ExperimentConfig& cfg, const std::vector<Method>& methods,
                            std::vector<double> hs, double scale, const std::string& cache_dir) {
          if (hs.empty()) hs = default_steps();
          HarnessOptions opts;
          opts.scale = scale;
          opts.cache_dir = cache_dir;
          ErrorTable t;
          {
            py::gil_scoped_release release;
            t = fn(cfg, methods.empty() ? default_table_methods() : methods, hs, opts);
          }
          py::dict d = table_dict(t);
          d["csv"] = csv_of(cfg, t);
          return d;
        },
        py::arg("cfg"), py::arg("methods") = std::vector<Method>{}, py::arg("hs") = std::vector<double>{},
        py::arg("scale") = 1.0, py::arg("cache_dir") = "");
  };
  table("energy_table", &energy_table, &default_energy_steps);
  table("global_error_table", &global_error_table, &default_global_steps);
}
