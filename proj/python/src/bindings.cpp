#include <sstream>
#include <string>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cwsradar/config.hpp"
#include "cwsradar/crlb.hpp"
#include "cwsradar/decision.hpp"
#include "cwsradar/designer.hpp"
#include "cwsradar/experiments.hpp"
#include "cwsradar/radar_model.hpp"
#include "cwsradar/result_table.hpp"
#include "cwsradar/twdl.hpp"

namespace py = pybind11;
using namespace cwsradar;

namespace {

ExperimentConfig config_from_string(const std::string& text) {
  auto cfg = config_from_json(nlohmann::json::parse(text));
  validate_config(cfg);
  return cfg;
}

ResultTable run_named(const std::string& name, const ExperimentConfig& cfg, bool monte_carlo) {
  if (name == "design") return run_design(cfg);
  if (name == "error-sweep") return run_error_index_sweep(cfg);
  if (name == "rule-compare") return run_rule_comparison(cfg);
  if (name == "mtwdl-tbp") return run_mtwdl_vs_tbp(cfg, monte_carlo);
  if (name == "mtwdl-snr") return run_mtwdl_vs_snr(cfg, monte_carlo);
  if (name == "ks-check") return run_ks_check(cfg);
  throw InvalidArgument("unknown experiment '" + name + "'");
}

py::dict table_to_dict(const ResultTable& t) {
  py::list rows;
  for (const auto& r : t.rows)
    rows.append(py::make_tuple(r.x, r.series, r.value,
                               r.standard_error ? py::cast(*r.standard_error) : py::none()));
  py::dict meta;
  for (const auto& [k, v] : t.metadata) meta[py::str(k)] = v;
  py::dict out;
  out["config_hash"] = t.config_hash;
  out["seed"] = t.seed;
  out["metadata"] = meta;
  out["rows"] = rows;
  std::ostringstream csv;
  emit_table(t, csv);
  out["csv"] = csv.str();
  return out;
}

py::dict design_to_dict(const DesignResult& r) {
  static const char* regimes[] = {"interior", "clamped_w", "clamped_t"};
  py::dict d;
  d["bandwidth"] = r.bandwidth;
  d["duration"] = r.duration;
  d["sigma_z2"] = r.sigma_z2;
  d["regime"] = regimes[static_cast<int>(r.regime)];
  return d;
}

}  // namespace

PYBIND11_MODULE(_cwsradar, m) {
  m.doc() = "Collision-warning radar waveform design and loss evaluation";
  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("beat_frequencies",
        [](double range, double velocity, double f0, double bandwidth, double chirp_interval,
           int chirp_count, double sample_rate, double c) {
          const WaveformParams p(f0, bandwidth, chirp_interval, chirp_count, sample_rate);
          const auto b = derive_frequencies({range, velocity, {1.0, 0.0}}, p, c);
          py::dict d;
          d["beat"] = b.beat;
          d["doppler"] = b.doppler;
          d["f1"] = b.f1;
          d["f2"] = b.f2;
          d["phase"] = b.phase;
          return d;
        },
        py::arg("range"), py::arg("velocity"), py::arg("f0"), py::arg("bandwidth"),
        py::arg("chirp_interval"), py::arg("chirp_count"), py::arg("sample_rate"),
        py::arg("c") = kSpeedOfLight);

  m.def("crlb_range_velocity",
        [](double gamma, double bandwidth, double duration, double f0, double c) {
          const auto b = crlb_range_velocity(gamma, bandwidth, duration, f0, c);
          return py::make_tuple(b.range_var, b.velocity_var);
        },
        py::arg("gamma"), py::arg("bandwidth"), py::arg("duration"), py::arg("f0"),
        py::arg("c") = kSpeedOfLight, "(B_d, B_v) for linear SNR gamma.");
  m.def("error_index", &error_index, py::arg("range_var"), py::arg("velocity_var"),
        py::arg("tau0"));

  py::class_<ErrorModel>(m, "ErrorModel")
      .def(py::init<double, double, double>(), py::arg("range_var"), py::arg("velocity_var"),
           py::arg("tau0"))
      .def_property_readonly("range_var", &ErrorModel::range_var)
      .def_property_readonly("velocity_var", &ErrorModel::velocity_var)
      .def_property_readonly("tau0", &ErrorModel::tau0)
      .def_property_readonly("sigma_z", &ErrorModel::sigma_z);

  m.def("q_function", &q_function, py::arg("x"));
  m.def("statistic_approx", &statistic_approx, py::arg("d_hat"), py::arg("v_hat"),
        py::arg("tau0"));
  m.def("statistic_glrt", &statistic_glrt, py::arg("d_hat"), py::arg("v_hat"), py::arg("em"));
  m.def("pw_approx", &pw_approx, py::arg("d"), py::arg("v"), py::arg("lam"), py::arg("em"));
  m.def("pw_glrt",
        [](double d, double v, double lam, const ErrorModel& em, int nodes) {
          GlrtQuadrature q;
          q.nodes = nodes;
          return pw_glrt_numeric(d, v, lam, em, q);
        },
        py::arg("d"), py::arg("v"), py::arg("lam"), py::arg("em"), py::arg("nodes") = 201);

  m.def("pwdl", [](int id, double d, double v, double tau0) {
    return pwdl_eval(standard_pwdl(id), d, v, tau0);
  }, py::arg("pwdl_id"), py::arg("d"), py::arg("v"), py::arg("tau0"));
  m.def("twdl",
        [](double lam, double sigma_z, int id, double tau0, int nodes) {
          QuadratureSpec q;
          q.nd = q.nv = nodes;
          return twdl(lam, sigma_z, standard_pwdl(id), evaluation_domain(), tau0, q);
        },
        py::arg("lam"), py::arg("sigma_z"), py::arg("pwdl_id"), py::arg("tau0"),
        py::arg("nodes") = 400);
  m.def("mtwdl",
        [](double sigma_z, int id, double tau0, int nodes) {
          QuadratureSpec q;
          q.nd = q.nv = nodes;
          const auto r = mtwdl(sigma_z, standard_pwdl(id), evaluation_domain(), tau0, q);
          return py::make_tuple(r.value, r.lambda);
        },
        py::arg("sigma_z"), py::arg("pwdl_id"), py::arg("tau0"), py::arg("nodes") = 400,
        "(U*, lambda*) over the evaluation domain.");

  m.def("optimize_waveform",
        [](double w_max, double t_max, double tbp, double f0, double tau0, double gamma,
           double c) {
          return design_to_dict(optimize_waveform({w_max, t_max, tbp, f0, tau0, gamma}, c));
        },
        py::arg("w_max"), py::arg("t_max"), py::arg("tbp"), py::arg("f0"), py::arg("tau0"),
        py::arg("gamma"), py::arg("c") = kSpeedOfLight);
  m.def("conventional_design",
        [](double delta_d, double delta_v, double f0, double c) {
          const auto r = conventional_design({delta_d, delta_v}, f0, c);
          return py::make_tuple(r.bandwidth, r.duration, r.tbp);
        },
        py::arg("delta_d"), py::arg("delta_v"), py::arg("f0"), py::arg("c") = kSpeedOfLight);
  m.def("design_ratio",
        [](double tau0, double delta_d, double delta_v) {
          return design_ratio(tau0, {delta_d, delta_v});
        },
        py::arg("tau0"), py::arg("delta_d"), py::arg("delta_v"));

  m.def("_default_config_json", [] { return config_to_json(default_config()).dump(); });
  m.def("_config_hash", [](const std::string& text) {
    return config_hash(config_from_string(text));
  });
  m.def("_run_experiment",
        [](const std::string& name, const std::string& text, bool monte_carlo) {
          const auto cfg = config_from_string(text);
          ResultTable t;
          {
            py::gil_scoped_release release;
            t = run_named(name, cfg, monte_carlo);
          }
          return table_to_dict(t);
        },
        py::arg("name"), py::arg("config"), py::arg("monte_carlo") = true);
}
