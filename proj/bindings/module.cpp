// python bindings for the solver: study driver, self checks, closed forms
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mfglg/lq.hpp"
#include "mfglg/study.hpp"
#include "mfglg/verify.hpp"

namespace py = pybind11;

namespace {

mfglg::StudyConfig config_from_dict(const py::dict& d) {
  std::string test = "lq-1d";
  if (d.contains("test")) test = py::cast<std::string>(d["test"]);
  mfglg::StudyConfig cfg = mfglg::StudyConfig::defaults_for(test);
  for (auto item : d) {
    const auto key = py::cast<std::string>(item.first);
    cfg.apply(key, py::cast<std::string>(py::str(item.second)));
  }
  return cfg;
}

py::dict report_to_dict(const mfglg::ConvergenceReport& rep) {
  py::dict out;
  out["test"] = rep.test;
  out["field_names"] = rep.field_names;
  py::list rows;
  for (const auto& r : rep.rows) {
    py::dict row;
    row["dx"] = r.dx;
    row["dt"] = r.dt;
    row["failed"] = r.failed;
    if (r.failed) {
      row["failure"] = r.failure;
    } else {
      row["iterations"] = r.iterations;
      row["converged"] = r.converged;
      row["positivity_error"] = r.positivity;
      row["mass_drift"] = r.mass_drift;
      row["wall_time_s"] = r.wall_s;
      py::dict fields;
      for (const auto& [name, e] : r.fields) {
        py::dict f;
        f["e_inf"] = e.e_inf;
        f["e_2"] = e.e_2;
        f["absolute"] = e.absolute;
        fields[name.c_str()] = f;
      }
      row["fields"] = fields;
    }
    rows.append(row);
  }
  out["rows"] = rows;
  return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "mean field game solver with a high-order transport discretization";

  m.def("defaults", [](const std::string& test) {
    return mfglg::StudyConfig::defaults_for(test).as_map();
  }, py::arg("test") = "lq-1d",
     "resolved default configuration for a named study");

  m.def("run_study", [](const py::dict& config, bool emit) {
    const mfglg::StudyConfig cfg = config_from_dict(config);
    const auto rep = mfglg::run_study(cfg);
    if (emit) mfglg::emit_report(rep, cfg);
    return report_to_dict(rep);
  }, py::arg("config"), py::arg("emit") = false,
     "run a convergence study; optionally write tables and plot data");

  m.def("verify", [](const std::string& scratch_dir) {
    py::list out;
    for (const auto& r : mfglg::verify::run_checks(scratch_dir))
      out.append(py::make_tuple(r.name, r.pass, r.detail));
    return out;
  }, py::arg("scratch_dir") = std::string("verify_scratch"),
     "run the built-in self checks; returns (name, passed, detail) tuples");

  m.def("lq_value", [](double t, std::vector<double> x, double sigma2, double T,
                       double mu0, double v0) {
    mfglg::LqParams p;
    p.sigma2 = sigma2;
    p.T = T;
    p.dim = static_cast<int>(x.size());
    p.mu0 = {mu0, p.dim == 2 ? mu0 : 0.0};
    p.V0 = v0;
    return mfglg::lq_value(t, {x[0], x.size() > 1 ? x[1] : 0.0}, p);
  }, py::arg("t"), py::arg("x"), py::arg("sigma2") = 0.1, py::arg("T") = 0.25,
     py::arg("mu0") = 0.3, py::arg("v0") = 0.0625,
     "closed-form equilibrium value function");

  m.def("lq_density", [](double t, std::vector<double> x, double sigma2, double T,
                         double mu0, double v0) {
    mfglg::LqParams p;
    p.sigma2 = sigma2;
    p.T = T;
    p.dim = static_cast<int>(x.size());
    p.mu0 = {mu0, p.dim == 2 ? mu0 : 0.0};
    p.V0 = v0;
    return mfglg::lq_density(t, {x[0], x.size() > 1 ? x[1] : 0.0}, p);
  }, py::arg("t"), py::arg("x"), py::arg("sigma2") = 0.1, py::arg("T") = 0.25,
     py::arg("mu0") = 0.3, py::arg("v0") = 0.0625,
     "closed-form equilibrium density");

  m.attr("__version__") = "0.1.0";
}
