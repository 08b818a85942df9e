#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "skqi/harness.hpp"

namespace py = pybind11;
using namespace skqi;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array& a, PointKind kind = PointKind::Loaded) {
  if (a.ndim() != 2 || a.shape(1) < 2) throw py::value_error("points must be an (n, d+1) array");
  const auto* p = a.data();
  return PointSet(static_cast<int>(a.shape(1)) - 1, std::vector<double>(p, p + a.size()), kind);
}

Array to_array(const PointSet& p) {
  Array out({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.ambient())});
  std::copy(p.coords().begin(), p.coords().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

RadialProfile profile(const std::string& family, int l, int k) {
  if (family == "gaussian") return RadialProfile::gaussian();
  if (family == "wendland") return RadialProfile::wendland(l, k);
  throw py::value_error("family must be 'gaussian' or 'wendland'");
}

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  d["N"] = r.n;
  d["L2err"] = r.l2;
  d["Linferr"] = r.linf;
  d["MMSE"] = r.mmse ? py::cast(*r.mmse) : py::none();
  d["time_s"] = r.wall_time_s;
  return d;
}

}  // namespace

PYBIND11_MODULE(_skqi, m) {
  m.doc() = "Scaled zonal kernel quasi-interpolation on the sphere";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("random_points", [](std::size_t n, int d, std::uint64_t seed) { return to_array(random_points(n, d, seed)); },
        py::arg("n"), py::arg("d") = 2, py::arg("seed") = 0);
  m.def("spiral_points", [](std::size_t n) { return to_array(spiral_points(n)); }, py::arg("n"));
  m.def("load_points", [](const std::filesystem::path& p) { return to_array(load_points(p)); });
  m.def("separation_distance", [](const Array& pts) { return separation_distance(to_points(pts)); });
  m.def("fill_distance_estimate",
        [](const Array& pts, std::uint64_t seed, double factor) { return fill_distance_estimate(to_points(pts), seed, factor); },
        py::arg("points"), py::arg("probe_seed") = 0, py::arg("factor") = 20.0);

  m.def("harmonic_dim", &harmonic_dim, py::arg("d"), py::arg("ell"));
  m.def("legendre", &legendre, py::arg("ell"), py::arg("d"), py::arg("t"));
  m.def("eval_harmonic", [](int ell, int k, const Array& pts) {
    const PointSet p = to_points(pts);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = eval_harmonic({ell, k}, p[i]);
    return to_array(out);
  });
  m.def("franke", [](const Array& pts) { return to_array(sample(franke, to_points(pts))); });

  py::class_<ZonalKernel>(m, "ZonalKernel")
      .def("__call__", [](const ZonalKernel& k, double t) { return k(t); })
      .def_property_readonly("rho", &ZonalKernel::rho)
      .def_property_readonly("order", &ZonalKernel::order)
      .def_property_readonly("lam", &ZonalKernel::lambda)
      .def_property_readonly("peak", &ZonalKernel::peak)
      .def_property_readonly("cutoff_chord", &ZonalKernel::cutoff_chord)
      .def("spectrum",
           [](const ZonalKernel& k, int lmax, const std::string& method) {
             return to_array(method == "closed" ? spectrum_closed(k, lmax).coeffs : spectrum_quadrature(k, lmax).coeffs);
           },
           py::arg("lmax"), py::arg("method") = "quadrature");
  m.def("make_kernel",
        [](const std::string& family, double rho, int order, int l, int k) {
          return make_kernel(profile(family, l, k), rho, 2, order);
        },
        py::arg("family"), py::arg("rho"), py::arg("order") = 2, py::arg("l") = 3, py::arg("k") = 1);

  py::class_<Approximant>(m, "Approximant")
      .def("__call__", [](const Approximant& a, const Array& pts) { return to_array(a.evaluate_many(to_points(pts))); })
      .def_property_readonly("n", [](const Approximant& a) { return a.sites().size(); });
  m.def("qi_qmc", [](const Array& sites, const Array& values, const ZonalKernel& k) {
    return qi_qmc(to_points(sites), to_vector(values), k);
  });
  m.def("qi_weighted", [](const Array& sites, const Array& weights, const Array& values, const ZonalKernel& k) {
    return qi_weighted(to_points(sites), to_vector(weights), to_vector(values), k);
  });

  m.def("filter_h", &filter_h, py::arg("x"), py::arg("a") = 1.2);
  m.def("matched_degree", &matched_degree, py::arg("n"), py::arg("a") = 1.2);
  m.def("fit_slope", [](const std::vector<double>& ns, const std::vector<double>& errs) {
    const SlopeFit f = fit_slope(ns, errs);
    return py::make_tuple(f.slope, f.intercept);
  });

  m.def("parse_config", [](const std::string& text) { return config_to_json(parse_config(text)); },
        "Validate a JSON config and return it with defaults filled in.");
  m.def(
      "run_convergence",
      [](const std::string& config_json, std::optional<std::filesystem::path> out) {
        ExperimentConfig cfg = parse_config(config_json);
        cfg.output = out.value_or("");
        const auto res = run_convergence(cfg);
        py::list rows;
        for (const auto& r : res.rows) {
          py::dict d = report_dict(r.report);
          d["rho"] = r.rho;
          rows.append(d);
        }
        py::dict result;
        result["rows"] = rows;
        result["metric"] = res.metric;
        result["slope"] = res.fit.slope;
        return result;
      },
      py::arg("config_json"), py::arg("out") = py::none());
}
