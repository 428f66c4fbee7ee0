#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qnd/chain.hpp"
#include "qnd/error.hpp"
#include "qnd/fidelity.hpp"
#include "qnd/optimizer.hpp"
#include "qnd/parallel.hpp"
#include "qnd/state_spec.hpp"

namespace py = pybind11;
using namespace qnd;

namespace {

template <typename T>
py::array_t<T> to_array(std::span<const T> values) {
  py::array_t<T> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<double> nodes(const Grid& g) {
  const auto pts = g.points();
  return to_array<double>(pts);
}

py::dict report_dict(const TradeOffReport& r) {
  py::dict d;
  d["x_m"] = r.x_m;
  d["F_at_xm"] = r.F_at_xm;
  d["G_at_xm"] = r.G_at_xm;
  d["x_e"] = r.x_e;
  d["F_at_xe"] = r.F_at_xe;
  d["G_at_xe"] = r.G_at_xe;
  d["evaluations"] = r.evaluations;
  d["tolerance"] = r.tolerance;
  d["multimodal"] = r.multimodal;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quadrature-measurement chain simulator";

  static py::exception<Error> qnd_error(m, "QndError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(qnd_error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Grid>(m, "Grid")
      .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"), py::arg("n_points"))
      .def_property_readonly("x_min", &Grid::x_min)
      .def_property_readonly("x_max", &Grid::x_max)
      .def_property_readonly("step", &Grid::step)
      .def("__len__", &Grid::size)
      .def("points", &nodes);

  py::class_<WaveFunction>(m, "WaveFunction")
      .def_static(
          "from_amplitudes",
          [](const Grid& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> amps) {
            return WaveFunction::from_amplitudes(g, std::vector<cplx>(amps.data(), amps.data() + amps.size()));
          },
          py::arg("grid"), py::arg("amplitudes"))
      .def_property_readonly("grid", &WaveFunction::grid)
      .def_property_readonly("x", [](const WaveFunction& w) { return nodes(w.grid()); })
      .def_property_readonly("amplitudes", [](const WaveFunction& w) { return to_array<cplx>(w.amplitudes()); })
      .def("norm", &WaveFunction::norm)
      .def("at", &WaveFunction::at, py::arg("x"))
      .def("density", [](const WaveFunction& w) { return density(w); })
      .def("__len__", &WaveFunction::size);

  py::class_<Distribution>(m, "Distribution")
      .def_property_readonly("x", [](const Distribution& d) { return nodes(d.grid()); })
      .def_property_readonly("p", [](const Distribution& d) { return to_array<double>(d.density()); })
      .def("at", &Distribution::at, py::arg("x"))
      .def("integral", &Distribution::integral)
      .def("mean", &Distribution::mean)
      .def("variance", &Distribution::variance)
      .def("__len__", &Distribution::size);

  m.def(
      "gaussian",
      [](double mean, double variance, std::size_t n) {
        const GaussianSpec spec{mean, variance};
        return build_gaussian(spec, default_grid(spec, n));
      },
      py::arg("mean"), py::arg("variance"), py::arg("n_points") = kDefaultGridPoints,
      "Gaussian state whose quadrature density is N(mean, variance).");
  m.def(
      "cat",
      [](double separation, double variance, std::size_t n) {
        return build_cat(separation, variance, default_cat_grid(separation, variance, n));
      },
      py::arg("separation"), py::arg("variance"), py::arg("n_points") = kDefaultGridPoints);
  m.def(
      "state",
      [](const std::string& spec, std::size_t n) { return build_state(parse_state_spec(spec), GridPolicy{n, 0.0}); },
      py::arg("spec"), py::arg("n_points") = kDefaultGridPoints,
      "Build a state from gaussian:<mean>,<var>, cat:<sep>,<var> or file:<path>.");

  m.def("overlap", &overlap, py::arg("a"), py::arg("b"));
  m.def("l2_distance", &l2_distance, py::arg("a"), py::arg("b"));

  m.def(
      "homodyne_distribution",
      [](const WaveFunction& s, const WaveFunction& p, double phi) { return homodyne_distribution(s, p, phi); },
      py::arg("signal"), py::arg("probe"), py::arg("phi"));
  m.def("outcome_density", &outcome_density, py::arg("signal"), py::arg("probe"), py::arg("phi"), py::arg("x0"));
  m.def("conditional_output", &conditional_output, py::arg("signal"), py::arg("probe"), py::arg("phi"),
        py::arg("x0"));
  m.def("run_pipeline", &run_pipeline, py::arg("signal"), py::arg("probe"), py::arg("phi"), py::arg("x0"));
  m.def(
      "sample_outcomes",
      [](const Distribution& d, std::size_t count, std::uint64_t seed) {
        const auto draws = sample_outcomes(d, count, seed);
        return to_array<double>(draws);
      },
      py::arg("distribution"), py::arg("count"), py::arg("seed"));

  m.def(
      "state_fidelity",
      [](const WaveFunction& s, const WaveFunction& p, double phi) { return state_fidelity(s, p, phi); },
      py::arg("signal"), py::arg("probe"), py::arg("phi"));
  m.def("distribution_fidelity", &distribution_fidelity, py::arg("signal"), py::arg("probe"), py::arg("phi"));
  m.def("gaussian_state_fidelity", &gaussian_state_fidelity, py::arg("x"));
  m.def("gaussian_distribution_fidelity", &gaussian_distribution_fidelity, py::arg("x"));
  m.def("trade_off_parameter", &trade_off_parameter, py::arg("sigma_s"), py::arg("sigma_p"), py::arg("phi"));

  m.def(
      "trade_off",
      [](double x) {
        const auto pair = trade_off(x);
        return py::make_tuple(pair.F, pair.G);
      },
      py::arg("x"), "Closed-form (F, G) at trade-off parameter x.");
  m.def(
      "optimize_closed", [](double tol, double lo, double hi) { return report_dict(optimize_closed(tol, lo, hi)); },
      py::arg("tol") = 1e-6, py::arg("lo") = kTradeOffLo, py::arg("hi") = kTradeOffHi);
  m.def(
      "optimize_numeric",
      [](const WaveFunction& s, double phi, double tol, double lo, double hi) {
        TradeOffReport r;
        {
          py::gil_scoped_release release;
          r = optimize_numeric(s, phi, tol, lo, hi, threads_from_env());
        }
        return report_dict(r);
      },
      py::arg("signal"), py::arg("phi"), py::arg("tol") = 1e-3, py::arg("lo") = kTradeOffLo,
      py::arg("hi") = kTradeOffHi);
  m.def("equal_fidelity_point", &equal_fidelity_point, py::arg("lo"), py::arg("hi"), py::arg("tol"));
  m.def("tune_phase", &tune_phase, py::arg("sigma_s"), py::arg("sigma_p"), py::arg("x_target"));
  m.def(
      "numeric_trade_off_curve",
      [](const WaveFunction& s, const std::vector<double>& variances, double phi) {
        std::vector<FidelityPair> curve;
        {
          py::gil_scoped_release release;
          curve = numeric_trade_off_curve(s, variances, phi, threads_from_env());
        }
        py::list out;
        for (const auto& c : curve) out.append(py::make_tuple(c.x.value_or(0.0), c.F, c.G));
        return out;
      },
      py::arg("signal"), py::arg("probe_variances"), py::arg("phi"),
      "List of (x, F, G) for Gaussian probes of the given variances.");
}
