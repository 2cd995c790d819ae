#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fbq/diagnostics.hpp"
#include "fbq/eigen_index.hpp"
#include "fbq/integrator.hpp"
#include "fbq/run.hpp"

namespace py = pybind11;
using namespace fbq;

namespace {

SpectralField field_from_array(const GridSpec& grid, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2 || a.shape(0) != grid.n || a.shape(1) != grid.n)
    throw std::invalid_argument("expected an n x n array of physical samples");
  return to_spectral(grid, std::span<const double>(a.data(), static_cast<std::size_t>(a.size())));
}

py::array_t<double> field_to_array(const SpectralField& f) {
  const auto v = from_spectral(f);
  py::array_t<double> out({f.grid().n, f.grid().n});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fractional-dissipation Boussinesq solver core";

  py::class_<GridSpec>(m, "Grid")
      .def(py::init(&make_grid), py::arg("n"))
      .def_readonly("n", &GridSpec::n)
      .def_readonly("dealias_cut", &GridSpec::dealias_cut)
      .def("__repr__", [](const GridSpec& g) { return "Grid(n=" + std::to_string(g.n) + ")"; });

  py::class_<PhysParams>(m, "PhysParams")
      .def(py::init([](double nu, double kappa, double alpha, double beta, bool allow) {
             PhysParams p{nu, kappa, alpha, beta, allow};
             p.validate();
             return p;
           }),
           py::arg("nu") = 0.1, py::arg("kappa") = 0.1, py::arg("alpha") = 0.75, py::arg("beta") = 0.75,
           py::arg("allow_out_of_range_exponents") = false)
      .def_readonly("nu", &PhysParams::nu)
      .def_readonly("kappa", &PhysParams::kappa)
      .def_readonly("alpha", &PhysParams::alpha)
      .def_readonly("beta", &PhysParams::beta);

  py::class_<SpectralField>(m, "SpectralField")
      .def_static("from_physical", &field_from_array, py::arg("grid"), py::arg("samples"))
      .def("to_physical", &field_to_array)
      .def("coeff", &SpectralField::coeff, py::arg("k1"), py::arg("k2"))
      .def("sobolev_norm", [](const SpectralField& f, double s) { return sobolev_norm(f, s); }, py::arg("s"))
      .def("lp_norm", [](const SpectralField& f, double p) { return lp_norm(f, p); }, py::arg("p"))
      .def("fractional_laplacian", [](const SpectralField& f, double s) { return fractional_laplacian(f, s); },
           py::arg("s"));

  py::class_<EigenIndex>(m, "EigenIndex")
      .def(py::init<const GridSpec&>(), py::arg("grid"))
      .def("__len__", &EigenIndex::size)
      .def("eigenvalue", &EigenIndex::eigenvalue, py::arg("m"))
      .def("project_low", [](const EigenIndex& idx, const SpectralField& f, int mm) { return project_low(f, idx, mm); })
      .def("project_high", [](const EigenIndex& idx, const SpectralField& f, int mm) { return project_high(f, idx, mm); });

  m.def("gauss_constant", &gauss_constant, py::arg("tolerance") = 1e-14);
  m.def("sobolev_constant", &sobolev_constant, py::arg("s"));
  m.def("dimension_bound", &dimension_bound, py::arg("codimension"), py::arg("l"), py::arg("delta"));
  m.def("rho_m", &rho_m, py::arg("params"), py::arg("lam"));
  m.def(
      "compute_M",
      [](const PhysParams& p, double A, double B, double A1) {
        const auto e = compute_M(p, A, B, A1);
        return py::dict(py::arg("M1") = e.M1, py::arg("M2") = e.M2, py::arg("M") = e.M, py::arg("overflow") = e.overflow);
      },
      py::arg("params"), py::arg("A"), py::arg("B"), py::arg("A1"));
  m.def(
      "compute_N",
      [](const PhysParams& p, double lb, double M) {
        const auto n = compute_N(p, lb, M);
        return py::make_tuple(n.N, n.overflow);
      },
      py::arg("params"), py::arg("norm_lambda_beta_f"), py::arg("M"));

  m.def(
      "simulate_decay",
      [](const GridSpec& grid, const PhysParams& params, py::array_t<double> theta0, double dt, int steps) {
        FlowState s(field_from_array(grid, theta0), SpectralField(grid));
        const ForcingSpec f = make_forcing(grid, {}, params);
        Stepper stepper(grid, params, Scheme::IfRk4, ModelOptions{false, false});
        for (int i = 0; i < steps; ++i) stepper.advance(s, f, dt);
        return field_to_array(s.theta);
      },
      py::arg("grid"), py::arg("params"), py::arg("theta0"), py::arg("dt"), py::arg("steps"),
      "Pure diffusion of a temperature field (advection and buoyancy off, no forcing).");

  m.def(
      "run",
      [](const std::string& text, const std::string& command, const std::string& out_dir,
         std::optional<std::uint64_t> seed) {
        RunConfig c = parse_config(text);
        c.command = command;
        c.output_dir = out_dir;
        if (seed) c.seed = seed;
        c.finalize();
        std::ostringstream console, errors;
        const int code = fbq::run(c, console, errors);
        return py::make_tuple(code, console.str());
      },
      py::arg("config_text"), py::arg("command"), py::arg("out_dir"), py::arg("seed") = py::none(),
      "Runs a CLI subcommand in-process; returns (exit code, console text).");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
