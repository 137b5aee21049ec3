// Python module `xpmodels`.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xpmodels/dynamics.hpp"
#include "xpmodels/errors.hpp"
#include "xpmodels/io.hpp"
#include "xpmodels/models.hpp"
#include "xpmodels/quantum.hpp"
#include "xpmodels/riemann.hpp"
#include "xpmodels/semiclassics.hpp"

namespace py = pybind11;
using namespace xp;

PYBIND11_MODULE(xpmodels, m) {
    m.doc() = "Spectra, semiclassics and geometry of H = U(x) p + V(x)/p models";

    auto domain_err = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ClassicallyForbiddenError>(m, "ClassicallyForbiddenError", domain_err.ptr());
    py::register_exception<DivergentMapError>(m, "DivergentMapError", domain_err.ptr());
    auto usage_err = py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<UnsupportedModelError>(m, "UnsupportedModelError", usage_err.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_ArithmeticError);
    py::register_exception<IngestionError>(m, "IngestionError", PyExc_IOError);

    py::class_<models::XpModel>(m, "Model")
        .def_property_readonly("kind", [](const models::XpModel& x) { return models::to_string(x.kind()); })
        .def_property_readonly("gauge", [](const models::XpModel& x) { return models::to_string(x.gauge()); })
        .def_property_readonly("params", &models::XpModel::params)
        .def_property_readonly("hbar", &models::XpModel::hbar)
        .def_property_readonly("domain",
                               [](const models::XpModel& x) { return py::make_tuple(x.domain().lower, x.domain().upper); })
        .def("U", &models::XpModel::U)
        .def("V", &models::XpModel::V)
        .def("w", &models::XpModel::w)
        .def("with_hbar", &models::XpModel::with_hbar)
        .def("to_json", [](const models::XpModel& x) { return io::model_to_json(x).dump(); })
        .def("__repr__", [](const models::XpModel& x) { return "<Model " + io::model_to_json(x).dump() + ">"; });

    m.def("make_model", &models::make_model, py::arg("kind"), py::arg("params"), py::arg("hbar") = 1.0);
    m.def("make_tabulated", &models::make_tabulated, py::arg("x"), py::arg("w"), py::arg("hbar") = 1.0);
    m.def(
        "to_symmetric_gauge",
        [](const models::XpModel& x) {
            auto [map, img] = models::to_symmetric_gauge(x);
            return py::make_tuple(py::cpp_function(map.forward), img);
        },
        "(forward map x -> x', symmetric-gauge model)");
    m.def(
        "scalar_curvature", [](const models::XpModel& x, double at) { return models::scalar_curvature(x, at).R; },
        py::arg("model"), py::arg("x"));
    m.def("catalog", [] {
        py::list out;
        for (const auto& e : models::catalog()) out.append(py::dict(py::arg("kind") = e.kind, py::arg("params") = e.params,
                                                                    py::arg("description") = e.description));
        return out;
    });

    m.def("period", &dynamics::period, py::arg("model"), py::arg("E"));
    m.def(
        "turning_points",
        [](const models::XpModel& x, double E) {
            const auto tp = dynamics::turning_points(x, E);
            return py::make_tuple(tp.x_m, tp.x_M);
        },
        py::arg("model"), py::arg("E"));

    m.def("count_states", &semiclassics::count_states, py::arg("model"), py::arg("E"));
    m.def("count_closed", &semiclassics::count_closed, py::arg("kind"), py::arg("E"), py::arg("params"),
          py::arg("hbar") = 1.0);
    m.def("threshold_energy", &semiclassics::threshold_energy);
    m.def(
        "invert_profile",
        [](const std::string& name, const models::Params& params, double hbar, const std::vector<double>& grid) {
            const auto np = semiclassics::named_profile(name, params, hbar);
            const auto r = np.family == semiclassics::Family::xp
                               ? semiclassics::abel_invert_xp(np.target, np.lower,
                                                              params.count("x0") ? params.at("x0") : np.lower, hbar, grid)
                               : semiclassics::abel_invert_standard(np.target, np.lower, hbar, grid);
            return r.profile;
        },
        py::arg("name"), py::arg("params") = models::Params{}, py::arg("hbar") = 1.0, py::arg("grid"),
        "[(w or V, x)] for a built-in counting target");

    py::class_<quantum::Eigenvalue>(m, "Eigenvalue")
        .def_readonly("E", &quantum::Eigenvalue::E)
        .def_readonly("residual", &quantum::Eigenvalue::residual)
        .def_readonly("index", &quantum::Eigenvalue::index)
        .def("__repr__", [](const quantum::Eigenvalue& e) {
            return "<Eigenvalue n=" + std::to_string(e.index) + " E=" + io::fmt(e.E) + ">";
        });
    py::class_<quantum::SpectrumResult>(m, "Spectrum")
        .def_readonly("theta", &quantum::SpectrumResult::theta)
        .def_readonly("hbar", &quantum::SpectrumResult::hbar)
        .def_readonly("solver", &quantum::SpectrumResult::solver)
        .def_readonly("eigenvalues", &quantum::SpectrumResult::eigenvalues)
        .def_readonly("zero_mode_norm", &quantum::SpectrumResult::zero_mode_norm)
        .def_readonly("continuum", &quantum::SpectrumResult::continuum)
        .def_readonly("flagged", &quantum::SpectrumResult::flagged)
        .def_property_readonly("energies", [](const quantum::SpectrumResult& s) {
            std::vector<double> e;
            for (const auto& v : s.eigenvalues) e.push_back(v.E);
            return e;
        });

    m.def(
        "modelI_spectrum",
        [](double z0, double theta, double emax, double hbar) { return quantum::modelI_spectrum(z0, theta, emax, hbar); },
        py::arg("z0"), py::arg("theta"), py::arg("emax"), py::arg("hbar") = 1.0);
    m.def("modelI_secular", &quantum::modelI_secular, py::arg("E"), py::arg("z0"), py::arg("theta"),
          py::arg("hbar") = 1.0);
    m.def(
        "shoot_spectrum",
        [](const models::XpModel& x, double theta, double emax) { return quantum::shoot_spectrum(x, theta, emax); },
        py::arg("model"), py::arg("theta"), py::arg("emax"));
    m.def(
        "zero_mode_norm", [](const models::XpModel& x, double theta) { return quantum::zero_mode(x, theta).norm; },
        py::arg("model"), py::arg("theta"));
    m.def(
        "constant_bound_state",
        [](double lp, double theta, double hbar) -> py::object {
            const auto b = quantum::constant_bound_state(lp, theta, hbar);
            if (!b) return py::none();
            return py::dict(py::arg("E0") = b->E0, py::arg("k0") = b->k0, py::arg("C") = b->C,
                            py::arg("mean_x") = b->mean_x);
        },
        py::arg("lp"), py::arg("theta"), py::arg("hbar") = 1.0);
    m.def(
        "constant_scattering",
        [](double E, double lp, double theta, double hbar) {
            const auto s = quantum::constant_model_scattering(E, lp, theta, hbar);
            return py::dict(py::arg("E") = s.E, py::arg("eta") = s.eta, py::arg("u") = s.u, py::arg("k_plus") = s.k_plus,
                            py::arg("k_minus") = s.k_minus, py::arg("A") = s.A, py::arg("B") = s.B);
        },
        py::arg("E"), py::arg("lp"), py::arg("theta"), py::arg("hbar") = 1.0);

    m.def("smooth_zero_count", &riemann::smooth_zero_count);
    m.def("load_zeros", [](const std::string& path) { return riemann::load_zeros(path).ordinates; });
    m.def(
        "compare_spectrum",
        [](const quantum::SpectrumResult& s, std::optional<std::vector<double>> zeros, double alpha) {
            std::optional<riemann::ZerosTable> table;
            if (zeros) table = riemann::parse_zeros([&] {
                std::string t;
                for (double z : *zeros) t += io::fmt(z) + "\n";
                return t;
            }());
            riemann::Identification id;
            id.alpha = alpha;
            const auto text = io::report_to_json(riemann::compare_spectrum(s, table, id)).dump();
            return py::module_::import("json").attr("loads")(text);
        },
        py::arg("spectrum"), py::arg("zeros") = py::none(), py::arg("alpha") = 1.0, "comparison report as a dict");
}
