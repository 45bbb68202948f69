#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hardylab/cli.hpp"
#include "hardylab/geometry.hpp"
#include "hardylab/intertwine.hpp"
#include "hardylab/spectra.hpp"
#include "hardylab/symbol_json.hpp"
#include "hardylab/wold.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace hardylab;

namespace {

SymbolSpec as_symbol(const py::object& o) {
    if (py::isinstance<SymbolSpec>(o)) return o.cast<SymbolSpec>();
    if (py::isinstance<py::str>(o)) return parse_symbol_argument(o.cast<std::string>());
    // dicts and lists go through JSON
    const std::string text = py::module_::import("json").attr("dumps")(o).cast<std::string>();
    return symbol_from_json(json::parse(text));
}

PowerSeries as_series(const py::object& o, std::size_t n) {
    if (py::isinstance<PowerSeries>(o)) return o.cast<PowerSeries>().resized(n);
    return to_series(as_symbol(o), n);
}

py::dict report(const IntertwineReport& r) {
    py::dict d;
    d["residual"] = r.residual;
    d["residual_frobenius"] = r.residual_frobenius;
    d["max_abs_entry"] = r.max_abs_entry;
    d["scale"] = r.scale;
    d["relative_residual"] = r.relative_residual;
    d["valid_block"] = r.valid_block;
    d["block_rule"] = r.block_rule;
    d["norm_x"] = r.norm_x;
    d["norm_phi"] = r.norm_phi;
    d["norm_psi"] = r.norm_psi;
    d["exact_zero"] = r.exact_zero();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Truncated Hardy-space Toeplitz and composition operators";

    py::register_exception<MathError>(m, "MathError", PyExc_ArithmeticError);

    py::class_<PowerSeries>(m, "PowerSeries")
        .def(py::init<std::vector<cplx>, std::optional<int>>(), py::arg("coeffs"), py::arg("exact_degree") = py::none())
        .def_property_readonly("coeffs", &PowerSeries::coeffs)
        .def_property_readonly("truncation", &PowerSeries::truncation)
        .def_property_readonly("exact_degree", &PowerSeries::exact_degree)
        .def("__getitem__", [](const PowerSeries& s, std::size_t k) {
            if (k >= s.truncation()) throw py::index_error();
            return s[k];
        })
        .def("__len__", &PowerSeries::truncation)
        .def("__call__", [](const PowerSeries& s, cplx z) { return evaluate(s, z); })
        .def("__repr__", [](const PowerSeries& s) {
            std::ostringstream o;
            o << "PowerSeries(N=" << s.truncation() << ")";
            return o.str();
        });

    py::class_<SymbolSpec>(m, "Symbol")
        .def(py::init([](const py::object& o) { return as_symbol(o); }), py::arg("spec"))
        .def("__call__", [](const SymbolSpec& s, cplx z) { return evaluate(s, z); })
        .def("series", [](const SymbolSpec& s, std::size_t n) { return to_series(s, n); }, py::arg("n"))
        .def("to_json", [](const SymbolSpec& s) { return symbol_to_json(s).dump(); })
        .def("describe", &SymbolSpec::describe)
        .def("__eq__", [](const SymbolSpec& a, const SymbolSpec& b) { return a == b; })
        .def("__repr__", [](const SymbolSpec& s) { return "Symbol(" + s.describe() + ")"; });
    py::implicitly_convertible<py::str, SymbolSpec>();

    // series
    m.def("to_series", [](const py::object& s, std::size_t n) { return to_series(as_symbol(s), n); },
          py::arg("symbol"), py::arg("n"));
    m.def("multiply", &multiply);
    m.def("compose", [](const PowerSeries& a, const PowerSeries& b) { return hardylab::compose(a, b); });
    m.def("reversion", &reversion);
    m.def("series_sqrt", &series_sqrt);
    m.def("evaluate", [](const py::object& s, cplx z) { return evaluate(as_symbol(s), z); });

    // operators
    m.def("toeplitz_matrix", [](const py::object& s, std::size_t n) { return toeplitz_matrix(as_symbol(s), n).entries; },
          py::arg("symbol"), py::arg("n"));
    m.def(
        "weighted_composition_matrix",
        [](const py::object& w, const py::object& h, std::size_t n) {
            return weighted_composition_matrix(as_series(w, n), as_series(h, n), n).entries;
        },
        py::arg("omega"), py::arg("h"), py::arg("n"));
    m.def("kernel_vector", [](cplx a, std::size_t n) { return kernel_vector(a, n).coords; });
    m.def(
        "kernel_eigen_residual",
        [](const py::object& s, cplx a, std::size_t n) {
            const auto r = kernel_eigen_residual(as_symbol(s), a, n);
            return py::dict("residual"_a = r.residual, "tail_bound"_a = r.tail_bound, "eigenvalue"_a = r.eigenvalue);
        },
        py::arg("phi"), py::arg("a"), py::arg("n"));
    m.def("operator_norm", [](const Matrix& x) { return operator_norm(x).value; });

    // intertwining
    m.def(
        "intertwine_residual",
        [](const Matrix& x, const py::object& phi, const py::object& psi) {
            const std::size_t n = static_cast<std::size_t>(x.rows());
            return report(intertwine_residual(OperatorMatrix{x, n, 0, "X"}, as_series(phi, n), as_series(psi, n)));
        },
        py::arg("x"), py::arg("phi"), py::arg("psi"));
    m.def(
        "recover_weighted_comp",
        [](const Matrix& x, const std::vector<cplx>& samples, double tol) {
            const std::size_t n = static_cast<std::size_t>(x.rows());
            const auto r = recover_weighted_comp(OperatorMatrix{x, n, 0, "X"}, samples, tol);
            py::list h, w, ok;
            for (const auto& s : r.samples) {
                h.append(s.h);
                w.append(s.omega);
                ok.append(s.consistent);
            }
            return py::dict("h"_a = h, "omega"_a = w, "consistent_at"_a = ok, "consistent"_a = r.consistent,
                            "max_power_defect"_a = r.max_power_defect);
        },
        py::arg("x"), py::arg("samples"), py::arg("tol") = 1e-6);
    m.def(
        "deddens",
        [](const py::object& phi, std::size_t n, std::size_t cutoff) {
            const auto d = deddens_inner_X(as_symbol(phi), n, cutoff);
            return py::dict("x"_a = d.x.entries, "gram_defect"_a = d.basis.gram_defect,
                            "max_tail_energy"_a = d.basis.max_tail_energy,
                            "restricted_residual"_a = d.restricted_residual, "norm_x"_a = d.norm_x.value);
        },
        py::arg("phi"), py::arg("n"), py::arg("cutoff"));
    m.def(
        "finite_dim_partner",
        [](const Matrix& a, const Matrix& b, cplx lambda) {
            const auto p = finite_dim_partner(a, b, lambda);
            return py::dict("y"_a = p.y, "residual"_a = p.residual, "scale"_a = p.scale);
        },
        py::arg("a"), py::arg("b"), py::arg("lam"));
    m.def("disc_samples", &disc_samples, py::arg("rings"), py::arg("per_ring"), py::arg("r_max"));

    // geometry
    m.def(
        "valence",
        [](const py::object& s, cplx w) {
            const auto v = valence(as_symbol(s), w);
            return py::dict("valence"_a = v.valence, "margin"_a = v.margin, "status"_a = to_string(v.status));
        },
        py::arg("phi"), py::arg("w"));
    m.def(
        "image_contained",
        [](const py::object& psi, const py::object& phi, std::size_t radial, std::size_t angular) {
            SamplingPlan p;
            p.radial = radial;
            p.angular = angular;
            const auto r = image_contained(as_symbol(psi), as_symbol(phi), p);
            return py::dict("inside"_a = r.inside, "outside"_a = r.outside, "unresolved"_a = r.unresolved,
                            "contained"_a = r.contained(), "closure_contained"_a = r.closure_contained());
        },
        py::arg("psi"), py::arg("phi"), py::arg("radial") = 64, py::arg("angular") = 256);
    m.def("cardioid_membership", &cardioid_membership);

    // spectra
    m.def(
        "subordination_solve",
        [](const py::object& phi, const py::object& psi, std::size_t n) {
            const auto r = subordination_solve(as_symbol(phi), as_symbol(psi), n);
            py::dict d("method"_a = r.method, "failure"_a = r.failure, "detail"_a = r.detail,
                       "certificate"_a = r.certificate, "composition_residual"_a = r.composition_residual,
                       "ok"_a = r.ok());
            d["omega"] = r.omega ? py::cast(*r.omega) : py::none();
            return d;
        },
        py::arg("phi"), py::arg("psi"), py::arg("n") = 128);
    m.def(
        "ee_membership",
        [](const py::object& phi, cplx lambda) {
            const auto v = ee_membership(as_symbol(phi), lambda);
            return py::dict("status"_a = to_string(v.status), "necessary"_a = v.necessary_pass,
                            "constructive"_a = v.constructive_pass, "reason"_a = v.reason);
        },
        py::arg("phi"), py::arg("lam"));
    m.def("ee_predicate_z2z", [](cplx lambda) { return ee_predicate_z2z(lambda).member; });
    m.def(
        "eigenvector_for_value",
        [](const py::object& phi, cplx alpha, std::size_t n) -> py::object {
            const auto h = eigenvector_for_value(as_symbol(phi), alpha, n);
            if (!h) return py::none();
            return py::dict("a"_a = h->a, "kernel"_a = h->kernel.coords, "residual"_a = h->residual.residual,
                            "verified"_a = h->verified);
        },
        py::arg("phi"), py::arg("alpha"), py::arg("n") = 256);

    // command line
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
