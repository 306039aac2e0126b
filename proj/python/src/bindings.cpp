// Python bindings. Fields cross the boundary as C-ordered numpy arrays of shape
// (components, G, ..., G), which is exactly the GridFunction memory layout.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>

#include "ellsys/catalog.hpp"
#include "ellsys/ellipticity.hpp"
#include "ellsys/errors.hpp"
#include "ellsys/field_io.hpp"
#include "ellsys/grid.hpp"
#include "ellsys/linear_solver.hpp"
#include "ellsys/nonlinear_solver.hpp"
#include "ellsys/oracle.hpp"

namespace py = pybind11;
using namespace ellsys;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction to_field(const Array& a, double L) {
    if (a.ndim() < 3) throw DimensionError("field array needs shape (components, G, ..., G) with n >= 2");
    const int n = static_cast<int>(a.ndim()) - 1;
    const auto G = a.shape(1);
    for (int d = 1; d <= n; ++d) {
        if (a.shape(d) != G) throw DimensionError("field array must have G points along every axis");
    }
    PeriodicGrid grid(n, static_cast<int>(G), L);
    std::vector<double> values(a.data(), a.data() + a.size());
    return {grid, static_cast<int>(a.shape(0)), std::move(values)};
}

Array to_array(const GridFunction& u) {
    std::vector<py::ssize_t> shape{u.components()};
    for (int d = 0; d < u.grid().n(); ++d) shape.push_back(u.grid().G());
    Array out(shape);
    std::copy(u.values().begin(), u.values().end(), out.mutable_data());
    return out;
}

py::object optional_number(const std::optional<double>& v) {
    return v ? py::cast(*v) : py::none();
}

py::dict solve_report(const SolveReport& r) {
    py::dict d;
    d["grid"] = r.grid;
    d["nu"] = r.nu;
    d["residual"] = r.residual;
    d["dropped_mean"] = r.dropped_mean;
    d["dropped_mean_norm"] = r.dropped_mean_norm;
    d["truncated"] = r.truncated;
    d["nyquist_energy"] = r.nyquist_energy;
    d["min_abs_det"] = r.min_abs_det;
    return d;
}

py::dict trace_dict(const IterationTrace& t) {
    py::list records;
    for (const auto& r : t.records) {
        py::dict row;
        row["k"] = r.k;
        row["d"] = r.d;
        row["ratio"] = r.ratio;
        row["residual"] = r.residual;
        row["dropped_mean_norm"] = r.dropped_mean_norm;
        records.append(row);
    }
    py::dict d;
    d["records"] = records;
    d["K_theory"] = t.K_theory;
    d["nu_A"] = t.nu_A;
    d["nu_FA"] = t.nu_FA;
    d["nearness_declared"] = t.nearness_declared;
    d["converged"] = t.converged;
    d["iterations"] = t.iterations;
    d["warnings"] = t.warnings;
    return d;
}

NonlinearOperator from_callable(py::function fn, const ConstantTensor& anchor, std::optional<double> nearness,
                                std::string name) {
    NonlinearOperator::Options opts;
    opts.declared_nearness = nearness;
    opts.thread_safe = false;
    opts.name = std::move(name);
    const int N = anchor.N();
    auto shared = std::make_shared<py::function>(std::move(fn));
    return {[shared, N](const Vector& x, const Matrix& Q) {
                py::gil_scoped_acquire gil;
                Vector v = py::cast<Vector>((*shared)(x, Q));
                if (v.size() != N) throw EvaluationError("callable must return N values");
                return v;
            },
            anchor, opts};
}

}  // namespace

PYBIND11_MODULE(_ellsys, m) {
    m.doc() = "Spectral solvers for first-order elliptic systems on the periodic cell";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NonEllipticError>(m, "NonEllipticError", base.ptr());
    py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    py::register_exception<SizeCapError>(m, "SizeCapError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    py::class_<ConstantTensor>(m, "Tensor")
        .def(py::init([](int N, int n, std::vector<double> entries) {
                 return entries.empty() ? ConstantTensor(N, n) : ConstantTensor(N, n, std::move(entries));
             }),
             py::arg("N"), py::arg("n"), py::arg("entries") = std::vector<double>{})
        .def_property_readonly("N", &ConstantTensor::N)
        .def_property_readonly("n", &ConstantTensor::n)
        .def_property_readonly("entries",
                               [](const ConstantTensor& A) {
                                   return std::vector<double>(A.entries().begin(), A.entries().end());
                               })
        .def("__call__", &ConstantTensor::operator(), py::arg("alpha"), py::arg("beta"), py::arg("j"))
        .def("contract", [](const ConstantTensor& A, const Matrix& Q) { return contract(A, Q); })
        .def("direction_matrix", [](const ConstantTensor& A, const Vector& a) { return direction_matrix(A, a); })
        .def("operator_norm", [](const ConstantTensor& A) { return operator_norm(A); })
        .def("__repr__", [](const ConstantTensor& A) {
            return "<Tensor N=" + std::to_string(A.N()) + " n=" + std::to_string(A.n()) + ">";
        });

    py::class_<NonlinearOperator>(m, "Operator")
        .def_static("linear", &NonlinearOperator::linear, py::arg("A"), py::arg("name") = "linear")
        .def_static("from_callable", &from_callable, py::arg("fn"), py::arg("anchor"),
                    py::arg("declared_nearness") = py::none(), py::arg("name") = "python",
                    "Wraps fn(x, Q) -> R^N; evaluation holds the GIL and runs single-threaded.")
        .def("__call__", &NonlinearOperator::operator(), py::arg("x"), py::arg("Q"))
        .def_property_readonly("anchor", &NonlinearOperator::anchor)
        .def_property_readonly("anchor_nu", &NonlinearOperator::anchor_nu)
        .def_property_readonly("declared_nearness", &NonlinearOperator::declared_nearness)
        .def_property_readonly("name", &NonlinearOperator::name)
        .def_property_readonly("N", &NonlinearOperator::N)
        .def_property_readonly("n", &NonlinearOperator::n);

    m.def(
        "ellipticity",
        [](const ConstantTensor& A, int resolution) {
            const auto r = ellipticity_constant(A, resolution);
            py::dict d;
            d["nu"] = r.nu;
            d["argmin_direction"] = r.argmin_direction;
            d["min_abs_det"] = r.min_abs_det;
            d["resolution"] = r.resolution;
            d["refined"] = r.refined;
            d["elliptic"] = r.elliptic;
            return d;
        },
        py::arg("A"), py::arg("resolution") = kDefaultSphereResolution);
    m.def("brute_nu", &brute_nu, py::arg("A"), py::arg("samples") = 100000, py::arg("seed") = 0);
    m.def(
        "nearness",
        [](const NonlinearOperator& F, std::uint64_t seed) {
            NearnessSampler s;
            s.seed = seed;
            const auto r = nearness_constant(F, F.anchor(), s);
            py::dict d;
            d["nu_FA"] = r.nu_FA;
            d["nu_A"] = r.nu_A;
            d["ratio"] = r.ratio;
            d["samples_used"] = r.samples_used;
            return d;
        },
        py::arg("F"), py::arg("seed") = 0);

    m.def(
        "gradient", [](const Array& u, double L) { return to_array(gradient(to_field(u, L))); }, py::arg("u"),
        py::arg("L") = 1.0);
    m.def(
        "apply_operator",
        [](const ConstantTensor& A, const Array& u, double L) { return to_array(apply_operator(A, to_field(u, L))); },
        py::arg("A"), py::arg("u"), py::arg("L") = 1.0);
    m.def(
        "evaluate_operator",
        [](const NonlinearOperator& F, const Array& u, double L) {
            return to_array(evaluate_operator(F, to_field(u, L)));
        },
        py::arg("F"), py::arg("u"), py::arg("L") = 1.0);
    m.def(
        "norm_l2", [](const Array& u, double L) { return norm_l2(to_field(u, L)); }, py::arg("u"), py::arg("L") = 1.0);
    m.def(
        "random_band_limited",
        [](int n, int G, int components, int kmax, std::uint64_t seed, double L) {
            return to_array(random_band_limited(PeriodicGrid(n, G, L), components, kmax, seed));
        },
        py::arg("n"), py::arg("G"), py::arg("components"), py::arg("kmax"), py::arg("seed") = 0, py::arg("L") = 1.0);

    m.def(
        "solve_linear",
        [](const ConstantTensor& A, const Array& f, double L) {
            const GridFunction rhs = to_field(f, L);
            LinearSolution s;
            {
                py::gil_scoped_release nogil;
                s = solve_linear(A, rhs);
            }
            return py::make_tuple(to_array(s.u), solve_report(s.report));
        },
        py::arg("A"), py::arg("f"), py::arg("L") = 1.0,
        "Solves A:Du = f minus its mean; returns (u, report).");
    m.def(
        "solve_representation",
        [](const ConstantTensor& A, const Array& f, const std::string& kind, double mreg, double L) {
            const GridFunction rhs = to_field(f, L);
            const RegularizerSequence h(RegularizerSequence::parse_kind(kind), mreg);
            const auto s = solve_representation(A, rhs, h);
            py::dict d;
            d["kind"] = kind;
            d["m"] = s.report.m;
            d["z_min"] = s.report.z_min;
            d["max_factor_deviation"] = s.report.max_factor_deviation;
            d["error_bound"] = s.report.error_bound;
            d["solve"] = solve_report(s.report.solve);
            return py::make_tuple(to_array(s.u), d);
        },
        py::arg("A"), py::arg("f"), py::arg("kind") = "rational", py::arg("m") = 10.0, py::arg("L") = 1.0);
    m.def(
        "verify_apriori",
        [](const ConstantTensor& A, const Array& u, const Array& f, double L) {
            const auto r = verify_apriori(A, to_field(u, L), to_field(f, L));
            py::dict d;
            d["grad_norm"] = r.grad_norm;
            d["rhs_norm"] = r.rhs_norm;
            d["ratio_grad"] = r.ratio_grad;
            d["ratio_sobolev"] = optional_number(r.ratio_sobolev);
            return d;
        },
        py::arg("A"), py::arg("u"), py::arg("f"), py::arg("L") = 1.0);
    m.def(
        "solve_dense",
        [](const ConstantTensor& A, const Array& f, double L) -> py::object {
            const auto r = solve_dense(A, to_field(f, L));
            if (r.u) return to_array(*r.u);
            return py::none();
        },
        py::arg("A"), py::arg("f"), py::arg("L") = 1.0, "Dense LU reference solve; None if singular.");

    m.def(
        "campanato_solve",
        [](const NonlinearOperator& F, const Array& f, double tol, int max_iter, double L) {
            const GridFunction rhs = to_field(f, L);
            CampanatoOptions opts;
            opts.tol = tol;
            opts.max_iter = max_iter;
            CampanatoSolution s;
            {
                py::gil_scoped_release nogil;
                s = campanato_solve(F, rhs, opts);
            }
            py::dict t = trace_dict(s.trace);
            t["residual_abs"] = s.residual_abs;
            t["rhs_norm"] = s.rhs_norm;
            return py::make_tuple(to_array(s.u), t);
        },
        py::arg("F"), py::arg("f"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500, py::arg("L") = 1.0,
        "Fixed-point solve of F(x, Du) = f; returns (u, trace).");
    m.def(
        "verify_comparison",
        [](const NonlinearOperator& F, const Array& w, const Array& v, double L) {
            const auto r = verify_comparison(F, to_field(w, L), to_field(v, L));
            py::dict d;
            d["grad_diff"] = r.grad_diff;
            d["operator_diff"] = r.operator_diff;
            d["margin"] = r.margin;
            d["ratio"] = r.ratio;
            d["sobolev_ratio"] = optional_number(r.sobolev_ratio);
            d["holds"] = r.holds;
            return d;
        },
        py::arg("F"), py::arg("w"), py::arg("v"), py::arg("L") = 1.0);

    m.def(
        "write_efof", [](const std::string& path, const Array& u) { write_efof(path, to_field(u, 1.0)); },
        py::arg("path"), py::arg("u"));
    m.def(
        "read_efof", [](const std::string& path) { return to_array(read_efof(std::filesystem::path(path))); },
        py::arg("path"));

    auto cat = m.def_submodule("catalog", "Named tensors and operators");
    cat.def("cauchy_riemann", &catalog::cauchy_riemann);
    cat.def("dirac", &catalog::dirac);
    cat.def("generalized_cr", &catalog::generalized_cr, py::arg("kappa"), py::arg("lam"), py::arg("mu"),
            py::arg("nu"));
    cat.def(
        "lipschitz_perturbation",
        [](const ConstantTensor& A, double lambda, const std::string& shape) {
            return catalog::lipschitz_perturbation(A, lambda, catalog::parse_shape(shape));
        },
        py::arg("A"), py::arg("lam"), py::arg("shape") = "sin_q11");
    cat.def(
        "variable_linear", [](const ConstantTensor& A, double eps) { return catalog::variable_linear(A, eps); },
        py::arg("A"), py::arg("eps"));
    cat.def("names", &catalog::names);
    cat.def(
        "get",
        [](const std::string& spec) -> py::object {
            const auto e = catalog::get(spec);
            if (e.kind == catalog::Kind::constant_tensor) return py::cast(e.tensor());
            return py::cast(e.op());
        },
        py::arg("spec"), "Looks up 'name' or 'name(p1, ...)'; returns a Tensor or an Operator.");
    cat.def(
        "documented_nu", [](const std::string& spec) { return optional_number(catalog::get(spec).documented_nu); },
        py::arg("spec"));
}
