#include "petrovkit/bench.hpp"
#include "petrovkit/errors.hpp"
#include "petrovkit/franke.hpp"
#include "petrovkit/gmls.hpp"
#include "petrovkit/quadrature.hpp"
#include "petrovkit/run_config.hpp"
#include "petrovkit/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace petrovkit;

namespace {

using ScalarField = std::function<double(const Vec&)>;

BenchParams params_from(double c0, double delta0, double sigma0, const std::string& shape,
                        int boundary_points, int interior_points, int rhs_points,
                        bool oversample, int workers) {
    BenchParams params;
    params.c0 = c0;
    params.delta0 = delta0;
    params.sigma0 = sigma0;
    if (!shape.empty()) {
        if (shape == "ball") {
            params.shape = SubdomainShape::Ball;
        } else if (shape == "square") {
            params.shape = SubdomainShape::Square;
        } else {
            throw config_error("unknown subdomain shape '" + shape + "' (expected ball or square)");
        }
    }
    params.quadrature.boundary_points = boundary_points;
    params.quadrature.interior_points = interior_points;
    params.quadrature.rhs_points = rhs_points;
    params.oversample = oversample;
    params.workers = workers;
    return params;
}

py::dict solution_dict(const DiscreteProblem& p, const Solution& sol, const ScalarField& exact) {
    double max_error = 0.0;
    const bool have_exact = static_cast<bool>(exact);
    if (have_exact) {
        for (int i = 0; i < p.nodes.size(); ++i) {
            max_error = std::max(max_error, std::abs(sol.values[i] - exact(p.nodes.point(i))));
        }
    }
    py::dict out;
    out["nodes"] = p.nodes.points();
    std::vector<int> tags(p.nodes.size());
    for (int i = 0; i < p.nodes.size(); ++i) tags[i] = p.nodes.boundary_tag(i);
    out["boundary_tags"] = tags;
    out["values"] = sol.values;
    out["residual"] = sol.residual;
    out["assembly_seconds"] = sol.assembly_seconds;
    out["solve_seconds"] = sol.solve_seconds;
    if (have_exact) {
        out["max_error"] = max_error;
    } else {
        out["max_error"] = py::none();
    }
    out["method"] = method_name(p.method);
    out["degree"] = p.degree;
    out["c0"] = p.c0;
    out["delta0"] = p.delta0;
    out["sigma0"] = p.effective_sigma0();
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Meshless Poisson solvers built on generalized moving least squares";

    py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<unisolvency_error>(m, "UnisolvencyError", PyExc_RuntimeError);
    py::register_exception<solver_error>(m, "SolverError", PyExc_RuntimeError);

    // ---- geometry ----
    py::class_<Rectangle>(m, "Rectangle")
        .def(py::init<Vec, Vec>(), py::arg("lo"), py::arg("hi"))
        .def_property_readonly("dim", &Rectangle::dim)
        .def("boundary_distance", &Rectangle::boundary_distance, py::arg("x"));
    m.def("unit_square", &unit_square);

    py::class_<NodeSet>(m, "NodeSet")
        .def(py::init<Eigen::MatrixXd, std::vector<int>, double>(), py::arg("points"),
             py::arg("boundary_tags"), py::arg("spacing_hint"))
        .def_property_readonly("size", &NodeSet::size)
        .def_property_readonly("dim", &NodeSet::dim)
        .def_property_readonly("spacing_hint", &NodeSet::spacing_hint)
        .def_property_readonly("points", &NodeSet::points,
                               py::return_value_policy::reference_internal)
        .def("boundary_tag", &NodeSet::boundary_tag, py::arg("i"))
        .def("is_interior", &NodeSet::is_interior, py::arg("i"))
        .def("count_boundary", &NodeSet::count_boundary)
        .def("radius_query", &NodeSet::radius_query, py::arg("center"), py::arg("radius"))
        .def("nearest_distance", &NodeSet::nearest_distance, py::arg("x"));

    m.def("generate_grid", &generate_grid, py::arg("domain"), py::arg("h"));
    m.def("tag_boundary", &tag_boundary, py::arg("points"), py::arg("domain"));
    m.def("fill_distance", &fill_distance, py::arg("nodes"), py::arg("domain"),
          py::arg("probe_density") = 4);
    m.def("separation_distance", &separation_distance, py::arg("nodes"));
    m.def("save_nodes", &save_nodes, py::arg("nodes"), py::arg("path"));
    m.def("load_nodes", &load_nodes, py::arg("path"), py::arg("spacing_hint") = 0.0);

    // ---- basis ----
    py::class_<MonomialBasis>(m, "MonomialBasis")
        .def(py::init<int, int, Eigen::VectorXd, double>(), py::arg("degree"), py::arg("dim"),
             py::arg("shift"), py::arg("scale"))
        .def_property_readonly("degree", &MonomialBasis::degree)
        .def_property_readonly("dim", &MonomialBasis::dim)
        .def_property_readonly("dimension", &MonomialBasis::dimension)
        .def_property_readonly("indices", &MonomialBasis::indices)
        .def("index_of", &MonomialBasis::index_of, py::arg("alpha"))
        .def("eval", &MonomialBasis::eval, py::arg("x"))
        .def("eval_derivative", &MonomialBasis::eval_derivative, py::arg("beta"), py::arg("x"));

    // ---- quadrature ----
    py::class_<QuadratureRule>(m, "QuadratureRule")
        .def_readonly("points", &QuadratureRule::points)
        .def_readonly("weights", &QuadratureRule::weights)
        .def_readonly("normals", &QuadratureRule::normals)
        .def_readonly("measure", &QuadratureRule::measure)
        .def_property_readonly("size", &QuadratureRule::size)
        .def("has_normals", &QuadratureRule::has_normals);

    m.def("gauss_legendre", &gauss_legendre, py::arg("n"));
    m.def("tensor_rectangle",
          py::overload_cast<int, const Box&>(&tensor_rectangle), py::arg("points_per_axis"),
          py::arg("box"));
    m.def("rectangle_boundary", &rectangle_boundary, py::arg("points_per_edge"), py::arg("box"));
    m.def("circle_boundary", &circle_boundary, py::arg("n"), py::arg("center"), py::arg("radius"));
    m.def("disk", &disk, py::arg("n_radial"), py::arg("n_angular"), py::arg("center"),
          py::arg("radius"));
    py::class_<Box>(m, "Box")
        .def(py::init([](Vec lo, Vec hi) { return Box{std::move(lo), std::move(hi)}; }),
             py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &Box::lo)
        .def_readonly("hi", &Box::hi);

    // ---- gmls ----
    py::class_<WeightFunction>(m, "WeightFunction")
        .def(py::init<double, double>(), py::arg("c"), py::arg("delta"))
        .def_static("scaled", &WeightFunction::scaled, py::arg("c0"), py::arg("delta0"),
                    py::arg("h"))
        .def_readonly("c", &WeightFunction::c)
        .def_readonly("delta", &WeightFunction::delta)
        .def("__call__", &WeightFunction::operator(), py::arg("r"))
        .def("radial_derivative", &WeightFunction::radial_derivative, py::arg("r"))
        .def("gradient_factor", &WeightFunction::gradient_factor, py::arg("r"));

    py::class_<CoefficientRow>(m, "CoefficientRow")
        .def_readonly("nodes", &CoefficientRow::nodes)
        .def_readonly("coefficients", &CoefficientRow::coefficients)
        .def_readonly("functional", &CoefficientRow::functional)
        .def("apply", &CoefficientRow::apply, py::arg("nodal_values"));

    m.def("gmls_derivative_row", &gmls_derivative_row, py::arg("nodes"), py::arg("y"),
          py::arg("alpha"), py::arg("basis"), py::arg("weight"),
          "Recovery coefficients for D^alpha u(y) from nodal values.");

    py::class_<ShapeFunctionValues>(m, "ShapeFunctionValues")
        .def_property_readonly("neighbors",
                               [](const ShapeFunctionValues& s) { return s.stencil.neighbors; })
        .def_readonly("values", &ShapeFunctionValues::values)
        .def_readonly("gradients", &ShapeFunctionValues::gradients)
        .def_readonly("has_gradients", &ShapeFunctionValues::has_gradients);

    m.def("mls_shape_values", &mls_shape_values, py::arg("nodes"), py::arg("x"),
          py::arg("degree"), py::arg("scale"), py::arg("weight"),
          py::arg("with_gradients") = false,
          "Classical moving least squares shape function values (and gradients) at x.");

    m.def("evaluate_solution", &evaluate_solution, py::arg("nodes"), py::arg("nodal_values"),
          py::arg("x"), py::arg("degree"), py::arg("weight"));

    // ---- manufactured solution ----
    m.def("franke", &franke, py::arg("x"));
    m.def("franke_dx", &franke_dx, py::arg("x"));
    m.def("franke_dy", &franke_dy, py::arg("x"));
    m.def("franke_laplacian", &franke_laplacian, py::arg("x"));

    // ---- solver ----
    m.def(
        "solve_franke",
        [](const std::string& method, int degree, double h, double c0, double delta0,
           double sigma0, const std::string& shape, int boundary_points, int interior_points,
           int rhs_points, bool oversample, int workers) {
            const BenchParams params =
                params_from(c0, delta0, sigma0, shape, boundary_points, interior_points,
                            rhs_points, oversample, workers);
            const TestCase test = franke_case();
            const DiscreteProblem p = make_problem(parse_method(method), degree, h,
                                                   unit_square(), params, test);
            Solution sol;
            {
                py::gil_scoped_release release;
                sol = solve_problem(p);
            }
            return solution_dict(p, sol, test.exact);
        },
        py::arg("method") = "dmlpg5", py::arg("degree") = 2, py::arg("h") = 0.1,
        py::arg("c0") = 0.0, py::arg("delta0") = 0.0, py::arg("sigma0") = 0.0,
        py::arg("shape") = "", py::arg("boundary_points") = 0, py::arg("interior_points") = 0,
        py::arg("rhs_points") = 0, py::arg("oversample") = false, py::arg("workers") = 0,
        "Solve the Franke-function Poisson benchmark on a unit-square grid.");

    m.def(
        "solve_poisson",
        [](const ScalarField& f, const ScalarField& u_D, const std::optional<ScalarField>& exact,
           const std::string& method, int degree, double h, double c0, double delta0,
           double sigma0, const std::string& shape, int boundary_points, int interior_points,
           int rhs_points, bool oversample, int workers) {
            const BenchParams params =
                params_from(c0, delta0, sigma0, shape, boundary_points, interior_points,
                            rhs_points, oversample, workers);
            TestCase test;
            test.fields.f = f;
            test.fields.u_D = u_D;
            if (exact) test.exact = *exact;
            const DiscreteProblem p = make_problem(parse_method(method), degree, h,
                                                   unit_square(), params, test);
            Solution sol;
            {
                // Assembly workers call back into python for f and u_D; each
                // call re-acquires the interpreter lock on its own.
                py::gil_scoped_release release;
                sol = solve_problem(p);
            }
            return solution_dict(p, sol, exact ? *exact : ScalarField{});
        },
        py::arg("f"), py::arg("u_D"), py::arg("exact") = py::none(),
        py::arg("method") = "dmlpg5", py::arg("degree") = 2, py::arg("h") = 0.1,
        py::arg("c0") = 0.0, py::arg("delta0") = 0.0, py::arg("sigma0") = 0.0,
        py::arg("shape") = "", py::arg("boundary_points") = 0, py::arg("interior_points") = 0,
        py::arg("rhs_points") = 0, py::arg("oversample") = false, py::arg("workers") = 0,
        "Solve lap u = f on the unit square with Dirichlet data u_D collocated "
        "at boundary nodes.");
}
