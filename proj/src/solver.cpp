#include "petrovkit/solver.hpp"
#include "petrovkit/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace petrovkit {

std::string method_name(Method method) {
    switch (method) {
        case Method::DMLPG1: return "dmlpg1";
        case Method::DMLPG2: return "dmlpg2";
        case Method::DMLPG5: return "dmlpg5";
        case Method::MLPG5: return "mlpg5";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "dmlpg1") return Method::DMLPG1;
    if (name == "dmlpg2") return Method::DMLPG2;
    if (name == "dmlpg5") return Method::DMLPG5;
    if (name == "mlpg5") return Method::MLPG5;
    throw config_error("unknown method '" + name + "' (expected dmlpg1, dmlpg2, dmlpg5 or mlpg5)");
}

double DiscreteProblem::effective_sigma0() const {
    if (sigma0 > 0.0) return sigma0;
    // Calibrated against the published Franke-function error tables: 0.7h ball
    // radius and 1.8h square side track them within ~25% at every level.
    return shape == SubdomainShape::Ball ? 0.7 : 1.8;
}

int resolve_workers(int requested) {
    int base = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (base < 1) base = 1;
    if (const char* env = std::getenv("PETROVKIT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) {
            throw config_error("PETROVKIT_THREADS must be a positive integer, got '" +
                               std::string(env) + "'");
        }
        base = std::min(base, static_cast<int>(cap));
    }
    return base;
}

namespace {

// Static-chunk parallel loop. Each index is processed exactly once by one
// worker and writes only its own slot, so results do not depend on the
// worker count. The first exception thrown by any worker is rethrown.
void parallel_for(int n, int workers, const std::function<void(int)>& body) {
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < workers; ++t) {
        const int begin = static_cast<int>(static_cast<long long>(n) * t / workers);
        const int end = static_cast<int>(static_cast<long long>(n) * (t + 1) / workers);
        pool.emplace_back([&, begin, end]() {
            try {
                for (int i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct ResolvedQuadrature {
    int boundary = 0; // per edge (squares) or angular (balls)
    int interior = 0; // per axis (squares) or per polar direction (balls)
    int rhs = 0;      // per axis (squares) or per polar direction (balls)
};

ResolvedQuadrature resolve_quadrature(const DiscreteProblem& p) {
    ResolvedQuadrature q;
    const bool square = p.shape == SubdomainShape::Square;
    if (p.quadrature.boundary_points > 0) {
        q.boundary = p.quadrature.boundary_points;
    } else if (square) {
        q.boundary = (p.method == Method::MLPG5) ? 10 : weak5_edge_points(p.degree);
    } else {
        q.boundary = 20;
    }
    if (p.quadrature.interior_points > 0) {
        q.interior = p.quadrature.interior_points;
    } else if (square) {
        q.interior = weak1_axis_points(p.degree, 2 * p.domain.dim());
    } else {
        q.interior = 20;
    }
    q.rhs = p.quadrature.rhs_points > 0 ? p.quadrature.rhs_points : (square ? 10 : 20);
    return q;
}

void check_method_degree(const DiscreteProblem& p) {
    if (p.degree < 1) throw config_error("degree must be at least 1");
    if (p.method == Method::MLPG5) return;
    if (p.degree < 2) {
        throw config_error(
            "degree 1 with " + method_name(p.method) +
            " produces all-zero interior rows: the recovered functional vanishes on every "
            "polynomial of degree <= 1 (weak boundary fluxes and Laplacians of linears are "
            "zero), so the discrete system is singular; use degree >= 2");
    }
}

// Interior test rows for the weak variants need their subdomain inside the
// domain; clipped subdomains are not supported.
void check_containment(const DiscreteProblem& p, const SubdomainSpec& sub) {
    if (!sub.contained_in(p.domain)) {
        std::ostringstream msg;
        msg << "subdomain of size sigma = " << sub.sigma << " centered at ("
            << sub.center.transpose() << ") reaches outside the domain; lower sigma0 (now "
            << p.effective_sigma0() << ") so local subdomains stay inside";
        throw config_error(msg.str());
    }
}

SubdomainSpec make_subdomain(const DiscreteProblem& p, const Vec& y) {
    return SubdomainSpec{p.shape, p.effective_sigma0() * p.nodes.spacing_hint(), y};
}

// Midpoint lattice for oversampled test rows: the centers of the grid cells.
std::vector<Vec> midpoint_lattice(const Rectangle& domain, double h) {
    const int d = domain.dim();
    std::vector<int> cells(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double side = domain.box.side(a);
        const int n = static_cast<int>(std::llround(side / h));
        if (n < 1 || std::abs(n * h - side) > 1e-12 * side) {
            throw config_error("oversampling requires a grid-aligned spacing hint");
        }
        cells[static_cast<size_t>(a)] = n;
    }
    std::vector<Vec> out;
    std::vector<int> c(static_cast<size_t>(d), 0);
    while (true) {
        Vec x(d);
        for (int a = 0; a < d; ++a) {
            x[a] = domain.box.lo[a] + (c[static_cast<size_t>(a)] + 0.5) * h;
        }
        out.push_back(std::move(x));
        int a = 0;
        while (a < d && ++c[static_cast<size_t>(a)] >= cells[static_cast<size_t>(a)]) {
            c[static_cast<size_t>(a)] = 0;
            ++a;
        }
        if (a == d) break;
    }
    return out;
}

// One interior row of a direct method: one stencil, the functional applied
// to the stencil basis, and a quadrature right-hand side.
void direct_interior_row(const DiscreteProblem& p, const ResolvedQuadrature& quad,
                         const WeightFunction& weight, const Vec& y, SparseRow& row,
                         double& rhs) {
    const double h = p.nodes.spacing_hint();
    const MonomialBasis basis(p.degree, p.nodes.dim(), y, h);

    if (p.method == Method::DMLPG2) {
        const Stencil stencil = build_stencil(p.nodes, y, basis, weight);
        Eigen::VectorXd lambda_p = Eigen::VectorXd::Zero(basis.dimension());
        MultiIndex second(static_cast<size_t>(p.nodes.dim()), 0);
        for (int a = 0; a < p.nodes.dim(); ++a) {
            second[static_cast<size_t>(a)] = 2;
            lambda_p += basis.eval_derivative(second, y);
            second[static_cast<size_t>(a)] = 0;
        }
        const CoefficientRow cr = solve_coefficients(stencil, lambda_p, "laplacian");
        row.nodes = cr.nodes;
        row.values.assign(cr.coefficients.data(), cr.coefficients.data() + cr.coefficients.size());
        rhs = p.fields.f(y);
        return;
    }

    const SubdomainSpec sub = make_subdomain(p, y);
    check_containment(p, sub);

    FunctionalSpec spec = [&] {
        if (p.method == Method::DMLPG5) {
            return FunctionalSpec::weak5(sub, subdomain_boundary_rule(sub, quad.boundary));
        }
        const TestFunction v = (p.shape == SubdomainShape::Square)
                                   ? TestFunction::quartic(sub.sigma)
                                   : TestFunction::weight_profile(sub.sigma, weight.c);
        return FunctionalSpec::weak1(sub, v, subdomain_interior_rule(sub, quad.interior));
    }();

    const Stencil stencil = build_stencil(p.nodes, y, basis, weight);
    const Eigen::VectorXd lambda_p = lambda_on_basis(spec, basis);
    const CoefficientRow cr = solve_coefficients(stencil, lambda_p, spec.id());
    row.nodes = cr.nodes;
    row.values.assign(cr.coefficients.data(), cr.coefficients.data() + cr.coefficients.size());
    rhs = rhs_value(spec, p.fields, subdomain_interior_rule(sub, quad.rhs));
}

// One interior row of the classical reference: integrate the moving shape
// function gradients over the subdomain boundary, one stencil per
// integration point.
void mlpg5_interior_row(const DiscreteProblem& p, const ResolvedQuadrature& quad,
                        const WeightFunction& weight, const Vec& y, SparseRow& row,
                        double& rhs) {
    const double h = p.nodes.spacing_hint();
    const SubdomainSpec sub = make_subdomain(p, y);
    check_containment(p, sub);
    const QuadratureRule boundary = subdomain_boundary_rule(sub, quad.boundary);

    std::map<int, double> acc; // ordered by node index for deterministic output
    for (int iq = 0; iq < boundary.size(); ++iq) {
        const Vec xq = boundary.points.row(iq).transpose();
        const ShapeFunctionValues shape =
            mls_shape_values(p.nodes, xq, p.degree, h, weight, /*with_gradients=*/true);
        const Vec n = boundary.normals.row(iq).transpose();
        const Eigen::VectorXd flux = shape.gradients * n; // grad phi_j . n per node
        const auto& neigh = shape.stencil.neighbors;
        for (size_t j = 0; j < neigh.size(); ++j) {
            acc[neigh[j]] += boundary.weights[iq] * flux[static_cast<Eigen::Index>(j)];
        }
    }

    double peak = 0.0;
    for (const auto& [node, value] : acc) peak = std::max(peak, std::abs(value));
    const double drop = 1e-14 * std::max(1.0, peak);
    for (const auto& [node, value] : acc) {
        if (std::abs(value) <= drop) continue;
        row.nodes.push_back(node);
        row.values.push_back(value);
    }

    FunctionalSpec spec = FunctionalSpec::weak5(sub, boundary);
    rhs = rhs_value(spec, p.fields, subdomain_interior_rule(sub, quad.rhs));
}

} // namespace

SparseSystem assemble(const DiscreteProblem& problem) {
    const NodeSet& nodes = problem.nodes;
    const int n = nodes.size();
    const double h = nodes.spacing_hint();
    check_method_degree(problem);
    if (problem.method != Method::DMLPG2 && nodes.dim() != 2) {
        throw config_error("weak-form methods are implemented for d = 2 domains");
    }
    if (problem.method != Method::DMLPG2 && problem.domain.has_neumann()) {
        throw config_error(
            "Neumann facets require the collocation method dmlpg2: weak rows at Neumann "
            "nodes would need boundary-clipped subdomains");
    }
    if (!problem.fields.f || !problem.fields.u_D) {
        throw config_error("assemble: problem fields f and u_D must be set");
    }

    const ResolvedQuadrature quad = resolve_quadrature(problem);
    const WeightFunction weight = WeightFunction::scaled(problem.c0, problem.delta0, h);

    std::vector<Vec> extra_rows;
    if (problem.oversample) extra_rows = midpoint_lattice(problem.domain, h);

    SparseSystem system;
    system.cols = n;
    system.rows = n + static_cast<int>(extra_rows.size());
    system.matrix.resize(static_cast<size_t>(system.rows));
    system.rhs.resize(system.rows);

    const int workers = resolve_workers(problem.workers);
    parallel_for(system.rows, workers, [&](int k) {
        SparseRow& row = system.matrix[static_cast<size_t>(k)];
        double rhs = 0.0;
        const bool is_extra = k >= n;
        const Vec y = is_extra ? extra_rows[static_cast<size_t>(k - n)] : nodes.point(k);

        if (!is_extra && !nodes.is_interior(k)) {
            const int facet = nodes.boundary_tag(k);
            const BoundaryKind kind = problem.domain.facet_kinds[static_cast<size_t>(facet)];
            if (kind == BoundaryKind::Dirichlet) {
                row.nodes = {k};
                row.values = {1.0};
                rhs = problem.fields.u_D(y);
            } else {
                // Collocated Neumann row: recover the outward normal derivative.
                if (!problem.fields.u_N) {
                    throw config_error("assemble: Neumann facet present but u_N is not set");
                }
                const MonomialBasis basis(problem.degree, nodes.dim(), y, h);
                const Stencil stencil = build_stencil(nodes, y, basis, weight);
                const Vec normal = problem.domain.facet_normal(facet);
                Eigen::VectorXd lambda_p = Eigen::VectorXd::Zero(basis.dimension());
                MultiIndex e(static_cast<size_t>(nodes.dim()), 0);
                for (int a = 0; a < nodes.dim(); ++a) {
                    if (normal[a] == 0.0) continue;
                    e[static_cast<size_t>(a)] = 1;
                    lambda_p += normal[a] * basis.eval_derivative(e, y);
                    e[static_cast<size_t>(a)] = 0;
                }
                const CoefficientRow cr = solve_coefficients(stencil, lambda_p, "normal_derivative");
                row.nodes = cr.nodes;
                row.values.assign(cr.coefficients.data(),
                                  cr.coefficients.data() + cr.coefficients.size());
                rhs = problem.fields.u_N(y);
            }
        } else if (problem.method == Method::MLPG5) {
            mlpg5_interior_row(problem, quad, weight, y, row, rhs);
        } else {
            direct_interior_row(problem, quad, weight, y, row, rhs);
        }
        system.rhs[k] = rhs;
    });
    return system;
}

namespace {

Eigen::SparseMatrix<double> to_sparse(const SparseSystem& system) {
    std::vector<Eigen::Triplet<double>> triplets;
    size_t nnz = 0;
    for (const auto& row : system.matrix) nnz += row.nodes.size();
    triplets.reserve(nnz);
    for (int i = 0; i < system.rows; ++i) {
        const SparseRow& row = system.matrix[static_cast<size_t>(i)];
        for (size_t j = 0; j < row.nodes.size(); ++j) {
            triplets.emplace_back(i, row.nodes[j], row.values[j]);
        }
    }
    Eigen::SparseMatrix<double> mat(system.rows, system.cols);
    mat.setFromTriplets(triplets.begin(), triplets.end());
    mat.makeCompressed();
    return mat;
}

} // namespace

Eigen::VectorXd solve_linear(const SparseSystem& system, double* residual_out) {
    if (system.rows < system.cols) {
        throw solver_error("solve_linear: underdetermined system");
    }
    const Eigen::SparseMatrix<double> a = to_sparse(system);
    const Eigen::VectorXd& b = system.rhs;
    Eigen::VectorXd x;
    double residual = 0.0;

    if (system.rows == system.cols) {
        if (system.cols <= 5000) {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
            lu.compute(a);
            if (lu.info() != Eigen::Success) {
                throw solver_error("solve_linear: sparse LU factorization failed (singular system?)");
            }
            x = lu.solve(b);
        } else {
            Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> krylov;
            krylov.setTolerance(1e-10);
            krylov.setMaxIterations(10 * static_cast<Eigen::Index>(system.cols));
            krylov.compute(a);
            x = krylov.solve(b);
            if (krylov.info() != Eigen::Success) {
                std::ostringstream msg;
                msg << "solve_linear: BiCGSTAB did not converge (error " << krylov.error()
                    << " after " << krylov.iterations() << " iterations)";
                throw solver_error(msg.str());
            }
        }
        residual = (a * x - b).norm();
        const double limit = (system.cols <= 5000 ? 1e-9 : 1e-8) * std::max(b.norm(), 1e-300);
        if (!(residual <= limit) || !x.allFinite()) {
            std::ostringstream msg;
            msg << "solve_linear: residual " << residual << " exceeds tolerance " << limit;
            throw solver_error(msg.str());
        }
    } else {
        // Overdetermined least squares via sparse QR.
        Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
        qr.compute(a);
        if (qr.info() != Eigen::Success) {
            throw solver_error("solve_linear: sparse QR factorization failed");
        }
        x = qr.solve(b);
        // For least squares the optimality test is on the normal equations.
        residual = (a.transpose() * (a * x - b)).norm();
        const double limit = 1e-9 * std::max((a.transpose() * b).norm(), 1e-300);
        if (!(residual <= limit) || !x.allFinite()) {
            std::ostringstream msg;
            msg << "solve_linear: least-squares optimality residual " << residual
                << " exceeds tolerance " << limit;
            throw solver_error(msg.str());
        }
    }
    if (residual_out) *residual_out = residual;
    return x;
}

Solution solve_problem(const DiscreteProblem& problem) {
    using clock = std::chrono::steady_clock;
    Solution sol;
    const auto t0 = clock::now();
    const SparseSystem system = assemble(problem);
    const auto t1 = clock::now();
    sol.values = solve_linear(system, &sol.residual);
    const auto t2 = clock::now();
    sol.assembly_seconds = std::chrono::duration<double>(t1 - t0).count();
    sol.solve_seconds = std::chrono::duration<double>(t2 - t1).count();
    return sol;
}

double evaluate_solution(const NodeSet& nodes, const Eigen::VectorXd& nodal_values,
                         const Vec& x, int degree, const WeightFunction& weight) {
    if (nodal_values.size() != nodes.size()) {
        throw config_error("evaluate_solution: nodal value count mismatch");
    }
    const ShapeFunctionValues shape =
        mls_shape_values(nodes, x, degree, nodes.spacing_hint(), weight);
    double acc = 0.0;
    for (size_t j = 0; j < shape.stencil.neighbors.size(); ++j) {
        acc += shape.values[static_cast<Eigen::Index>(j)] * nodal_values[shape.stencil.neighbors[j]];
    }
    return acc;
}

void export_system(const SparseSystem& system, const std::string& matrix_path,
                   const std::string& rhs_path) {
    std::ofstream mat(matrix_path);
    if (!mat) throw config_error("export_system: cannot open " + matrix_path);
    mat.precision(17);
    for (int i = 0; i < system.rows; ++i) {
        const SparseRow& row = system.matrix[static_cast<size_t>(i)];
        for (size_t j = 0; j < row.nodes.size(); ++j) {
            mat << i << ' ' << row.nodes[j] << ' ' << row.values[j] << '\n';
        }
    }
    std::ofstream rhs(rhs_path);
    if (!rhs) throw config_error("export_system: cannot open " + rhs_path);
    rhs.precision(17);
    for (int i = 0; i < system.rows; ++i) rhs << system.rhs[i] << '\n';
    if (!mat || !rhs) throw config_error("export_system: write failed");
}

} // namespace petrovkit
