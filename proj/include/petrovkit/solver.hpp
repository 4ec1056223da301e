#pragma once

#include "petrovkit/functionals.hpp"
#include "petrovkit/geometry.hpp"
#include "petrovkit/gmls.hpp"

#include <string>
#include <vector>

namespace petrovkit {

// The implemented Poisson discretizations. The direct methods build one
// recovery stencil per matrix row; the classical mlpg5 reference integrates
// moving-least-squares shape gradients and therefore builds one stencil per
// quadrature point, which is where its assembly cost comes from.
enum class Method { DMLPG1, DMLPG2, DMLPG5, MLPG5 };

std::string method_name(Method method);
Method parse_method(const std::string& name);

// Point counts for the attached quadrature; 0 picks the method defaults:
//   boundary: ceil(m/2) per edge for direct weak rows on squares, 10 per edge
//             for the classical reference on squares, 20 angular on balls;
//   interior: the exact count for grad p . grad v on squares, 20 per polar
//             direction on balls;
//   rhs:      10 per axis on squares, 20 per polar direction on balls.
struct QuadratureSettings {
    int boundary_points = 0;
    int interior_points = 0;
    int rhs_points = 0;
};

// A Poisson problem instance: lap u = f on the domain with Dirichlet (and,
// for collocation, Neumann) boundary data collocated at boundary nodes.
struct DiscreteProblem {
    Rectangle domain;
    NodeSet nodes;
    Method method = Method::DMLPG5;
    int degree = 2;
    double c0 = 0.6;          // weight shape factor, c = c0 * h
    double delta0 = 4.0;      // support factor, delta = delta0 * h
    double sigma0 = 0.0;      // subdomain size factor; 0 = default per shape
    SubdomainShape shape = SubdomainShape::Ball;
    QuadratureSettings quadrature;
    ProblemFields fields;
    bool oversample = false;  // add cell-midpoint test rows (least squares)
    int workers = 0;          // 0 = hardware concurrency, capped by PETROVKIT_THREADS

    double effective_sigma0() const;
};

struct SparseRow {
    std::vector<int> nodes;
    std::vector<double> values;
};

// Row-major sparse system; possibly rectangular when oversampling adds rows.
struct SparseSystem {
    int rows = 0;
    int cols = 0;
    std::vector<SparseRow> matrix;
    Eigen::VectorXd rhs;
};

struct Solution {
    Eigen::VectorXd values;
    double residual = 0.0;
    double assembly_seconds = 0.0;
    double solve_seconds = 0.0;
};

// Assemble the discrete system. Row k belongs to node k (Dirichlet rows are
// unit rows); oversampling appends midpoint rows after the node rows. Rows
// are computed independently, so any worker count yields the same bits.
SparseSystem assemble(const DiscreteProblem& problem);

// Solve the assembled system: sparse LU up to 5000 unknowns, then BiCGSTAB
// with diagonal preconditioning (tolerance 1e-10, at most 10*N iterations);
// rectangular systems go through a sparse least-squares factorization.
Eigen::VectorXd solve_linear(const SparseSystem& system, double* residual_out = nullptr);

// Assemble, solve, and time both phases.
Solution solve_problem(const DiscreteProblem& problem);

// Moving-least-squares evaluation of a nodal field at an arbitrary point.
double evaluate_solution(const NodeSet& nodes, const Eigen::VectorXd& nodal_values,
                         const Vec& x, int degree, const WeightFunction& weight);

// Plain-text export: "row col value" triplets and one rhs entry per line.
void export_system(const SparseSystem& system, const std::string& matrix_path,
                   const std::string& rhs_path);

// Worker count resolution: `requested` (or the hardware count when 0), capped
// by the PETROVKIT_THREADS environment variable when set.
int resolve_workers(int requested);

} // namespace petrovkit
