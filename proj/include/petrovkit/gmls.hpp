#pragma once

#include "petrovkit/basis.hpp"
#include "petrovkit/geometry.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace petrovkit {

// Truncated Gaussian weight
//   w(r) = (exp(-(r/c)^2) - exp(-(delta/c)^2)) / (1 - exp(-(delta/c)^2))
// for 0 <= r < delta and 0 beyond; continuous at the support radius. The
// shape c and support delta are set from the spacing h as c = c0*h and
// delta = delta0*h.
struct WeightFunction {
    double c;
    double delta;

    WeightFunction(double c_, double delta_);
    static WeightFunction scaled(double c0, double delta0, double h);

    double operator()(double r) const;
    // d/dr of the weight for 0 < r < delta (0 outside the open support).
    double radial_derivative(double r) const;
    // grad_x w(|x - xj|) = gradient_factor(r) * (x - xj); finite at r = 0.
    double gradient_factor(double r) const;

private:
    double cutoff_; // exp(-(delta/c)^2)
};

// Weighted local polynomial stencil around a center y: the neighbors inside
// the open support ball, the basis values P(k, j) = p_k(x_j), the weights
// w_j = w(|y - x_j|), and the factorized Gram matrix P W P^T.
struct Stencil {
    Vec center;
    std::vector<int> neighbors;       // ascending node indices, w_j > 0
    Eigen::MatrixXd P;                // Q x N_loc
    Eigen::VectorXd weights;          // N_loc
    Eigen::MatrixXd gram;             // Q x Q symmetric positive definite
    Eigen::LDLT<Eigen::MatrixXd> gram_ldlt;
    double condition = 0.0;           // spectral condition estimate of the Gram
    MonomialBasis basis;

    int num_nodes() const { return static_cast<int>(neighbors.size()); }
};

// One assembled matrix row: the recovery coefficients a*_j attached to their
// node indices, labeled by the functional that produced them.
struct CoefficientRow {
    std::vector<int> nodes;
    Eigen::VectorXd coefficients;
    std::string functional;

    // Apply the row to nodal data: sum_j a*_j u[nodes[j]].
    double apply(const Eigen::VectorXd& nodal_values) const;
};

// Collect neighbors of y, evaluate basis and weights, factorize the Gram.
// Throws unisolvency_error when fewer than Q = dim P_m^d nodes carry positive
// weight or when the Gram condition estimate exceeds 1e12.
Stencil build_stencil(const NodeSet& nodes, const Vec& y, const MonomialBasis& basis,
                      const WeightFunction& weight);

// Minimum-weighted-norm coefficients a* = W P^T (P W P^T)^{-1} lambda_p
// reproducing the functional exactly on the span of the basis.
CoefficientRow solve_coefficients(const Stencil& stencil, const Eigen::VectorXd& lambda_p,
                                  std::string functional_id = {});

// Row recovering D^alpha u(y) from nodal values, |alpha| <= basis degree.
CoefficientRow gmls_derivative_row(const NodeSet& nodes, const Vec& y, const MultiIndex& alpha,
                                   const MonomialBasis& basis, const WeightFunction& weight);

// Classical moving least squares shape functions at an evaluation point x:
//   phi(x)^T = p(x)^T (P W P^T)^{-1} P W
// with weights centered at x itself. Returns the stencil used together with
// the shape values so callers can map values to node indices.
struct ShapeFunctionValues {
    Stencil stencil;
    Eigen::VectorXd values;            // N_loc, sums to 1
    Eigen::MatrixXd gradients;         // N_loc x d, columns sum to 0 (optional)
    bool has_gradients = false;
};

ShapeFunctionValues mls_shape_values(const NodeSet& nodes, const Vec& x, int degree,
                                     double scale, const WeightFunction& weight,
                                     bool with_gradients = false);

} // namespace petrovkit
