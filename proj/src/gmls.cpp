#include "petrovkit/gmls.hpp"
#include "petrovkit/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace petrovkit {

WeightFunction::WeightFunction(double c_, double delta_) : c(c_), delta(delta_) {
    if (!(c > 0.0) || !(delta > 0.0)) {
        throw config_error("WeightFunction: shape and support must be positive");
    }
    cutoff_ = std::exp(-(delta / c) * (delta / c));
}

WeightFunction WeightFunction::scaled(double c0, double delta0, double h) {
    return WeightFunction(c0 * h, delta0 * h);
}

double WeightFunction::operator()(double r) const {
    if (r < 0.0) throw config_error("WeightFunction: negative radius");
    if (r >= delta) return 0.0;
    const double u = r / c;
    return (std::exp(-u * u) - cutoff_) / (1.0 - cutoff_);
}

double WeightFunction::radial_derivative(double r) const {
    if (r < 0.0) throw config_error("WeightFunction: negative radius");
    if (r >= delta) return 0.0;
    const double u = r / c;
    return -2.0 * r / (c * c) * std::exp(-u * u) / (1.0 - cutoff_);
}

double WeightFunction::gradient_factor(double r) const {
    if (r >= delta) return 0.0;
    const double u = r / c;
    return -2.0 / (c * c) * std::exp(-u * u) / (1.0 - cutoff_);
}

double CoefficientRow::apply(const Eigen::VectorXd& nodal_values) const {
    double acc = 0.0;
    for (size_t j = 0; j < nodes.size(); ++j) {
        acc += coefficients[static_cast<Eigen::Index>(j)] * nodal_values[nodes[j]];
    }
    return acc;
}

Stencil build_stencil(const NodeSet& nodes, const Vec& y, const MonomialBasis& basis,
                      const WeightFunction& weight) {
    if (y.size() != nodes.dim() || basis.dim() != nodes.dim()) {
        throw config_error("build_stencil: dimension mismatch");
    }
    const int q = basis.dimension();

    // Keep only nodes with strictly positive weight; a node exactly on the
    // support sphere has w = 0 and would contribute a vacuous zero column.
    std::vector<int> inside;
    std::vector<double> w;
    for (int j : nodes.radius_query(y, weight.delta)) {
        const double r = (nodes.point(j) - y).norm();
        const double wj = weight(r);
        if (wj > 0.0) {
            inside.push_back(j);
            w.push_back(wj);
        }
    }
    const int n_loc = static_cast<int>(inside.size());
    if (n_loc < q) {
        std::ostringstream msg;
        msg << "stencil at (" << y.transpose() << ") has " << n_loc
            << " nodes inside support " << weight.delta << " but needs at least " << q
            << " for degree " << basis.degree();
        throw unisolvency_error(msg.str());
    }

    Stencil s{Vec(), {}, {}, {}, {}, {}, 0.0, basis};
    s.center = y;
    s.neighbors = std::move(inside);
    s.weights = Eigen::Map<Eigen::VectorXd>(w.data(), n_loc);
    s.P.resize(q, n_loc);
    for (int j = 0; j < n_loc; ++j) {
        basis.eval_into(nodes.point(s.neighbors[static_cast<size_t>(j)]), s.P.col(j));
    }
    s.gram = s.P * s.weights.asDiagonal() * s.P.transpose();

    // Spectral condition estimate; the Gram is small (Q <= 21 for m <= 5,
    // d = 2), so an exact symmetric eigensolve is cheap and also certifies
    // positive definiteness.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    s.condition = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(s.condition <= 1e12)) {
        std::ostringstream msg;
        msg << "stencil at (" << y.transpose() << ") is numerically degenerate for degree "
            << basis.degree() << ": Gram condition estimate " << s.condition
            << " exceeds 1e12 (" << n_loc << " nodes, support " << weight.delta << ")";
        throw unisolvency_error(msg.str());
    }
    s.gram_ldlt.compute(s.gram);
    return s;
}

CoefficientRow solve_coefficients(const Stencil& stencil, const Eigen::VectorXd& lambda_p,
                                  std::string functional_id) {
    if (lambda_p.size() != stencil.basis.dimension()) {
        throw config_error("solve_coefficients: functional vector has wrong length");
    }
    CoefficientRow row;
    row.nodes = stencil.neighbors;
    row.functional = std::move(functional_id);
    const Eigen::VectorXd g = stencil.gram_ldlt.solve(lambda_p);
    row.coefficients = stencil.weights.asDiagonal() * (stencil.P.transpose() * g);
    return row;
}

CoefficientRow gmls_derivative_row(const NodeSet& nodes, const Vec& y, const MultiIndex& alpha,
                                   const MonomialBasis& basis, const WeightFunction& weight) {
    if (multi_index_order(alpha) > basis.degree()) {
        throw config_error(
            "gmls_derivative_row: derivative order exceeds basis degree");
    }
    const Stencil s = build_stencil(nodes, y, basis, weight);
    const Eigen::VectorXd lambda_p = basis.eval_derivative(alpha, y);
    std::ostringstream id;
    id << "derivative(";
    for (size_t a = 0; a < alpha.size(); ++a) id << (a ? "," : "") << alpha[a];
    id << ")";
    return solve_coefficients(s, lambda_p, id.str());
}

ShapeFunctionValues mls_shape_values(const NodeSet& nodes, const Vec& x, int degree,
                                     double scale, const WeightFunction& weight,
                                     bool with_gradients) {
    const int d = nodes.dim();
    // Shift the basis to the evaluation point: the shape values themselves are
    // basis-invariant, and this choice keeps the Gram well scaled.
    MonomialBasis basis(degree, d, x, scale);
    ShapeFunctionValues out{build_stencil(nodes, x, basis, weight), {}, {}, with_gradients};
    const Stencil& s = out.stencil;
    const int n_loc = s.num_nodes();

    const Eigen::VectorXd p_at_x = basis.eval(x); // = e_1 for a basis shifted at x
    const Eigen::VectorXd g = s.gram_ldlt.solve(p_at_x);
    out.values = s.weights.asDiagonal() * (s.P.transpose() * g);

    if (!with_gradients) return out;

    // Gradient by the product rule. With A(x) = P W(x) P^T and B(x) = P W(x):
    //   d(phi^T) = dp^T A^-1 B + p^T d(A^-1) B + p^T A^-1 dB,
    //   d(A^-1) = -A^-1 dA A^-1,
    // which collapses to  d(phi)_j = w_j (s_i . P_j) + dw_j (g . P_j)  with
    // s_i = A^-1 (dp_i - dA_i g).
    out.gradients.resize(n_loc, d);
    Eigen::VectorXd dw(n_loc);
    const Eigen::VectorXd proj = s.P.transpose() * g; // (g . P_j) per node
    for (int a = 0; a < d; ++a) {
        MultiIndex e(static_cast<size_t>(d), 0);
        e[static_cast<size_t>(a)] = 1;
        const Eigen::VectorXd dp = basis.eval_derivative(e, x);
        for (int j = 0; j < n_loc; ++j) {
            const Vec xj = nodes.point(s.neighbors[static_cast<size_t>(j)]);
            const double r = (x - xj).norm();
            dw[j] = weight.gradient_factor(r) * (x[a] - xj[a]);
        }
        const Eigen::MatrixXd dA = s.P * dw.asDiagonal() * s.P.transpose();
        const Eigen::VectorXd si = s.gram_ldlt.solve(dp - dA * g);
        out.gradients.col(a) =
            s.weights.asDiagonal() * (s.P.transpose() * si) + dw.asDiagonal() * proj;
    }
    return out;
}

} // namespace petrovkit
