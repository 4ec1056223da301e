#pragma once

#include <Eigen/Dense>
#include <vector>

namespace petrovkit {

using MultiIndex = std::vector<int>;

int multi_index_order(const MultiIndex& alpha);
int binomial(int n, int k);

// Shifted-scaled monomial basis of P_m^d:
//   p_alpha(x) = prod_i ((x_i - z_i) / s)^alpha_i,
// with the Q = C(m+d, d) multi-indices in graded lexicographic order: sorted
// by total degree first, then within each degree by descending exponent tuple.
// For d = 2, m = 2 the order is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
// The shift z is the local evaluation/test point and the scale s the spacing,
// which keeps entries O(1) on stencils of a few spacings.
class MonomialBasis {
public:
    MonomialBasis(int degree, int dim, Eigen::VectorXd shift, double scale);

    int degree() const { return degree_; }
    int dim() const { return dim_; }
    int dimension() const { return static_cast<int>(indices_.size()); } // Q
    const Eigen::VectorXd& shift() const { return shift_; }
    double scale() const { return scale_; }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    // Position of a multi-index in the ordering; -1 if |alpha| > m.
    int index_of(const MultiIndex& alpha) const;

    // Column vector (p_1(x), ..., p_Q(x)).
    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
    void eval_into(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) const;

    // Column vector of D^beta p_k(x); terms with alpha not componentwise >= beta
    // vanish, the rest scale by s^{-|beta|} * prod alpha_i!/(alpha_i-beta_i)!.
    // Orders up to |beta| <= m + 2 are accepted (beyond m the vector is zero).
    Eigen::VectorXd eval_derivative(const MultiIndex& beta, const Eigen::VectorXd& x) const;

private:
    int degree_;
    int dim_;
    Eigen::VectorXd shift_;
    double scale_;
    std::vector<MultiIndex> indices_;

    void scaled_powers(const Eigen::VectorXd& x, Eigen::MatrixXd& pow) const;
};

} // namespace petrovkit
