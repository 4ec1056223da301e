#include "petrovkit/basis.hpp"
#include "petrovkit/errors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace petrovkit {

int multi_index_order(const MultiIndex& alpha) {
    return std::accumulate(alpha.begin(), alpha.end(), 0);
}

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

namespace {

// Multi-indices of total degree t in descending lexicographic order: the
// first component runs from t down to 0, recursing on the remainder.
void append_degree(int t, int dim, MultiIndex& partial, std::vector<MultiIndex>& out) {
    if (dim == 1) {
        partial.push_back(t);
        out.push_back(partial);
        partial.pop_back();
        return;
    }
    for (int a = t; a >= 0; --a) {
        partial.push_back(a);
        append_degree(t - a, dim - 1, partial, out);
        partial.pop_back();
    }
}

} // namespace

MonomialBasis::MonomialBasis(int degree, int dim, Eigen::VectorXd shift, double scale)
    : degree_(degree), dim_(dim), shift_(std::move(shift)), scale_(scale) {
    if (degree_ < 0) throw config_error("MonomialBasis: degree must be nonnegative");
    if (dim_ < 1) throw config_error("MonomialBasis: dimension must be at least 1");
    if (shift_.size() != dim_) throw config_error("MonomialBasis: shift dimension mismatch");
    if (!(scale_ > 0.0)) throw config_error("MonomialBasis: scale must be positive");
    MultiIndex partial;
    for (int t = 0; t <= degree_; ++t) append_degree(t, dim_, partial, indices_);
}

int MonomialBasis::index_of(const MultiIndex& alpha) const {
    auto it = std::find(indices_.begin(), indices_.end(), alpha);
    return it == indices_.end() ? -1 : static_cast<int>(it - indices_.begin());
}

void MonomialBasis::scaled_powers(const Eigen::VectorXd& x, Eigen::MatrixXd& pow) const {
    pow.resize(dim_, degree_ + 1);
    for (int a = 0; a < dim_; ++a) {
        const double u = (x[a] - shift_[a]) / scale_;
        pow(a, 0) = 1.0;
        for (int k = 1; k <= degree_; ++k) pow(a, k) = pow(a, k - 1) * u;
    }
}

Eigen::VectorXd MonomialBasis::eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dimension());
    eval_into(x, out);
    return out;
}

void MonomialBasis::eval_into(const Eigen::VectorXd& x, Eigen::Ref<Eigen::VectorXd> out) const {
    if (x.size() != dim_) throw config_error("MonomialBasis::eval: point dimension mismatch");
    Eigen::MatrixXd pow;
    scaled_powers(x, pow);
    for (int k = 0; k < dimension(); ++k) {
        double v = 1.0;
        const MultiIndex& alpha = indices_[static_cast<size_t>(k)];
        for (int a = 0; a < dim_; ++a) v *= pow(a, alpha[static_cast<size_t>(a)]);
        out[k] = v;
    }
}

Eigen::VectorXd MonomialBasis::eval_derivative(const MultiIndex& beta, const Eigen::VectorXd& x) const {
    if (x.size() != dim_) {
        throw config_error("MonomialBasis::eval_derivative: point dimension mismatch");
    }
    if (static_cast<int>(beta.size()) != dim_) {
        throw config_error("MonomialBasis::eval_derivative: order dimension mismatch");
    }
    for (int b : beta) {
        if (b < 0) throw config_error("MonomialBasis::eval_derivative: negative order");
    }
    const int order = multi_index_order(beta);
    if (order > degree_ + 2) {
        throw config_error("MonomialBasis::eval_derivative: order exceeds degree + 2");
    }

    Eigen::MatrixXd pow;
    scaled_powers(x, pow);
    double scale_factor = 1.0;
    for (int k = 0; k < order; ++k) scale_factor /= scale_;

    Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
    for (int k = 0; k < dimension(); ++k) {
        const MultiIndex& alpha = indices_[static_cast<size_t>(k)];
        double v = scale_factor;
        bool vanished = false;
        for (int a = 0; a < dim_ && !vanished; ++a) {
            const int ai = alpha[static_cast<size_t>(a)];
            const int bi = beta[static_cast<size_t>(a)];
            if (ai < bi) {
                vanished = true;
                break;
            }
            // falling factorial alpha_i! / (alpha_i - beta_i)!
            for (int j = 0; j < bi; ++j) v *= static_cast<double>(ai - j);
            v *= pow(a, ai - bi);
        }
        out[k] = vanished ? 0.0 : v;
    }
    return out;
}

} // namespace petrovkit
