#include "petrovkit/quadrature.hpp"
#include "petrovkit/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace petrovkit {

QuadratureRule gauss_legendre(int n) {
    if (n < 1 || n > 64) {
        throw config_error("gauss_legendre: point count must be in [1, 64]");
    }
    QuadratureRule rule;
    rule.points.resize(n, 1);
    rule.weights.resize(n);
    rule.measure = 2.0;

    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based starting guess for the i-th root of P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n(x) and P_n'(x) via the three-term recurrence.
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points(i, 0) = -x;
        rule.points(n - 1 - i, 0) = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points(half - 1, 0) = 0.0; // center the middle node exactly
    return rule;
}

QuadratureRule tensor_rectangle(const std::vector<int>& points_per_axis, const Box& box) {
    const int d = box.dim();
    if (static_cast<int>(points_per_axis.size()) != d) {
        throw config_error("tensor_rectangle: one point count per axis required");
    }
    std::vector<QuadratureRule> axis_rules;
    axis_rules.reserve(static_cast<size_t>(d));
    int total = 1;
    for (int a = 0; a < d; ++a) {
        axis_rules.push_back(gauss_legendre(points_per_axis[static_cast<size_t>(a)]));
        total *= axis_rules.back().size();
    }

    QuadratureRule rule;
    rule.points.resize(total, d);
    rule.weights.resize(total);
    rule.measure = 1.0;
    for (int a = 0; a < d; ++a) rule.measure *= box.side(a);

    std::vector<int> c(static_cast<size_t>(d), 0);
    int row = 0;
    while (true) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            const double t = axis_rules[static_cast<size_t>(a)].points(c[static_cast<size_t>(a)], 0);
            const double half = 0.5 * box.side(a);
            rule.points(row, a) = box.lo[a] + half * (t + 1.0);
            w *= half * axis_rules[static_cast<size_t>(a)].weights[c[static_cast<size_t>(a)]];
        }
        rule.weights[row++] = w;
        int a = 0;
        while (a < d && ++c[static_cast<size_t>(a)] >= axis_rules[static_cast<size_t>(a)].size()) {
            c[static_cast<size_t>(a)] = 0;
            ++a;
        }
        if (a == d) break;
    }
    return rule;
}

QuadratureRule tensor_rectangle(int points_per_axis, const Box& box) {
    return tensor_rectangle(std::vector<int>(static_cast<size_t>(box.dim()), points_per_axis), box);
}

QuadratureRule rectangle_boundary(int points_per_edge, const Box& box) {
    if (box.dim() != 2) {
        throw config_error("rectangle_boundary: implemented for d = 2 only");
    }
    const QuadratureRule line = gauss_legendre(points_per_edge);
    const int n = line.size();

    QuadratureRule rule;
    rule.points.resize(4 * n, 2);
    rule.weights.resize(4 * n);
    rule.normals.resize(4 * n, 2);
    rule.measure = 2.0 * (box.side(0) + box.side(1));

    int row = 0;
    // Facet order matches Rectangle: x-low, x-high, y-low, y-high.
    for (int f = 0; f < 4; ++f) {
        const int axis = f / 2;        // axis the facet is orthogonal to
        const int run = 1 - axis;      // axis the edge runs along
        const double fixed = (f % 2 == 0) ? box.lo[axis] : box.hi[axis];
        const double sign = (f % 2 == 0) ? -1.0 : 1.0;
        const double half = 0.5 * box.side(run);
        for (int i = 0; i < n; ++i, ++row) {
            rule.points(row, axis) = fixed;
            rule.points(row, run) = box.lo[run] + half * (line.points(i, 0) + 1.0);
            rule.weights[row] = half * line.weights[i];
            rule.normals(row, axis) = sign;
            rule.normals(row, run) = 0.0;
        }
    }
    return rule;
}

QuadratureRule circle_boundary(int n, const Eigen::VectorXd& center, double radius) {
    if (n < 4) throw config_error("circle_boundary: at least 4 points required");
    if (center.size() != 2) throw config_error("circle_boundary: center must be 2-d");
    if (!(radius > 0.0)) throw config_error("circle_boundary: radius must be positive");

    QuadratureRule rule;
    rule.points.resize(n, 2);
    rule.weights.resize(n);
    rule.normals.resize(n, 2);
    rule.measure = 2.0 * std::numbers::pi * radius;

    const double w = rule.measure / n;
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / n;
        const double cx = std::cos(theta), sx = std::sin(theta);
        rule.points(i, 0) = center[0] + radius * cx;
        rule.points(i, 1) = center[1] + radius * sx;
        rule.normals(i, 0) = cx;
        rule.normals(i, 1) = sx;
        rule.weights[i] = w;
    }
    return rule;
}

QuadratureRule disk(int n_radial, int n_angular, const Eigen::VectorXd& center, double radius) {
    if (n_angular < 4) throw config_error("disk: at least 4 angular points required");
    if (center.size() != 2) throw config_error("disk: center must be 2-d");
    if (!(radius > 0.0)) throw config_error("disk: radius must be positive");
    const QuadratureRule radial = gauss_legendre(n_radial);

    QuadratureRule rule;
    rule.points.resize(n_radial * n_angular, 2);
    rule.weights.resize(n_radial * n_angular);
    rule.measure = std::numbers::pi * radius * radius;

    const double dtheta = 2.0 * std::numbers::pi / n_angular;
    int row = 0;
    for (int i = 0; i < n_radial; ++i) {
        // Map [-1, 1] -> [0, radius]; the weight picks up the polar Jacobian r.
        const double r = 0.5 * radius * (radial.points(i, 0) + 1.0);
        const double wr = 0.5 * radius * radial.weights[i] * r;
        for (int j = 0; j < n_angular; ++j, ++row) {
            const double theta = dtheta * j;
            rule.points(row, 0) = center[0] + r * std::cos(theta);
            rule.points(row, 1) = center[1] + r * std::sin(theta);
            rule.weights[row] = wr * dtheta;
        }
    }
    return rule;
}

} // namespace petrovkit
