#include "petrovkit/errors.hpp"
#include "petrovkit/gmls.hpp"
#include "petrovkit/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace petrovkit;

namespace {

Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

NodeSet cloud(std::initializer_list<std::pair<double, double>> pts, double spacing) {
    Eigen::MatrixXd m(static_cast<int>(pts.size()), 2);
    int i = 0;
    for (const auto& [x, y] : pts) {
        m(i, 0) = x;
        m(i, 1) = y;
        ++i;
    }
    std::vector<int> tags(pts.size(), kInterior);
    return NodeSet(std::move(m), std::move(tags), spacing);
}

double exactness_defect(const Stencil& stencil, const CoefficientRow& row, const Vec& lambda_p) {
    double worst = 0.0;
    for (int k = 0; k < stencil.basis.dimension(); ++k) {
        double sum = 0.0;
        for (int j = 0; j < row.coefficients.size(); ++j) {
            sum += row.coefficients[j] * stencil.P(k, j);
        }
        worst = std::max(worst, std::abs(sum - lambda_p[k]) / (1.0 + std::abs(lambda_p[k])));
    }
    return worst;
}

} // namespace

TEST_CASE("truncated Gaussian weight: endpoints, frozen value, monotonicity") {
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    CHECK(w.c == doctest::Approx(0.06).epsilon(1e-15));
    CHECK(w.delta == doctest::Approx(0.4).epsilon(1e-15));

    CHECK(w(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w(w.delta) == 0.0);
    CHECK(w(w.delta + 0.05) == 0.0);

    // Frozen high-precision evaluation of the closed form at r = 0.2.
    CHECK(w(0.2) == doctest::Approx(1.4945338524781395669e-05).epsilon(1e-13));

    double prev = w(0.0);
    for (int i = 1; i <= 400; ++i) {
        const double cur = w(0.4 * i / 400.0);
        CHECK(cur <= prev + 1e-18);
        prev = cur;
    }
}

TEST_CASE("weight refuses non-positive shape or support") {
    CHECK_THROWS_AS(WeightFunction(0.0, 0.4), config_error);
    CHECK_THROWS_AS(WeightFunction(0.06, 0.0), config_error);
    CHECK_THROWS_AS(WeightFunction(-0.06, 0.4), config_error);
}

TEST_CASE("weight derivative matches finite differences and the gradient factor") {
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    for (double r : {0.03, 0.1, 0.17, 0.25, 0.33}) {
        const double fd =
            oracles::central_difference([&](double t) { return w(t); }, r, 1e-7);
        CHECK(w.radial_derivative(r) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(w.gradient_factor(r) * r == doctest::Approx(w.radial_derivative(r)).epsilon(1e-12));
    }
    CHECK(std::isfinite(w.gradient_factor(0.0)));
}

TEST_CASE("degree-0 stencil: the Gram matrix is the weight sum") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.5, 0.5);
    const WeightFunction w = WeightFunction::scaled(0.6, 3.0, 0.1);
    const Stencil stencil = build_stencil(nodes, y, MonomialBasis(0, 2, y, 0.1), w);
    REQUIRE(stencil.gram.rows() == 1);
    CHECK(stencil.gram(0, 0) == doctest::Approx(stencil.weights.sum()).epsilon(1e-14));
    CHECK(stencil.weights.minCoeff() > 0.0);
}

TEST_CASE("stencil neighbor selection equals a linear scan over positive weights") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.5, 0.4);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    const Stencil stencil = build_stencil(nodes, y, MonomialBasis(2, 2, y, 0.1), w);

    std::vector<int> scan;
    for (int i = 0; i < nodes.size(); ++i) {
        if (w((nodes.point(i) - y).norm()) > 0.0) scan.push_back(i);
    }
    REQUIRE(stencil.neighbors == scan);
    for (int j = 0; j < stencil.num_nodes(); ++j) {
        const double r = (nodes.point(stencil.neighbors[j]) - y).norm();
        CHECK(stencil.weights[j] == doctest::Approx(w(r)).epsilon(1e-15));
        CHECK(r < w.delta);
    }
}

TEST_CASE("too few neighbors for the basis dimension raises the unisolvency error") {
    // delta = 0.12 on an h = 0.1 grid captures the center plus the four axis
    // neighbors: 5 nodes, but quadratic recovery needs Q = 6.
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.5, 0.5);
    const WeightFunction w(0.06, 0.12);
    CHECK_THROWS_AS(build_stencil(nodes, y, MonomialBasis(2, 2, y, 0.1), w), unisolvency_error);
    try {
        build_stencil(nodes, y, MonomialBasis(2, 2, y, 0.1), w);
    } catch (const unisolvency_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find('5') != std::string::npos);
        CHECK(msg.find('6') != std::string::npos);
    }
}

TEST_CASE("degenerate collinear geometry raises the unisolvency error") {
    const NodeSet line = cloud({{0.0, 0.5},
                                {0.1, 0.5},
                                {0.2, 0.5},
                                {0.3, 0.5},
                                {0.4, 0.5},
                                {0.5, 0.5},
                                {0.6, 0.5},
                                {0.7, 0.5}},
                               0.1);
    const Vec y = vec2(0.35, 0.5);
    const WeightFunction w(0.06, 10.0);
    CHECK_THROWS_AS(build_stencil(line, y, MonomialBasis(2, 2, y, 0.1), w), unisolvency_error);
}

TEST_CASE("point-value functional at the shift point reproduces polynomials") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.47, 0.53);
    const MonomialBasis basis(2, 2, y, 0.1);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    const Stencil stencil = build_stencil(nodes, y, basis, w);

    Vec lambda_p = Vec::Zero(basis.dimension());
    lambda_p[0] = 1.0; // p_1 == 1 at the shift point, the others vanish there
    const CoefficientRow row = solve_coefficients(stencil, lambda_p, "value");
    CHECK(exactness_defect(stencil, row, lambda_p) <= 1e-10);

    // Applied to data sampled from a random quadratic, the row returns its
    // value at y.
    Vec coeffs(basis.dimension());
    for (int k = 0; k < coeffs.size(); ++k) coeffs[k] = oracles::uniform(-2.0, 2.0);
    Eigen::VectorXd data = Eigen::VectorXd::Zero(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) data[i] = basis.eval(nodes.point(i)).dot(coeffs);
    CHECK(row.apply(data) == doctest::Approx(basis.eval(y).dot(coeffs)).epsilon(1e-10));
}

TEST_CASE("interpolation case: N_loc == Q makes the row independent of the weights") {
    // Six unisolvent nodes for quadratic recovery; the exactness constraints
    // alone determine the coefficients.
    const NodeSet six = cloud(
        {{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}, {0.2, 0.0}, {0.1, 0.1}, {0.0, 0.2}}, 0.1);
    const Vec y = vec2(0.07, 0.06);
    const MonomialBasis basis(2, 2, y, 0.1);

    Vec lambda_p(basis.dimension());
    for (int k = 0; k < lambda_p.size(); ++k) lambda_p[k] = oracles::uniform(-1.0, 1.0);

    const Stencil narrow =
        build_stencil(six, y, basis, WeightFunction::scaled(0.6, 5.0, 0.1));
    const Stencil wide = build_stencil(six, y, basis, WeightFunction::scaled(1.2, 8.0, 0.1));
    REQUIRE(narrow.num_nodes() == basis.dimension());
    REQUIRE(wide.num_nodes() == basis.dimension());

    const CoefficientRow a = solve_coefficients(narrow, lambda_p);
    const CoefficientRow b = solve_coefficients(wide, lambda_p);
    CHECK(exactness_defect(narrow, a, lambda_p) <= 1e-10);
    for (int j = 0; j < a.coefficients.size(); ++j) {
        CHECK(a.coefficients[j] == doctest::Approx(b.coefficients[j]).epsilon(1e-8));
    }
}

TEST_CASE("Laplacian recovery on a 3x3 stencil is the classical 5-point formula") {
    // delta = 1.415 h barely admits the corner nodes, whose weights are tiny;
    // the minimum-weighted-norm row is then the 5-point Laplacian up to a
    // small corner leakage.
    const double h = 0.1;
    const NodeSet nodes = generate_grid(unit_square(), h);
    const Vec y = vec2(0.5, 0.5);
    const MonomialBasis basis(2, 2, y, h);
    const WeightFunction w(0.6 * h, 1.415 * h);
    const Stencil stencil = build_stencil(nodes, y, basis, w);
    REQUIRE(stencil.num_nodes() == 9);

    Vec lambda_p = Vec::Zero(basis.dimension());
    lambda_p[basis.index_of({2, 0})] = basis.eval_derivative({2, 0}, y)[basis.index_of({2, 0})];
    lambda_p[basis.index_of({0, 2})] = basis.eval_derivative({0, 2}, y)[basis.index_of({0, 2})];
    REQUIRE(lambda_p[basis.index_of({2, 0})] == doctest::Approx(2.0 / (h * h)));
    const CoefficientRow row = solve_coefficients(stencil, lambda_p, "laplacian");

    // Ground truth from the dense long-double KKT solve of the same problem.
    const Eigen::VectorXd kkt =
        oracles::kkt_coefficients(stencil.P, stencil.weights, lambda_p);
    const double scale = kkt.cwiseAbs().maxCoeff();
    for (int j = 0; j < row.coefficients.size(); ++j) {
        CHECK(std::abs(row.coefficients[j] - kkt[j]) <= 1e-9 * scale);
    }

    const double unit = 1.0 / (h * h);
    for (int j = 0; j < stencil.num_nodes(); ++j) {
        const Vec x = nodes.point(stencil.neighbors[j]);
        const double r = (x - y).norm();
        const double a = row.coefficients[j];
        if (r < 0.5 * h) {
            CHECK(a == doctest::Approx(-4.0 * unit).epsilon(0.01));
        } else if (r < 1.2 * h) {
            CHECK(a == doctest::Approx(unit).epsilon(0.01));
        } else {
            CHECK(std::abs(a) <= 0.01 * unit); // corner leakage
        }
    }
}

TEST_CASE("derivative rows: point value and first derivative are exact on their targets") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.42, 0.58);
    const MonomialBasis basis(2, 2, y, 0.1);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);

    Eigen::VectorXd linear(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) linear[i] = nodes.point(i)[0];

    const CoefficientRow value = gmls_derivative_row(nodes, y, {0, 0}, basis, w);
    CHECK(value.apply(linear) == doctest::Approx(y[0]).epsilon(1e-10));

    const CoefficientRow dx = gmls_derivative_row(nodes, y, {1, 0}, basis, w);
    CHECK(dx.apply(linear) == doctest::Approx(1.0).epsilon(1e-10));

    Eigen::VectorXd quadratic(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) {
        const Vec x = nodes.point(i);
        quadratic[i] = 3.0 * x[0] * x[0] - 2.0 * x[0] * x[1] + x[1];
    }
    CHECK(dx.apply(quadratic) == doctest::Approx(6.0 * y[0] - 2.0 * y[1]).epsilon(1e-9));
}

TEST_CASE("d/dx recovery of sin(x+y) converges at second order") {
    std::vector<double> errors;
    for (double h : {0.1, 0.05, 0.025}) {
        const NodeSet nodes = generate_grid(unit_square(), h);
        const WeightFunction w = WeightFunction::scaled(0.6, 4.0, h);
        Eigen::VectorXd data(nodes.size());
        for (int i = 0; i < nodes.size(); ++i) {
            const Vec x = nodes.point(i);
            data[i] = std::sin(x[0] + x[1]);
        }
        double worst = 0.0;
        for (int i = 0; i < nodes.size(); ++i) {
            if (!nodes.is_interior(i)) continue;
            const Vec y = nodes.point(i);
            const CoefficientRow row =
                gmls_derivative_row(nodes, y, {1, 0}, MonomialBasis(2, 2, y, h), w);
            worst = std::max(worst, std::abs(row.apply(data) - std::cos(y[0] + y[1])));
        }
        errors.push_back(worst);
    }
    CHECK(std::log2(errors[0] / errors[1]) >= 1.7);
    CHECK(std::log2(errors[1] / errors[2]) >= 1.7);
}

TEST_CASE("MLS shape functions: partition of unity and linear reproduction") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec x = vec2(oracles::uniform(0.05, 0.95), oracles::uniform(0.05, 0.95));
        const ShapeFunctionValues shapes = mls_shape_values(nodes, x, 2, 0.1, w);
        CHECK(shapes.values.sum() == doctest::Approx(1.0).epsilon(1e-12));
        Vec reproduced = Vec::Zero(2);
        for (int j = 0; j < shapes.stencil.num_nodes(); ++j) {
            reproduced += shapes.values[j] * nodes.point(shapes.stencil.neighbors[j]);
        }
        CHECK((reproduced - x).norm() <= 1e-12);
    }
}

TEST_CASE("MLS shape values match the brute-force weighted least-squares fit") {
    const NodeSet nodes = generate_grid(unit_square(), 0.2);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.2);
    const Vec x = vec2(0.4, 0.6); // a trial node of the coarse grid
    const ShapeFunctionValues shapes = mls_shape_values(nodes, x, 2, 0.2, w);
    const Stencil& st = shapes.stencil;

    const MonomialBasis basis(2, 2, x, 0.2);
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd data(st.num_nodes());
        for (int j = 0; j < st.num_nodes(); ++j) data[j] = oracles::uniform(-1.0, 1.0);
        const Eigen::VectorXd fit = oracles::wls_fit_coefficients(st.P, st.weights, data);
        const double direct = shapes.values.dot(data);
        const double oracle = basis.eval(x).dot(fit);
        CHECK(direct == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("MLS shape gradients: sum rules and finite-difference agreement") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec x = vec2(oracles::uniform(0.2, 0.8), oracles::uniform(0.2, 0.8));
        const ShapeFunctionValues shapes = mls_shape_values(nodes, x, 2, 0.1, w, true);
        REQUIRE(shapes.has_gradients);

        Vec grad_sum = Vec::Zero(2);
        Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
        for (int j = 0; j < shapes.stencil.num_nodes(); ++j) {
            const Vec g = shapes.gradients.row(j).transpose();
            grad_sum += g;
            jac += g * nodes.point(shapes.stencil.neighbors[j]).transpose();
        }
        CHECK(grad_sum.norm() <= 1e-10);
        CHECK((jac - Eigen::Matrix2d::Identity()).norm() <= 1e-9);

        // Central differences of the shape values along each axis.
        const double step = 1e-5 * 0.1;
        for (int axis = 0; axis < 2; ++axis) {
            Vec xp = x, xm = x;
            xp[axis] += step;
            xm[axis] -= step;
            const ShapeFunctionValues plus = mls_shape_values(nodes, xp, 2, 0.1, w);
            const ShapeFunctionValues minus = mls_shape_values(nodes, xm, 2, 0.1, w);
            REQUIRE(plus.stencil.neighbors == shapes.stencil.neighbors);
            REQUIRE(minus.stencil.neighbors == shapes.stencil.neighbors);
            for (int j = 0; j < shapes.stencil.num_nodes(); ++j) {
                const double fd = (plus.values[j] - minus.values[j]) / (2.0 * step);
                CHECK(std::abs(shapes.gradients(j, axis) - fd) <= 1e-5);
            }
        }
    }
}

TEST_CASE("exactness holds for random functionals on random stencils") {
    const NodeSet coarse = generate_grid(unit_square(), 0.1);
    const NodeSet fine = generate_grid(unit_square(), 0.05);
    for (int trial = 0; trial < 40; ++trial) {
        const NodeSet& nodes = (trial % 2 == 0) ? coarse : fine;
        const double h = nodes.spacing_hint();
        const int m = 2 + trial % 2;
        const Vec y = vec2(oracles::uniform(0.3, 0.7), oracles::uniform(0.3, 0.7));
        const MonomialBasis basis(m, 2, y, h);
        const Stencil stencil =
            build_stencil(nodes, y, basis, WeightFunction::scaled(0.6, 2.0 * m, h));

        Vec lambda_p(basis.dimension());
        for (int k = 0; k < lambda_p.size(); ++k) {
            lambda_p[k] = oracles::uniform(-1.0, 1.0) / (h * h);
        }
        const CoefficientRow row = solve_coefficients(stencil, lambda_p);
        CHECK(exactness_defect(stencil, row, lambda_p) <= 1e-10);
    }
}

TEST_CASE("coefficients agree with the dense KKT oracle on small stencils") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    // delta0 = 2.8 keeps every stencil at <= 26 nodes regardless of where the
    // test point falls between grid nodes.
    const WeightFunction w = WeightFunction::scaled(0.6, 2.8, 0.1);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec y = vec2(oracles::uniform(0.35, 0.65), oracles::uniform(0.35, 0.65));
        const MonomialBasis basis(2, 2, y, 0.1);
        const Stencil stencil = build_stencil(nodes, y, basis, w);
        REQUIRE(stencil.num_nodes() <= 30);

        Vec lambda_p(basis.dimension());
        for (int k = 0; k < lambda_p.size(); ++k) lambda_p[k] = oracles::uniform(-3.0, 3.0);
        const CoefficientRow row = solve_coefficients(stencil, lambda_p);
        const Eigen::VectorXd kkt =
            oracles::kkt_coefficients(stencil.P, stencil.weights, lambda_p);
        const double scale = std::max(1.0, kkt.cwiseAbs().maxCoeff());
        for (int j = 0; j < row.coefficients.size(); ++j) {
            CHECK(std::abs(row.coefficients[j] - kkt[j]) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("applying a row to sampled data evaluates the functional on the local fit") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const WeightFunction w = WeightFunction::scaled(0.6, 4.0, 0.1);
    const auto u = [](const Vec& x) { return std::sin(2.0 * x[0]) * std::cos(x[1]); };

    Eigen::VectorXd data(nodes.size());
    for (int i = 0; i < nodes.size(); ++i) data[i] = u(nodes.point(i));

    for (int trial = 0; trial < 5; ++trial) {
        const Vec y = vec2(oracles::uniform(0.3, 0.7), oracles::uniform(0.3, 0.7));
        const MonomialBasis basis(2, 2, y, 0.1);
        const Stencil stencil = build_stencil(nodes, y, basis, w);

        Vec lambda_p(basis.dimension());
        for (int k = 0; k < lambda_p.size(); ++k) lambda_p[k] = oracles::uniform(-2.0, 2.0);
        const CoefficientRow row = solve_coefficients(stencil, lambda_p);

        Eigen::VectorXd local(stencil.num_nodes());
        for (int j = 0; j < stencil.num_nodes(); ++j) {
            local[j] = data[stencil.neighbors[j]];
        }
        const Eigen::VectorXd fit =
            oracles::wls_fit_coefficients(stencil.P, stencil.weights, local);
        const double via_fit = lambda_p.dot(fit); // lambda applied to the WLS fit
        CHECK(std::abs(row.apply(data) - via_fit) <= 1e-9 * (1.0 + std::abs(via_fit)));
    }
}

TEST_CASE("rows store only supported nodes and barely-larger supports coincide") {
    const NodeSet nodes = generate_grid(unit_square(), 0.1);
    const Vec y = vec2(0.5, 0.5);
    const MonomialBasis basis(2, 2, y, 0.1);
    // Node distances from y jump from 0.3162 to 0.3606; both supports trap
    // the same neighbor set and the truncation tail correction is ~1e-13.
    const WeightFunction wa(0.06, 0.33);
    const WeightFunction wb(0.06, 0.35);

    Vec lambda_p(basis.dimension());
    for (int k = 0; k < lambda_p.size(); ++k) lambda_p[k] = oracles::uniform(-1.0, 1.0);

    const Stencil sa = build_stencil(nodes, y, basis, wa);
    const Stencil sb = build_stencil(nodes, y, basis, wb);
    REQUIRE(sa.neighbors == sb.neighbors);
    for (int j = 0; j < sa.num_nodes(); ++j) {
        CHECK((nodes.point(sa.neighbors[j]) - y).norm() < wa.delta);
    }

    const CoefficientRow ra = solve_coefficients(sa, lambda_p);
    const CoefficientRow rb = solve_coefficients(sb, lambda_p);
    for (int j = 0; j < ra.coefficients.size(); ++j) {
        CHECK(ra.coefficients[j] == doctest::Approx(rb.coefficients[j]).epsilon(1e-10));
    }
}
