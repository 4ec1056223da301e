#include "petrovkit/basis.hpp"
#include "petrovkit/errors.hpp"
#include "petrovkit/quadrature.hpp"

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

double integrate(const QuadratureRule& rule, const std::function<double(const Vec&)>& f) {
    double sum = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
        sum += rule.weights[i] * f(rule.points.row(i).transpose());
    }
    return sum;
}

} // namespace

TEST_CASE("one- and two-point Gauss-Legendre rules have the classical closed forms") {
    const QuadratureRule g1 = gauss_legendre(1);
    REQUIRE(g1.size() == 1);
    CHECK(g1.points(0, 0) == 0.0);
    CHECK(g1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

    const QuadratureRule g2 = gauss_legendre(2);
    REQUIRE(g2.size() == 2);
    CHECK(g2.points(0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(g2.points(1, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("rule sizes outside [1, 64] are refused") {
    CHECK_THROWS_AS(gauss_legendre(0), config_error);
    CHECK_THROWS_AS(gauss_legendre(65), config_error);
    CHECK_NOTHROW(gauss_legendre(64));
}

TEST_CASE("20-point rule: x^39 is integrated exactly, x^40 matches the frozen value") {
    const QuadratureRule g = gauss_legendre(20);
    long double odd = 0.0L, even = 0.0L, mass = 0.0L;
    for (int i = 0; i < g.size(); ++i) {
        const long double x = g.points(i, 0);
        odd += g.weights[i] * std::pow(x, 39);
        even += g.weights[i] * std::pow(x, 40);
        mass += g.weights[i];
    }
    CHECK(std::abs(static_cast<double>(odd)) <= 1e-13);
    CHECK(static_cast<double>(mass) == doctest::Approx(2.0).epsilon(1e-15));
    // High-precision evaluation of this exact rule applied to x^40; the true
    // integral 2/41 differs in the 12th digit, which the rule cannot see.
    CHECK(static_cast<double>(even) == doctest::Approx(0.04878048780205541654711).epsilon(1e-13));
    CHECK(static_cast<double>(even) != doctest::Approx(2.0 / 41.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre exactness up to degree 2n-1 for random polynomials") {
    for (int n : {3, 5, 8, 13}) {
        const QuadratureRule g = gauss_legendre(n);
        // Random polynomial of degree 2n-1 with known antiderivative.
        std::vector<double> coeffs(2 * n);
        for (auto& c : coeffs) c = oracles::uniform(-1.0, 1.0);
        long double quad = 0.0L;
        for (int i = 0; i < g.size(); ++i) {
            long double value = 0.0L, power = 1.0L;
            for (const double c : coeffs) {
                value += c * power;
                power *= g.points(i, 0);
            }
            quad += g.weights[i] * value;
        }
        long double exact = 0.0L;
        for (size_t k = 0; k < coeffs.size(); ++k) {
            if (k % 2 == 0) exact += 2.0L * coeffs[k] / static_cast<long double>(k + 1);
        }
        CHECK(static_cast<double>(quad) ==
              doctest::Approx(static_cast<double>(exact)).epsilon(1e-13));
    }
}

TEST_CASE("tensor rules integrate separable polynomials over boxes") {
    Box square;
    square.lo = vec2(-1.0, -1.0);
    square.hi = vec2(1.0, 1.0);

    SUBCASE("measure of a side-s square") {
        Box b;
        b.lo = vec2(0.2, 0.4);
        b.hi = vec2(0.5, 0.7);
        const QuadratureRule rule = tensor_rectangle(3, b);
        CHECK(rule.weights.sum() == doctest::Approx(0.09).epsilon(1e-12));
        CHECK(rule.measure == doctest::Approx(0.09).epsilon(1e-12));
    }

    SUBCASE("x^2 y^2 over [-1,1]^2 with 2 points per axis") {
        const QuadratureRule rule = tensor_rectangle(2, square);
        const double got = integrate(rule, [](const Vec& p) { return p[0] * p[0] * p[1] * p[1]; });
        CHECK(got == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    }

    SUBCASE("random degree-6 tensor polynomial with 4 points per axis") {
        double cx[7], cy[7];
        for (int k = 0; k <= 6; ++k) {
            cx[k] = oracles::uniform(-1.0, 1.0);
            cy[k] = oracles::uniform(-1.0, 1.0);
        }
        const auto poly1 = [](const double* c, double t) {
            double v = 0.0, p = 1.0;
            for (int k = 0; k <= 6; ++k) {
                v += c[k] * p;
                p *= t;
            }
            return v;
        };
        const QuadratureRule rule = tensor_rectangle(4, square);
        const double got = integrate(
            rule, [&](const Vec& p) { return poly1(cx, p[0]) * poly1(cy, p[1]); });
        // Antiderivative factorizes: only even powers survive on [-1, 1].
        const auto exact1 = [](const double* c) {
            double v = 0.0;
            for (int k = 0; k <= 6; k += 2) v += 2.0 * c[k] / (k + 1);
            return v;
        };
        CHECK(got == doctest::Approx(exact1(cx) * exact1(cy)).epsilon(1e-12));
    }

    SUBCASE("per-axis counts may differ") {
        const QuadratureRule rule = tensor_rectangle(std::vector<int>{2, 5}, square);
        CHECK(rule.size() == 10);
        const double got =
            integrate(rule, [](const Vec& p) { return p[0] * p[0] * std::pow(p[1], 8); });
        CHECK(got == doctest::Approx(2.0 / 3.0 * 2.0 / 9.0).epsilon(1e-13));
    }
}

TEST_CASE("rectangle boundary rules carry outward normals and exact moments") {
    const Vec z = vec2(0.4, 0.6);
    const double s = 0.12;
    Box square;
    square.lo = (z.array() - s / 2.0).matrix();
    square.hi = (z.array() + s / 2.0).matrix();

    SUBCASE("perimeter") {
        const QuadratureRule rule = rectangle_boundary(3, square);
        CHECK(rule.weights.sum() == doctest::Approx(4.0 * s).epsilon(1e-13));
        CHECK(rule.has_normals());
    }

    SUBCASE("closed-surface normal integral vanishes") {
        const QuadratureRule rule = rectangle_boundary(4, square);
        Vec total = Vec::Zero(2);
        for (int i = 0; i < rule.size(); ++i) {
            total += rule.weights[i] * rule.normals.row(i).transpose();
        }
        CHECK(total.norm() == doctest::Approx(0.0).epsilon(1e-14));
    }

    SUBCASE("normals are outward") {
        const QuadratureRule rule = rectangle_boundary(2, square);
        for (int i = 0; i < rule.size(); ++i) {
            const Vec x = rule.points.row(i).transpose();
            const Vec n = rule.normals.row(i).transpose();
            CHECK((x - z).dot(n) > 0.0);
            CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-15));
        }
    }

    SUBCASE("flux of grad((x-z)^2/h^2) through the square equals 2 s^2 / h^2") {
        const double h = 0.1;
        const QuadratureRule rule = rectangle_boundary(1, square);
        double flux = 0.0;
        for (int i = 0; i < rule.size(); ++i) {
            const Vec x = rule.points.row(i).transpose();
            const Vec grad = vec2(2.0 * (x[0] - z[0]) / (h * h), 0.0);
            flux += rule.weights[i] * grad.dot(rule.normals.row(i).transpose());
        }
        CHECK(flux == doctest::Approx(2.0 * s * s / (h * h)).epsilon(1e-13));
    }
}

TEST_CASE("circle boundary rules are trapezoidal in angle with radial normals") {
    const Vec c = vec2(0.3, 0.7);
    const double r = 0.07;

    SUBCASE("circumference and minimum point count") {
        const QuadratureRule rule = circle_boundary(9, c, r);
        CHECK(rule.weights.sum() == doctest::Approx(2.0 * M_PI * r).epsilon(1e-13));
        CHECK_THROWS_AS(circle_boundary(3, c, r), config_error);
    }

    SUBCASE("closed-surface normal integral vanishes") {
        const QuadratureRule rule = circle_boundary(12, c, r);
        Vec total = Vec::Zero(2);
        for (int i = 0; i < rule.size(); ++i) {
            total += rule.weights[i] * rule.normals.row(i).transpose();
            const Vec x = rule.points.row(i).transpose();
            CHECK((x - c).norm() == doctest::Approx(r).epsilon(1e-14));
            CHECK(((x - c) / r - rule.normals.row(i).transpose()).norm() ==
                  doctest::Approx(0.0).epsilon(1e-13));
        }
        CHECK(total.norm() == doctest::Approx(0.0).epsilon(1e-13));
    }

    SUBCASE("flux of grad((x-c)^2/h^2) through the circle equals 2 pi r^2 / h^2") {
        const double h = 0.1;
        const QuadratureRule rule = circle_boundary(8, c, r);
        double flux = 0.0;
        for (int i = 0; i < rule.size(); ++i) {
            const Vec x = rule.points.row(i).transpose();
            flux += rule.weights[i] * 2.0 * (x[0] - c[0]) / (h * h) * rule.normals(i, 0);
        }
        CHECK(flux == doctest::Approx(2.0 * M_PI * r * r / (h * h)).epsilon(1e-13));
    }
}

TEST_CASE("disk rules integrate polar moments") {
    const Vec c = vec2(0.5, 0.5);

    SUBCASE("area") {
        const QuadratureRule rule = disk(4, 12, c, 0.3);
        CHECK(rule.weights.sum() == doctest::Approx(M_PI * 0.09).epsilon(1e-12));
    }

    SUBCASE("odd moment about the center vanishes") {
        const QuadratureRule rule = disk(5, 16, c, 0.2);
        const double got = integrate(rule, [&](const Vec& p) { return p[0] - c[0]; });
        CHECK(got == doctest::Approx(0.0).epsilon(1e-13));
    }

    SUBCASE("(x-c)^2 over the unit disk is pi/4") {
        const QuadratureRule rule = disk(4, 16, c, 1.0);
        const double got =
            integrate(rule, [&](const Vec& p) { return (p[0] - c[0]) * (p[0] - c[0]); });
        CHECK(got == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("all rules have positive weights summing to the region measure") {
    const Vec c = vec2(0.0, 0.0);
    Box b;
    b.lo = vec2(-0.5, -1.5);
    b.hi = vec2(2.5, 0.5);
    const QuadratureRule rules[] = {
        gauss_legendre(7),
        tensor_rectangle(3, b),
        rectangle_boundary(4, b),
        circle_boundary(10, c, 2.0),
        disk(3, 8, c, 1.5),
    };
    for (const QuadratureRule& rule : rules) {
        CHECK(rule.weights.minCoeff() > 0.0);
        CHECK(rule.weights.sum() == doctest::Approx(rule.measure).epsilon(1e-12));
    }
}

TEST_CASE("ceil(m/2) edge points integrate grad p . n exactly for every basis term") {
    // The flux integrand on an edge has per-axis degree at most m, handled by
    // ceil(m/2) Gauss points; compare against a dense 10-point rule.
    const Vec z = vec2(0.45, 0.55);
    const double h = 0.1;
    for (int m : {2, 3, 4}) {
        const MonomialBasis basis(m, 2, z, h);
        const double s = 1.8 * h;
        Box square;
        square.lo = (z.array() - s / 2.0).matrix();
        square.hi = (z.array() + s / 2.0).matrix();
        const QuadratureRule lean = rectangle_boundary((m + 1) / 2, square);
        const QuadratureRule dense = rectangle_boundary(10, square);

        for (int k = 0; k < basis.dimension(); ++k) {
            const auto flux = [&](const QuadratureRule& rule) {
                double total = 0.0;
                for (int i = 0; i < rule.size(); ++i) {
                    const Vec x = rule.points.row(i).transpose();
                    const Vec grad = vec2(basis.eval_derivative({1, 0}, x)[k],
                                          basis.eval_derivative({0, 1}, x)[k]);
                    total += rule.weights[i] * grad.dot(rule.normals.row(i).transpose());
                }
                return total;
            };
            const double a = flux(lean);
            const double b2 = flux(dense);
            CHECK(std::abs(a - b2) <= 1e-12 * std::max(1.0, std::abs(b2)));
        }
    }
}
