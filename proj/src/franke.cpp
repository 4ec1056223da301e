#include "petrovkit/franke.hpp"

#include <array>
#include <cmath>

namespace petrovkit {

namespace {

// One bump a * exp(-ax*(9x+bx)^2 - ay*(9y+by)^2) with its closed-form
// derivatives. Writing q for the exponent, dq/dx = -18*ax*(9x+bx) and
// d2q/dx2 = -162*ax, so du/dx = u*qx and lap u = u*(qx^2 + qy^2 + qxx + qyy).
struct Bump {
    double a, ax, bx, ay, by;

    double value(double x, double y) const {
        const double tx = 9.0 * x + bx, ty = 9.0 * y + by;
        return a * std::exp(-ax * tx * tx - ay * ty * ty);
    }
    double dx_(double x, double y) const {
        return value(x, y) * (-18.0 * ax * (9.0 * x + bx));
    }
    double dy_(double x, double y) const {
        return value(x, y) * (-18.0 * ay * (9.0 * y + by));
    }
    double laplacian(double x, double y) const {
        const double qx = -18.0 * ax * (9.0 * x + bx);
        const double qy = -18.0 * ay * (9.0 * y + by);
        return value(x, y) * (qx * qx + qy * qy - 162.0 * ax - 162.0 * ay);
    }
};

constexpr std::array<Bump, 4> kBumps = {{
    {0.75, 0.25, -2.0, 0.25, -2.0},
    {0.75, 1.0 / 49.0, 1.0, 0.1, 1.0},
    {0.5, 0.25, -7.0, 0.25, -3.0},
    {-0.2, 1.0, -4.0, 1.0, -7.0},
}};

} // namespace

double franke(const Vec& x) {
    double v = 0.0;
    for (const Bump& b : kBumps) v += b.value(x[0], x[1]);
    return v;
}

double franke_dx(const Vec& x) {
    double v = 0.0;
    for (const Bump& b : kBumps) v += b.dx_(x[0], x[1]);
    return v;
}

double franke_dy(const Vec& x) {
    double v = 0.0;
    for (const Bump& b : kBumps) v += b.dy_(x[0], x[1]);
    return v;
}

double franke_laplacian(const Vec& x) {
    double v = 0.0;
    for (const Bump& b : kBumps) v += b.laplacian(x[0], x[1]);
    return v;
}

ProblemFields franke_fields() {
    return ProblemFields{
        [](const Vec& x) { return franke_laplacian(x); },
        [](const Vec& x) { return franke(x); },
        [](const Vec&) { return 0.0; },
    };
}

} // namespace petrovkit
