#include "petrovkit/functionals.hpp"
#include "petrovkit/errors.hpp"

#include <cmath>
#include <sstream>

namespace petrovkit {

bool SubdomainSpec::contained_in(const Rectangle& domain) const {
    const double margin = domain.boundary_distance(center);
    const double reach = (shape == SubdomainShape::Ball) ? sigma : 0.5 * sigma;
    // Grid coordinates carry rounding noise of order eps, so a subdomain that
    // touches the boundary exactly still counts as inside.
    return reach <= margin * (1.0 + 1e-12) + 1e-14;
}

Box SubdomainSpec::bounding_box() const {
    const double half = (shape == SubdomainShape::Ball) ? sigma : 0.5 * sigma;
    Box b;
    b.lo = center.array() - half;
    b.hi = center.array() + half;
    return b;
}

TestFunction TestFunction::quartic(double sigma) {
    if (!(sigma > 0.0)) throw config_error("TestFunction: sigma must be positive");
    return TestFunction{Kind::QuarticProduct, sigma, 0.0};
}

TestFunction TestFunction::weight_profile(double sigma, double profile_c) {
    if (!(sigma > 0.0) || !(profile_c > 0.0)) {
        throw config_error("TestFunction: sigma and profile shape must be positive");
    }
    return TestFunction{Kind::WeightProfile, sigma, profile_c};
}

int TestFunction::total_degree(int dim) const {
    return kind == Kind::QuarticProduct ? 2 * dim : 0;
}

double TestFunction::value(const Vec& x, const Vec& center) const {
    if (kind == Kind::QuarticProduct) {
        double v = 1.0;
        for (int a = 0; a < x.size(); ++a) {
            const double t = x[a] - center[a];
            if (std::abs(t) > 0.5 * sigma) return 0.0;
            v *= 1.0 - 4.0 * t * t / (sigma * sigma);
        }
        return v;
    }
    const WeightFunction profile(profile_c, sigma);
    return profile((x - center).norm());
}

Vec TestFunction::gradient(const Vec& x, const Vec& center) const {
    const int d = static_cast<int>(x.size());
    Vec g = Vec::Zero(d);
    if (kind == Kind::QuarticProduct) {
        Eigen::VectorXd factors(d);
        for (int a = 0; a < d; ++a) {
            const double t = x[a] - center[a];
            if (std::abs(t) > 0.5 * sigma) return Vec::Zero(d);
            factors[a] = 1.0 - 4.0 * t * t / (sigma * sigma);
        }
        for (int a = 0; a < d; ++a) {
            double v = -8.0 * (x[a] - center[a]) / (sigma * sigma);
            for (int b = 0; b < d; ++b) {
                if (b != a) v *= factors[b];
            }
            g[a] = v;
        }
        return g;
    }
    const WeightFunction profile(profile_c, sigma);
    const Vec diff = x - center;
    return profile.gradient_factor(diff.norm()) * diff;
}

FunctionalSpec FunctionalSpec::point_value(Vec y) {
    FunctionalSpec s;
    s.kind = FunctionalKind::PointValue;
    s.y = std::move(y);
    return s;
}

FunctionalSpec FunctionalSpec::derivative(Vec y, MultiIndex alpha) {
    FunctionalSpec s;
    s.kind = FunctionalKind::Derivative;
    s.y = std::move(y);
    s.alpha = std::move(alpha);
    return s;
}

FunctionalSpec FunctionalSpec::weak5(SubdomainSpec subdomain, QuadratureRule boundary_rule) {
    if (!boundary_rule.has_normals()) {
        throw config_error("FunctionalSpec::weak5: boundary rule must carry normals");
    }
    FunctionalSpec s;
    s.kind = FunctionalKind::Weak5;
    s.y = subdomain.center;
    s.subdomain = std::move(subdomain);
    s.boundary_rule = std::move(boundary_rule);
    return s;
}

FunctionalSpec FunctionalSpec::weak1(SubdomainSpec subdomain, TestFunction test_function,
                                     QuadratureRule interior_rule) {
    FunctionalSpec s;
    s.kind = FunctionalKind::Weak1;
    s.y = subdomain.center;
    s.subdomain = std::move(subdomain);
    s.test_function = test_function;
    s.interior_rule = std::move(interior_rule);
    return s;
}

std::string FunctionalSpec::id() const {
    switch (kind) {
        case FunctionalKind::PointValue: return "point_value";
        case FunctionalKind::Derivative: {
            std::ostringstream out;
            out << "derivative(";
            for (size_t a = 0; a < alpha.size(); ++a) out << (a ? "," : "") << alpha[a];
            out << ")";
            return out.str();
        }
        case FunctionalKind::Weak1: return "weak1";
        case FunctionalKind::Weak5: return "weak5";
    }
    return "unknown";
}

Eigen::VectorXd lambda_on_basis(const FunctionalSpec& spec, const MonomialBasis& basis) {
    const int d = basis.dim();
    const int q = basis.dimension();

    switch (spec.kind) {
        case FunctionalKind::PointValue:
            return basis.eval(spec.y);

        case FunctionalKind::Derivative:
            if (multi_index_order(spec.alpha) > basis.degree()) {
                throw config_error(
                    "lambda_on_basis: derivative order exceeds basis degree");
            }
            return basis.eval_derivative(spec.alpha, spec.y);

        case FunctionalKind::Weak5: {
            if (basis.degree() < 2) {
                throw config_error(
                    "weak-form functional with degree < 2 produces a zero row: the boundary "
                    "flux of every polynomial of degree <= 1 integrates to zero on a closed "
                    "subdomain boundary; use degree >= 2");
            }
            if (!spec.boundary_rule) {
                throw config_error("lambda_on_basis: Weak5 functional has no boundary rule");
            }
            const QuadratureRule& rule = *spec.boundary_rule;
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
            MultiIndex e(static_cast<size_t>(d), 0);
            for (int iq = 0; iq < rule.size(); ++iq) {
                const Vec x = rule.points.row(iq).transpose();
                for (int a = 0; a < d; ++a) {
                    const double na = rule.normals(iq, a);
                    if (na == 0.0) continue;
                    e[static_cast<size_t>(a)] = 1;
                    acc += (rule.weights[iq] * na) * basis.eval_derivative(e, x);
                    e[static_cast<size_t>(a)] = 0;
                }
            }
            return acc;
        }

        case FunctionalKind::Weak1: {
            if (basis.degree() < 2) {
                throw config_error(
                    "weak-form functional with degree < 2 produces a zero row: the weighted "
                    "gradient integral of every polynomial of degree <= 1 vanishes against a "
                    "test function that is zero on the subdomain boundary; use degree >= 2");
            }
            if (!spec.interior_rule || !spec.test_function || !spec.subdomain) {
                throw config_error(
                    "lambda_on_basis: Weak1 functional needs a subdomain, a test function "
                    "and an interior rule");
            }
            const QuadratureRule& rule = *spec.interior_rule;
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(q);
            MultiIndex e(static_cast<size_t>(d), 0);
            for (int iq = 0; iq < rule.size(); ++iq) {
                const Vec x = rule.points.row(iq).transpose();
                const Vec gv = spec.test_function->gradient(x, spec.subdomain->center);
                for (int a = 0; a < d; ++a) {
                    if (gv[a] == 0.0) continue;
                    e[static_cast<size_t>(a)] = 1;
                    acc -= (rule.weights[iq] * gv[a]) * basis.eval_derivative(e, x);
                    e[static_cast<size_t>(a)] = 0;
                }
            }
            return acc;
        }
    }
    throw std::logic_error("lambda_on_basis: unreachable");
}

double rhs_value(const FunctionalSpec& spec, const ProblemFields& fields,
                 const QuadratureRule& rhs_rule) {
    switch (spec.kind) {
        case FunctionalKind::PointValue:
            return fields.u_D(spec.y);

        case FunctionalKind::Derivative:
            return fields.f(spec.y);

        case FunctionalKind::Weak5: {
            double acc = 0.0;
            for (int iq = 0; iq < rhs_rule.size(); ++iq) {
                acc += rhs_rule.weights[iq] * fields.f(rhs_rule.points.row(iq).transpose());
            }
            return acc;
        }

        case FunctionalKind::Weak1: {
            if (!spec.test_function || !spec.subdomain) {
                throw config_error("rhs_value: Weak1 functional needs a subdomain and test function");
            }
            double acc = 0.0;
            for (int iq = 0; iq < rhs_rule.size(); ++iq) {
                const Vec x = rhs_rule.points.row(iq).transpose();
                acc += rhs_rule.weights[iq] * fields.f(x) *
                       spec.test_function->value(x, spec.subdomain->center);
            }
            return acc;
        }
    }
    throw std::logic_error("rhs_value: unreachable");
}

int weak5_edge_points(int degree) {
    return std::max(1, (degree + 1) / 2); // ceil(m/2)
}

int weak1_axis_points(int degree, int test_function_degree) {
    const int num = (degree - 1) * (test_function_degree - 1) + 1;
    return std::max(1, (num + 1) / 2); // ceil(num/2)
}

QuadratureRule subdomain_boundary_rule(const SubdomainSpec& sub, int n) {
    if (sub.shape == SubdomainShape::Square) {
        return rectangle_boundary(n, sub.bounding_box());
    }
    return circle_boundary(std::max(4, n), sub.center, sub.sigma);
}

QuadratureRule subdomain_interior_rule(const SubdomainSpec& sub, int n, int n_angular) {
    if (sub.shape == SubdomainShape::Square) {
        return tensor_rectangle(n, sub.bounding_box());
    }
    return disk(n, n_angular > 0 ? n_angular : std::max(4, n), sub.center, sub.sigma);
}

} // namespace petrovkit
