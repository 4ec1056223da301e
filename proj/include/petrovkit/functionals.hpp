#pragma once

#include "petrovkit/basis.hpp"
#include "petrovkit/geometry.hpp"
#include "petrovkit/gmls.hpp"
#include "petrovkit/quadrature.hpp"

#include <functional>
#include <optional>

namespace petrovkit {

enum class SubdomainShape { Ball, Square };

// Local test subdomain centered at a node: a ball of radius sigma or an
// axis-aligned square (cube) of side sigma.
struct SubdomainSpec {
    SubdomainShape shape;
    double sigma;
    Vec center;

    // True when the subdomain lies inside the domain (balls need
    // sigma <= dist(center, boundary), squares sigma/2).
    bool contained_in(const Rectangle& domain) const;
    Box bounding_box() const;
};

// Local test function over a subdomain. The quartic product
//   v(x) = prod_i (1 - 4 (x_i - c_i)^2 / sigma^2)
// vanishes on the boundary of the square of side sigma; as a polynomial its
// per-axis degree is 2, so its total degree is 2*d. On balls the test
// function reuses the truncated Gaussian profile with support sigma.
struct TestFunction {
    enum class Kind { QuarticProduct, WeightProfile };

    Kind kind;
    double sigma;
    double profile_c = 0.0; // shape parameter of the Gaussian profile

    static TestFunction quartic(double sigma);
    static TestFunction weight_profile(double sigma, double profile_c);

    // Total polynomial degree in d dimensions; 0 for the non-polynomial profile.
    int total_degree(int dim) const;
    double value(const Vec& x, const Vec& center) const;
    Vec gradient(const Vec& x, const Vec& center) const;
};

// The recovery targets supported by the assembly:
//   PointValue            u(y)                       (Dirichlet collocation)
//   Derivative            D^alpha u(y)               (direct collocation rows)
//   Weak1                 -int grad u . grad v dx    (weak form, test function v)
//   Weak5                 oint grad u . n ds         (weak form, v == 1)
enum class FunctionalKind { PointValue, Derivative, Weak1, Weak5 };

struct FunctionalSpec {
    FunctionalKind kind;
    Vec y;                                   // test node
    MultiIndex alpha;                        // Derivative only
    std::optional<SubdomainSpec> subdomain;  // weak kinds
    std::optional<QuadratureRule> boundary_rule; // Weak5
    std::optional<QuadratureRule> interior_rule; // Weak1
    std::optional<TestFunction> test_function;   // Weak1

    static FunctionalSpec point_value(Vec y);
    static FunctionalSpec derivative(Vec y, MultiIndex alpha);
    static FunctionalSpec weak5(SubdomainSpec subdomain, QuadratureRule boundary_rule);
    static FunctionalSpec weak1(SubdomainSpec subdomain, TestFunction test_function,
                                QuadratureRule interior_rule);
    std::string id() const;
};

// Problem data for the Poisson equation  lap u = f,  u = u_D on Dirichlet
// facets,  du/dn = u_N on Neumann facets.
struct ProblemFields {
    std::function<double(const Vec&)> f;
    std::function<double(const Vec&)> u_D;
    std::function<double(const Vec&)> u_N;
};

// The vector (lambda(p_1), ..., lambda(p_Q)) for the given basis. Weak
// functionals with degree <= 1 are refused: their rows vanish identically on
// harmonic polynomials, so assembly would silently produce zero rows.
Eigen::VectorXd lambda_on_basis(const FunctionalSpec& spec, const MonomialBasis& basis);

// Right-hand side of the discrete equation for this functional. `rhs_rule`
// integrates over the subdomain for the weak kinds and is ignored otherwise.
double rhs_value(const FunctionalSpec& spec, const ProblemFields& fields,
                 const QuadratureRule& rhs_rule);

// Edge/axis point counts that integrate the weak functionals exactly:
// boundary integrands of degree <= m need ceil(m/2) Gauss points per edge,
// interior integrands of grad p . grad v need
// ceil(((m-1)*(n_v-1)+1)/2) points per axis for a test function of total
// polynomial degree n_v.
int weak5_edge_points(int degree);
int weak1_axis_points(int degree, int test_function_degree);

// Quadrature attached to a subdomain: boundary rule (points per edge for
// squares, angular count for balls) and interior rule (points per axis for
// squares; radial x angular for balls).
QuadratureRule subdomain_boundary_rule(const SubdomainSpec& sub, int n);
QuadratureRule subdomain_interior_rule(const SubdomainSpec& sub, int n, int n_angular = 0);

} // namespace petrovkit
