#pragma once

#include <stdexcept>
#include <string>

namespace petrovkit {

// Bad run configuration: non-divisible grid spacing, invalid method/degree
// combination, subdomain not contained in the domain, malformed config file.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A stencil cannot support the requested polynomial reproduction: too few
// neighbors inside the support radius, or degenerate node geometry.
class unisolvency_error : public std::runtime_error {
public:
    explicit unisolvency_error(const std::string& what) : std::runtime_error(what) {}
};

// Linear algebra failure: singular factorization, residual above tolerance,
// or a Krylov iteration that did not converge.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace petrovkit
