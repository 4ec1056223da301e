#pragma once

#include "petrovkit/functionals.hpp"
#include "petrovkit/geometry.hpp"

namespace petrovkit {

// Franke's function on the unit square, the standard scattered-data test
// surface: a sum of four Gaussian bumps
//   3/4 exp(-((9x-2)^2 + (9y-2)^2)/4) + 3/4 exp(-(9x+1)^2/49 - (9y+1)^2/10)
// + 1/2 exp(-((9x-7)^2 + (9y-3)^2)/4) - 1/5 exp(-(9x-4)^2 - (9y-7)^2).
double franke(const Vec& x);
double franke_dx(const Vec& x);
double franke_dy(const Vec& x);
double franke_laplacian(const Vec& x);

// Problem data for  lap u = f  with u = Franke's function: the source is the
// analytic Laplacian and the boundary data the function itself.
ProblemFields franke_fields();

} // namespace petrovkit
