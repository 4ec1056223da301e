#pragma once

#include "petrovkit/geometry.hpp"

#include <Eigen/Dense>

namespace petrovkit {

// Point rule for a region of R^d or for a (d-1)-dimensional boundary. For
// boundary rules every point carries an outward unit normal. `measure` is the
// analytic length/area of the region and equals the weight sum.
struct QuadratureRule {
    Eigen::MatrixXd points;  // Npts x d
    Eigen::VectorXd weights; // Npts
    Eigen::MatrixXd normals; // Npts x d for boundary rules, 0 x 0 otherwise
    double measure = 0.0;

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    bool has_normals() const { return normals.rows() == points.rows(); }
};

// n-point Gauss-Legendre rule on [-1, 1], 1 <= n <= 64. Nodes are found by
// Newton iteration on the Legendre recurrence to a residual of 1e-15; the
// rule integrates polynomials of degree <= 2n - 1 exactly.
QuadratureRule gauss_legendre(int n);

// Tensor-product Gauss-Legendre rule over an axis-aligned box, with
// points_per_axis[a] points along axis a.
QuadratureRule tensor_rectangle(const std::vector<int>& points_per_axis, const Box& box);
QuadratureRule tensor_rectangle(int points_per_axis, const Box& box);

// Gauss-Legendre rule on each of the four edges of a rectangle (d = 2 only),
// every point carrying the outward normal of its edge.
QuadratureRule rectangle_boundary(int points_per_edge, const Box& box);

// n equally spaced points on a circle (trapezoid rule in angle, exact for
// trigonometric polynomials of degree < n), weight 2*pi*r/n each, radial
// outward normals. Requires n >= 4.
QuadratureRule circle_boundary(int n, const Eigen::VectorXd& center, double radius);

// Polar tensor rule over a disk: mapped Gauss-Legendre in radius including
// the Jacobian r, trapezoid in angle.
QuadratureRule disk(int n_radial, int n_angular, const Eigen::VectorXd& center, double radius);

} // namespace petrovkit
