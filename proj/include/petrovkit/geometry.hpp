#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace petrovkit {

using Vec = Eigen::VectorXd;

// Axis-aligned box, the basic geometric primitive for domains and local
// quadrature regions.
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double side(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const Vec& x, double tol = 0.0) const;
};

enum class BoundaryKind { Dirichlet, Neumann };

// Rectangular domain with a boundary split into 2*d axis-aligned facets.
// Facet k covers { x : x[k/2] == (k%2 ? hi : lo)[k/2] }, i.e. facets come in
// (low side, high side) pairs per axis: 0 = x-low, 1 = x-high, 2 = y-low, ...
struct Rectangle {
    Box box;
    std::vector<BoundaryKind> facet_kinds; // size 2*d, all Dirichlet by default

    Rectangle() = default;
    Rectangle(Vec lo, Vec hi);

    int dim() const { return box.dim(); }
    int num_facets() const { return 2 * dim(); }
    // Distance from an interior point to the boundary (min margin over facets).
    double boundary_distance(const Vec& x) const;
    // Outward unit normal of facet k (axis-aligned).
    Vec facet_normal(int facet) const;
    bool has_neumann() const;
};

Rectangle unit_square();

// Boundary tag per node: -1 for interior, otherwise the facet id. Nodes on
// several facets (corners/edges) take the lowest matching facet id.
constexpr int kInterior = -1;

// Immutable node cloud with boundary tags and a uniform-bucket spatial index.
// The bucket cell size equals the spacing hint, so neighbor queries at radii
// of a few spacings touch a bounded number of cells.
class NodeSet {
public:
    NodeSet(Eigen::MatrixXd points, std::vector<int> boundary_tags,
            double spacing_hint);

    int size() const { return static_cast<int>(points_.rows()); }
    int dim() const { return static_cast<int>(points_.cols()); }
    double spacing_hint() const { return spacing_hint_; }
    const Eigen::MatrixXd& points() const { return points_; }
    Vec point(int i) const { return points_.row(i).transpose(); }
    int boundary_tag(int i) const { return tags_[i]; }
    bool is_interior(int i) const { return tags_[i] == kInterior; }
    int count_boundary() const;

    // Indices of all nodes with |x_i - center| <= radius, ascending.
    std::vector<int> radius_query(const Vec& center, double radius) const;
    // Distance from x to the nearest node (exact, expanding ring search).
    double nearest_distance(const Vec& x) const;

private:
    Eigen::MatrixXd points_;
    std::vector<int> tags_;
    double spacing_hint_;

    // Bucket grid over the bounding box of the points.
    Vec grid_lo_;
    double cell_;
    std::vector<int> cells_per_axis_;
    std::vector<std::vector<int>> buckets_;

    int bucket_of(const Vec& x) const;
    void cell_coords(const Vec& x, std::vector<int>& c) const;
};

// Tensor-product grid over the domain with spacing h, which must divide every
// side length to a relative tolerance of 1e-12. Includes boundary nodes.
NodeSet generate_grid(const Rectangle& domain, double h);

// Boundary tags for an arbitrary cloud on a rectangle: a node is tagged with
// the lowest facet whose plane it lies on within 1e-12 * side.
std::vector<int> tag_boundary(const Eigen::MatrixXd& points, const Rectangle& domain);

// Estimate of the fill distance sup_{x in domain} min_j |x - x_j| by probing
// a dense grid with at least `probe_density` samples per spacing-hint cell
// and per dimension (probe_density >= 4). The estimate approaches the true
// supremum from below as the density grows.
double fill_distance(const NodeSet& nodes, const Rectangle& domain, int probe_density = 4);

// Half the minimum pairwise node distance, computed exactly.
double separation_distance(const NodeSet& nodes);

// Plain-text serialization: one line per node, d coordinates followed by the
// tag string ("interior" or "facet<k>").
void save_nodes(const NodeSet& nodes, const std::string& path);
NodeSet load_nodes(const std::string& path, double spacing_hint = 0.0);

} // namespace petrovkit
