#include "petrovkit/geometry.hpp"
#include "petrovkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace petrovkit {

bool Box::contains(const Vec& x, double tol) const {
    for (int a = 0; a < dim(); ++a) {
        if (x[a] < lo[a] - tol || x[a] > hi[a] + tol) return false;
    }
    return true;
}

Rectangle::Rectangle(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.size() == 0) {
        throw config_error("Rectangle: lo/hi dimension mismatch");
    }
    for (int a = 0; a < lo.size(); ++a) {
        if (!(lo[a] < hi[a])) {
            throw config_error("Rectangle: lo must be strictly below hi on every axis");
        }
    }
    box.lo = std::move(lo);
    box.hi = std::move(hi);
    facet_kinds.assign(static_cast<size_t>(2 * box.dim()), BoundaryKind::Dirichlet);
}

double Rectangle::boundary_distance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim(); ++a) {
        d = std::min(d, x[a] - box.lo[a]);
        d = std::min(d, box.hi[a] - x[a]);
    }
    return d;
}

Vec Rectangle::facet_normal(int facet) const {
    if (facet < 0 || facet >= num_facets()) {
        throw config_error("facet_normal: facet id out of range");
    }
    Vec n = Vec::Zero(dim());
    n[facet / 2] = (facet % 2 == 0) ? -1.0 : 1.0;
    return n;
}

bool Rectangle::has_neumann() const {
    return std::any_of(facet_kinds.begin(), facet_kinds.end(),
                       [](BoundaryKind k) { return k == BoundaryKind::Neumann; });
}

Rectangle unit_square() {
    Vec lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 1.0, 1.0;
    return Rectangle(lo, hi);
}

NodeSet::NodeSet(Eigen::MatrixXd points, std::vector<int> boundary_tags, double spacing_hint)
    : points_(std::move(points)), tags_(std::move(boundary_tags)), spacing_hint_(spacing_hint) {
    const int n = size();
    const int d = dim();
    if (n == 0) throw config_error("NodeSet: empty point set");
    if (static_cast<int>(tags_.size()) != n) {
        throw config_error("NodeSet: tag count does not match point count");
    }
    if (!(spacing_hint_ > 0.0)) throw config_error("NodeSet: spacing hint must be positive");

    // Bucket grid sized by the spacing hint over the point bounding box.
    grid_lo_ = points_.colwise().minCoeff().transpose();
    Vec grid_hi = points_.colwise().maxCoeff().transpose();
    cell_ = spacing_hint_;
    cells_per_axis_.resize(d);
    int total = 1;
    for (int a = 0; a < d; ++a) {
        double span = grid_hi[a] - grid_lo_[a];
        cells_per_axis_[a] = std::max(1, static_cast<int>(std::floor(span / cell_)) + 1);
        total *= cells_per_axis_[a];
    }
    buckets_.assign(static_cast<size_t>(total), {});
    for (int i = 0; i < n; ++i) {
        buckets_[static_cast<size_t>(bucket_of(point(i)))].push_back(i);
    }

    // Reject duplicate points: identical coordinates break the separation
    // invariant and make weighted stencils singular.
    for (int i = 0; i < n; ++i) {
        Vec xi = point(i);
        for (int j : radius_query(xi, 0.0)) {
            if (j != i) throw config_error("NodeSet: duplicate node coordinates");
        }
    }
}

void NodeSet::cell_coords(const Vec& x, std::vector<int>& c) const {
    const int d = dim();
    c.resize(d);
    for (int a = 0; a < d; ++a) {
        int k = static_cast<int>(std::floor((x[a] - grid_lo_[a]) / cell_));
        c[a] = std::clamp(k, 0, cells_per_axis_[a] - 1);
    }
}

int NodeSet::bucket_of(const Vec& x) const {
    std::vector<int> c;
    cell_coords(x, c);
    int idx = 0;
    for (int a = dim() - 1; a >= 0; --a) idx = idx * cells_per_axis_[a] + c[a];
    return idx;
}

int NodeSet::count_boundary() const {
    return static_cast<int>(std::count_if(tags_.begin(), tags_.end(),
                                          [](int t) { return t != kInterior; }));
}

std::vector<int> NodeSet::radius_query(const Vec& center, double radius) const {
    if (radius < 0.0) throw config_error("radius_query: radius must be nonnegative");
    const int d = dim();
    std::vector<int> base;
    cell_coords(center, base);
    const int reach = static_cast<int>(std::ceil(radius / cell_)) + 1;
    const double r2 = radius * radius;

    std::vector<int> found;
    std::vector<int> c(d);
    // Walk the block of cells overlapping the ball (dimension-generic odometer).
    std::vector<int> lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
        lo[a] = std::max(0, base[a] - reach);
        hi[a] = std::min(cells_per_axis_[a] - 1, base[a] + reach);
        c[a] = lo[a];
    }
    while (true) {
        int idx = 0;
        for (int a = d - 1; a >= 0; --a) idx = idx * cells_per_axis_[a] + c[a];
        for (int j : buckets_[static_cast<size_t>(idx)]) {
            if ((points_.row(j).transpose() - center).squaredNorm() <= r2) found.push_back(j);
        }
        int a = 0;
        while (a < d && ++c[a] > hi[a]) { c[a] = lo[a]; ++a; }
        if (a == d) break;
    }
    std::sort(found.begin(), found.end());
    return found;
}

double NodeSet::nearest_distance(const Vec& x) const {
    // Expanding ring search: examine cells in growing Chebyshev shells until
    // the best distance found so far rules out all farther shells.
    const int d = dim();
    std::vector<int> base;
    cell_coords(x, base);
    double best = std::numeric_limits<double>::infinity();
    int max_reach = 0;
    for (int a = 0; a < d; ++a) max_reach = std::max(max_reach, cells_per_axis_[a]);

    for (int ring = 0; ring <= max_reach; ++ring) {
        // Any cell in shell `ring` is at least (ring-1)*cell_ away.
        if (best < static_cast<double>(ring - 1) * cell_) break;
        std::vector<int> lo(d), hi(d), c(d);
        for (int a = 0; a < d; ++a) {
            lo[a] = std::max(0, base[a] - ring);
            hi[a] = std::min(cells_per_axis_[a] - 1, base[a] + ring);
            c[a] = lo[a];
        }
        bool any_cell = false;
        while (true) {
            bool on_shell = false;
            for (int a = 0; a < d; ++a) {
                if (c[a] == base[a] - ring || c[a] == base[a] + ring) { on_shell = true; break; }
            }
            if (on_shell || ring == 0) {
                any_cell = true;
                int idx = 0;
                for (int a = d - 1; a >= 0; --a) idx = idx * cells_per_axis_[a] + c[a];
                for (int j : buckets_[static_cast<size_t>(idx)]) {
                    best = std::min(best, (points_.row(j).transpose() - x).norm());
                }
            }
            int a = 0;
            while (a < d && ++c[a] > hi[a]) { c[a] = lo[a]; ++a; }
            if (a == d) break;
        }
        if (!any_cell && ring > 0 && best < std::numeric_limits<double>::infinity()) break;
    }
    return best;
}

NodeSet generate_grid(const Rectangle& domain, double h) {
    if (!(h > 0.0)) throw config_error("generate_grid: spacing h must be positive");
    const int d = domain.dim();
    std::vector<int> cells(d);
    for (int a = 0; a < d; ++a) {
        const double side = domain.box.side(a);
        const double ratio = side / h;
        const int n = static_cast<int>(std::llround(ratio));
        if (n < 1 || std::abs(n * h - side) > 1e-12 * side) {
            std::ostringstream msg;
            msg << "generate_grid: h = " << h << " does not divide side " << a
                << " (length " << side << ")";
            throw config_error(msg.str());
        }
        cells[a] = n;
    }

    int total = 1;
    for (int a = 0; a < d; ++a) total *= cells[a] + 1;
    Eigen::MatrixXd pts(total, d);
    std::vector<int> c(d, 0);
    int row = 0;
    while (true) {
        for (int a = 0; a < d; ++a) {
            // Endpoints are written exactly so boundary tagging is reliable.
            pts(row, a) = (c[a] == cells[a]) ? domain.box.hi[a]
                                             : domain.box.lo[a] + c[a] * h;
        }
        ++row;
        int a = 0;
        while (a < d && ++c[a] > cells[a]) { c[a] = 0; ++a; }
        if (a == d) break;
    }

    std::vector<int> tags = tag_boundary(pts, domain);
    return NodeSet(std::move(pts), std::move(tags), h);
}

std::vector<int> tag_boundary(const Eigen::MatrixXd& points, const Rectangle& domain) {
    const int d = domain.dim();
    std::vector<int> tags(static_cast<size_t>(points.rows()), kInterior);
    for (int i = 0; i < points.rows(); ++i) {
        for (int f = 0; f < domain.num_facets(); ++f) {
            const int a = f / 2;
            const double plane = (f % 2 == 0) ? domain.box.lo[a] : domain.box.hi[a];
            const double tol = 1e-12 * domain.box.side(a);
            if (std::abs(points(i, a) - plane) <= tol) {
                tags[static_cast<size_t>(i)] = f; // lowest facet id wins
                break;
            }
        }
    }
    return tags;
}

double fill_distance(const NodeSet& nodes, const Rectangle& domain, int probe_density) {
    if (probe_density < 4) {
        throw config_error("fill_distance: probe density must be at least 4");
    }
    const int d = domain.dim();
    std::vector<int> steps(d);
    for (int a = 0; a < d; ++a) {
        const double cells = domain.box.side(a) / nodes.spacing_hint();
        steps[a] = std::max(1, static_cast<int>(std::ceil(cells)) * probe_density);
    }
    double worst = 0.0;
    std::vector<int> c(d, 0);
    Vec x(d);
    while (true) {
        for (int a = 0; a < d; ++a) {
            x[a] = domain.box.lo[a] + domain.box.side(a) * c[a] / steps[a];
        }
        worst = std::max(worst, nodes.nearest_distance(x));
        int a = 0;
        while (a < d && ++c[a] > steps[a]) { c[a] = 0; ++a; }
        if (a == d) break;
    }
    return worst;
}

double separation_distance(const NodeSet& nodes) {
    if (nodes.size() < 2) {
        throw config_error("separation_distance: needs at least two nodes");
    }
    double min_pair = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nodes.size(); ++i) {
        const Vec xi = nodes.point(i);
        // Nearest other node via rings; mask node i by querying distance to
        // all nodes in a radius that certainly holds a neighbor.
        double r = nodes.spacing_hint();
        std::vector<int> near;
        for (;; r *= 2.0) {
            near = nodes.radius_query(xi, r);
            if (static_cast<int>(near.size()) > 1) break;
        }
        for (int j : near) {
            if (j == i) continue;
            min_pair = std::min(min_pair, (nodes.point(j) - xi).norm());
        }
    }
    return 0.5 * min_pair;
}

void save_nodes(const NodeSet& nodes, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("save_nodes: cannot open " + path);
    out.precision(17);
    for (int i = 0; i < nodes.size(); ++i) {
        for (int a = 0; a < nodes.dim(); ++a) out << nodes.points()(i, a) << ' ';
        if (nodes.is_interior(i)) {
            out << "interior\n";
        } else {
            out << "facet" << nodes.boundary_tag(i) << '\n';
        }
    }
    if (!out) throw config_error("save_nodes: write failed for " + path);
}

NodeSet load_nodes(const std::string& path, double spacing_hint) {
    std::ifstream in(path);
    if (!in) throw config_error("load_nodes: cannot open " + path);
    std::vector<std::vector<double>> coords;
    std::vector<int> tags;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            double v = std::strtod(tok.c_str(), &end);
            if (end && *end == '\0') {
                row.push_back(v);
            } else {
                if (tok == "interior") {
                    tags.push_back(kInterior);
                } else if (tok.rfind("facet", 0) == 0) {
                    tags.push_back(std::stoi(tok.substr(5)));
                } else {
                    throw config_error("load_nodes: unrecognized tag '" + tok + "'");
                }
                break;
            }
        }
        if (row.empty() || tags.size() != coords.size() + 1) {
            throw config_error("load_nodes: malformed line '" + line + "'");
        }
        coords.push_back(std::move(row));
    }
    if (coords.empty()) throw config_error("load_nodes: no nodes in " + path);
    const int d = static_cast<int>(coords.front().size());
    Eigen::MatrixXd pts(static_cast<int>(coords.size()), d);
    for (int i = 0; i < pts.rows(); ++i) {
        if (static_cast<int>(coords[static_cast<size_t>(i)].size()) != d) {
            throw config_error("load_nodes: inconsistent dimension");
        }
        for (int a = 0; a < d; ++a) pts(i, a) = coords[static_cast<size_t>(i)][static_cast<size_t>(a)];
    }
    if (spacing_hint <= 0.0) {
        // Fall back to the minimum pairwise distance as the cell size.
        double min_pair = std::numeric_limits<double>::infinity();
        for (int i = 0; i < pts.rows(); ++i) {
            for (int j = i + 1; j < pts.rows(); ++j) {
                min_pair = std::min(min_pair, (pts.row(i) - pts.row(j)).norm());
            }
        }
        spacing_hint = std::isfinite(min_pair) ? min_pair : 1.0;
    }
    return NodeSet(std::move(pts), std::move(tags), spacing_hint);
}

} // namespace petrovkit
