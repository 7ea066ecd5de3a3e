#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "vexm/domain.hpp"
#include "vexm/errors.hpp"

namespace vexm {

class DomainGrid;
using GridPtr = std::shared_ptr<const DomainGrid>;

/// Contiguous run of lattice columns [col_lo, col_hi) in one lattice row.
struct Span {
    std::int32_t row;
    std::int32_t col_lo;
    std::int32_t col_hi;
};

/// Every (node center, scheduled radius) ball of a grid, stored as lattice
/// spans. Built once per grid and shared by the Morrey modular and M_sigma.
struct BallTable {
    std::vector<double> radii;
    // ball (c, k) occupies spans[offsets[c * radii.size() + k] .. offsets[... + 1])
    std::vector<std::size_t> offsets;
    std::vector<Span> spans;

    std::span<const Span> ball(std::size_t center, std::size_t k) const {
        const std::size_t slot = center * radii.size() + k;
        return {spans.data() + offsets[slot], spans.data() + offsets[slot + 1]};
    }
};

/// Midpoint-rule discretization of a bounded open domain.
///
/// Nodes are cell centers of a uniform lattice of `resolution` cells per axis
/// over the bounding box; for the disk only cells whose center lies strictly
/// inside are kept. Every node carries the same quadrature weight.
class DomainGrid {
public:
    const Domain& domain() const { return domain_; }
    int dimension() const { return domain_.dimension(); }
    int resolution() const { return resolution_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Point>& nodes() const { return nodes_; }
    const Point& node(std::size_t i) const { return nodes_[i]; }

    double cell_measure() const { return cell_measure_; }
    /// Axis spacings (hy is 0 in 1-D).
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    /// Grid spacing used for radius schedules: the larger axis spacing.
    double spacing() const { return std::max(hx_, hy_); }
    /// Sum of all cell measures.
    double measure() const { return cell_measure_ * static_cast<double>(nodes_.size()); }
    double diameter() const { return domain_.diameter(); }
    std::uint64_t id() const { return id_; }

    int lattice_cols() const { return nx_; }
    int lattice_rows() const { return ny_; }
    /// Node index of lattice cell (col, row), or -1 when the cell is outside.
    int lattice_node(int col, int row) const { return lattice_[static_cast<std::size_t>(row) * nx_ + col]; }
    int node_col(std::size_t i) const { return col_of_[i]; }
    int node_row(std::size_t i) const { return row_of_[i]; }
    Point lattice_point(int col, int row) const {
        return {x_lo_ + (col + 0.5) * hx_, dimension() == 1 ? 0.0 : y_lo_ + (row + 0.5) * hy_};
    }

    /// Ball table over all node centers and the radius schedule; built lazily.
    const BallTable& balls() const;

    friend GridPtr build_grid(const Domain& domain, int resolution);

private:
    DomainGrid() = default;

    Domain domain_;
    int resolution_ = 0;
    double hx_ = 0, hy_ = 0, x_lo_ = 0, y_lo_ = 0, cell_measure_ = 0;
    int nx_ = 0, ny_ = 1;
    std::vector<Point> nodes_;
    std::vector<int> lattice_;
    std::vector<int> col_of_, row_of_;
    std::uint64_t id_ = 0;

    mutable std::once_flag balls_once_;
    mutable std::unique_ptr<BallTable> balls_;
};

namespace detail {
inline std::uint64_t next_grid_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}
}  // namespace detail

inline GridPtr build_grid(const Domain& domain, int resolution) {
    if (resolution < 4) throw ConfigurationError("grid resolution must be at least 4");
    if (!(domain.measure() > 0)) throw ConfigurationError("domain must have positive measure");
    auto grid = std::shared_ptr<DomainGrid>(new DomainGrid());
    grid->domain_ = domain;
    grid->resolution_ = resolution;
    grid->id_ = detail::next_grid_id();
    const auto& b = domain.bounds;
    switch (domain.shape) {
        case Shape::interval:
            grid->x_lo_ = b[0];
            grid->hx_ = (b[1] - b[0]) / resolution;
            grid->nx_ = resolution;
            grid->ny_ = 1;
            grid->cell_measure_ = grid->hx_;
            break;
        case Shape::rectangle:
            grid->x_lo_ = b[0];
            grid->y_lo_ = b[2];
            grid->hx_ = (b[1] - b[0]) / resolution;
            grid->hy_ = (b[3] - b[2]) / resolution;
            grid->nx_ = grid->ny_ = resolution;
            grid->cell_measure_ = grid->hx_ * grid->hy_;
            break;
        case Shape::disk:
            grid->x_lo_ = b[0] - b[2];
            grid->y_lo_ = b[1] - b[2];
            grid->hx_ = grid->hy_ = 2.0 * b[2] / resolution;
            grid->nx_ = grid->ny_ = resolution;
            grid->cell_measure_ = grid->hx_ * grid->hy_;
            break;
    }
    grid->lattice_.assign(static_cast<std::size_t>(grid->nx_) * grid->ny_, -1);
    for (int row = 0; row < grid->ny_; ++row) {
        for (int col = 0; col < grid->nx_; ++col) {
            const Point p = grid->lattice_point(col, row);
            if (domain.shape == Shape::disk && !domain.contains(p)) continue;
            grid->lattice_[static_cast<std::size_t>(row) * grid->nx_ + col] =
                static_cast<int>(grid->nodes_.size());
            grid->nodes_.push_back(p);
            grid->col_of_.push_back(col);
            grid->row_of_.push_back(row);
        }
    }
    if (grid->nodes_.empty()) throw ConfigurationError("grid has no nodes inside the domain");
    return grid;
}

/// Geometric radii h, h*sqrt(2), 2h, ... stopping at diam(Omega), which is
/// always the last entry.
///
/// The geometric radii are shrunk by a relative 1e-9: many lattice distances
/// equal h * 2^{k/2} exactly, and the strict test |y - x| < r would otherwise
/// depend on rounding.
inline constexpr double kRadiusShrink = 1.0 - 1e-9;

inline std::vector<double> radii_schedule(const DomainGrid& grid) {
    const double h = grid.spacing();
    const double diam = grid.diameter();
    std::vector<double> radii;
    for (int k = 0;; ++k) {
        const double r = h * std::pow(2.0, 0.5 * k) * kRadiusShrink;
        if (r >= diam * (1.0 - 1e-12)) break;
        radii.push_back(r);
    }
    radii.push_back(diam);
    return radii;
}

/// Nodes of B(center, radius) intersected with Omega.
struct BallSubset {
    Point center{};
    double radius = 0;
    std::vector<std::size_t> node_indices;
};

inline BallSubset ball_subset(const DomainGrid& grid, const Point& center, double radius) {
    if (!grid.domain().contains(center))
        throw DomainError("ball center " + format_point(center, grid.dimension()) +
                          " is outside the domain");
    if (!(radius > 0)) throw PreconditionError("ball radius must be positive");
    BallSubset out{center, radius, {}};
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (distance(grid.node(i), center, grid.dimension()) < radius) out.node_indices.push_back(i);
    return out;
}

namespace detail {

// Lattice columns of `row` within distance `r` of `c`, assuming the center
// column `cc` is the nearest column to c. Empty when cc itself is outside.
inline bool row_span(const DomainGrid& g, int row, int cc, const Point& c, double r, Span& out) {
    const int dim = g.dimension();
    auto inside = [&](int col) { return distance(g.lattice_point(col, row), c, dim) < r; };
    if (!inside(cc)) return false;
    // left boundary: smallest col in [0, cc] inside
    int lo = 0, hi = cc;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (inside(mid)) hi = mid; else lo = mid + 1;
    }
    const int left = lo;
    lo = cc;
    hi = g.lattice_cols() - 1;
    while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        if (inside(mid)) lo = mid; else hi = mid - 1;
    }
    out = Span{row, left, lo + 1};
    return true;
}

}  // namespace detail

inline const BallTable& DomainGrid::balls() const {
    std::call_once(balls_once_, [this] {
        auto table = std::make_unique<BallTable>();
        table->radii = radii_schedule(*this);
        const std::size_t nr = table->radii.size();
        table->offsets.reserve(size() * nr + 1);
        table->offsets.push_back(0);
        for (std::size_t c = 0; c < size(); ++c) {
            const Point& center = nodes_[c];
            const int cc = col_of_[c];
            const int cr = row_of_[c];
            for (std::size_t k = 0; k < nr; ++k) {
                const double r = table->radii[k];
                Span s{};
                // rows above and below the center row, stopping at the first empty one
                for (int row = cr; row >= 0; --row) {
                    if (!detail::row_span(*this, row, cc, center, r, s)) break;
                    table->spans.push_back(s);
                }
                std::reverse(table->spans.begin() + static_cast<std::ptrdiff_t>(table->offsets.back()),
                             table->spans.end());
                for (int row = cr + 1; row < ny_; ++row) {
                    if (!detail::row_span(*this, row, cc, center, r, s)) break;
                    table->spans.push_back(s);
                }
                table->offsets.push_back(table->spans.size());
            }
        }
        balls_ = std::move(table);
    });
    return *balls_;
}

/// Expands a span list into sorted node indices (lattice cells outside the
/// domain are skipped).
inline std::vector<std::size_t> span_nodes(const DomainGrid& grid, std::span<const Span> spans) {
    std::vector<std::size_t> out;
    for (const auto& s : spans)
        for (int col = s.col_lo; col < s.col_hi; ++col) {
            const int idx = grid.lattice_node(col, s.row);
            if (idx >= 0) out.push_back(static_cast<std::size_t>(idx));
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Index of the node nearest to p (lowest index on ties).
inline std::size_t nearest_node(const DomainGrid& grid, const Point& p) {
    std::size_t best = 0;
    double best_d = distance(grid.node(0), p, grid.dimension());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = distance(grid.node(i), p, grid.dimension());
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

/// Samples of a real function on the nodes of one grid.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridPtr grid, std::vector<double> samples) : grid_(std::move(grid)), samples_(std::move(samples)) {
        if (!grid_) throw ShapeError("grid function without a grid");
        if (samples_.size() != grid_->size())
            throw ShapeError("grid function has " + std::to_string(samples_.size()) +
                             " samples for a grid of " + std::to_string(grid_->size()) + " nodes");
        for (double v : samples_)
            if (!std::isfinite(v)) throw PreconditionError("grid function samples must be finite");
    }

    template <typename Fn>
    static GridFunction sample(GridPtr grid, Fn&& fn) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
        return GridFunction(std::move(grid), std::move(v));
    }
    static GridFunction constant(GridPtr grid, double c) {
        std::vector<double> v(grid->size(), c);
        return GridFunction(std::move(grid), std::move(v));
    }

    const DomainGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }

    double max_abs() const {
        double m = 0;
        for (double v : samples_) m = std::max(m, std::abs(v));
        return m;
    }
    bool is_zero() const { return max_abs() == 0.0; }

    GridFunction scaled(double c) const {
        auto v = samples_;
        for (double& x : v) x *= c;
        return GridFunction(grid_, std::move(v));
    }
    GridFunction abs() const {
        auto v = samples_;
        for (double& x : v) x = std::abs(x);
        return GridFunction(grid_, std::move(v));
    }
    /// Pointwise product; both factors must live on the same grid.
    GridFunction times(const GridFunction& other) const {
        require_same_grid(other);
        auto v = samples_;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= other.samples_[i];
        return GridFunction(grid_, std::move(v));
    }
    GridFunction plus(const GridFunction& other, double scale = 1.0) const {
        require_same_grid(other);
        auto v = samples_;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += scale * other.samples_[i];
        return GridFunction(grid_, std::move(v));
    }
    GridFunction shifted(double c) const {
        auto v = samples_;
        for (double& x : v) x += c;
        return GridFunction(grid_, std::move(v));
    }

    void require_same_grid(const GridFunction& other) const { require_grid(*other.grid_); }
    void require_grid(const DomainGrid& g) const {
        if (!grid_ || grid_->id() != g.id()) throw ShapeError("grid functions live on different grids");
    }

private:
    GridPtr grid_;
    std::vector<double> samples_;
};

/// Midpoint-rule integral over the whole domain.
inline double integrate(const DomainGrid& grid, const GridFunction& f) {
    f.require_grid(grid);
    double s = 0;
    for (double v : f.samples()) s += v;
    return s * grid.cell_measure();
}

/// Midpoint-rule integral over a ball subset.
inline double integrate(const DomainGrid& grid, const GridFunction& f, const BallSubset& subset) {
    f.require_grid(grid);
    double s = 0;
    for (std::size_t i : subset.node_indices) s += f[i];
    return s * grid.cell_measure();
}

}  // namespace vexm
