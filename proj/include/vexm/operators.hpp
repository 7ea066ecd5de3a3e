#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/grid.hpp"
#include "vexm/parallel.hpp"

namespace vexm {

/// Exact integral of |t|^e over one grid cell centered at the origin.
///
/// 1-D: 2 (h/2)^{e+1} / (e+1), needs e > -1. 2-D: polar integration over the
/// rectangle [-hx/2, hx/2] x [-hy/2, hy/2], split at the corner angle so each
/// piece is smooth, with a 32-point Gauss-Legendre rule per piece; needs e > -2.
inline double power_cell_integral(const DomainGrid& grid, double e) {
    const int n = grid.dimension();
    if (!(e > -n)) throw ConfigurationError("power |t|^e is not integrable on a cell for e <= -n");
    if (n == 1) {
        const double half = 0.5 * grid.hx();
        return 2.0 * std::pow(half, e + 1.0) / (e + 1.0);
    }
    const double a = 0.5 * grid.hx();
    const double b = 0.5 * grid.hy();
    const double corner = std::atan2(b, a);
    using Rule = boost::math::quadrature::gauss<double, 32>;
    const double m = e + 2.0;
    const double part1 = Rule::integrate([&](double t) { return std::pow(a / std::cos(t), m); }, 0.0, corner);
    const double part2 =
        Rule::integrate([&](double t) { return std::pow(b / std::sin(t), m); }, corner, 0.5 * std::numbers::pi);
    return 4.0 * (part1 + part2) / m;
}

/// Average of |t|^e over one cell centered at the origin.
inline double power_cell_average(const DomainGrid& grid, double e) {
    return power_cell_integral(grid, e) / grid.cell_measure();
}

namespace detail {
inline bool coincides(const Point& a, const Point& b, const DomainGrid& g) {
    return distance(a, b, g.dimension()) <= 1e-12 * g.spacing();
}
}  // namespace detail

/// Samples |x - x0|^exponent(x). A node coinciding with x0 gets the cell
/// average of the power when the exponent there is negative.
inline GridFunction weight_power(const GridPtr& grid, const Point& x0,
                                 const std::function<double(const Point&)>& exponent) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& x = grid->node(i);
        const double e = exponent(x);
        if (detail::coincides(x, x0, *grid)) {
            v[i] = e < 0 ? power_cell_average(*grid, e) : (e == 0 ? 1.0 : 0.0);
        } else {
            v[i] = std::pow(distance(x, x0, grid->dimension()), e);
        }
    }
    return GridFunction(grid, std::move(v));
}

/// Samples |x - x0|^exponent.
inline GridFunction weight_power(const GridPtr& grid, const Point& x0, double exponent) {
    return weight_power(grid, x0, [exponent](const Point&) { return exponent; });
}

namespace detail {

// Kernel weights |x - y|^{gamma - n} * cell_measure indexed by lattice offset,
// with the diagonal replaced by the exact cell integral of the kernel.
struct KernelTable {
    int nx = 0, ny = 0;
    std::vector<double> w;  // w[dy * nx + dx]

    double at(int dx, int dy) const { return w[static_cast<std::size_t>(std::abs(dy)) * nx + std::abs(dx)]; }
};

inline KernelTable kernel_table(const DomainGrid& g, double gamma) {
    const int n = g.dimension();
    KernelTable t;
    t.nx = g.lattice_cols();
    t.ny = g.lattice_rows();
    t.w.resize(static_cast<std::size_t>(t.nx) * t.ny);
    for (int dy = 0; dy < t.ny; ++dy)
        for (int dx = 0; dx < t.nx; ++dx) {
            const double d = n == 1 ? dx * g.hx() : std::hypot(dx * g.hx(), dy * g.hy());
            t.w[static_cast<std::size_t>(dy) * t.nx + dx] = std::pow(d, gamma - n) * g.cell_measure();
        }
    t.w[0] = power_cell_integral(g, gamma - n);
    return t;
}

inline void require_gamma(double gamma, int n) {
    if (!(gamma > 0) || !(gamma < n))
        throw ConfigurationError("fractional order gamma must lie in (0, n)");
}

}  // namespace detail

/// Order and quadrature rule of the Riesz potential.
struct KernelSpec {
    double gamma = 0.5;
};

/// I_gamma f(x) = int_Omega f(y) |x - y|^{gamma - n} dy.
///
/// Off-diagonal cells use the midpoint rule; the cell containing x uses f(x)
/// times the exact integral of the kernel over that cell.
inline GridFunction fractional_integral(const GridFunction& f, double gamma) {
    const DomainGrid& g = f.grid();
    detail::require_gamma(gamma, g.dimension());
    const auto table = detail::kernel_table(g, gamma);
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const int ci = g.node_col(i), ri = g.node_row(i);
        double s = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (f[j] == 0.0) continue;
            s += f[j] * table.at(g.node_col(j) - ci, g.node_row(j) - ri);
        }
        out[i] = s;
    });
    return GridFunction(f.grid_ptr(), std::move(out));
}

/// The three pieces of I_gamma f split by distance to x0: y with
/// |y - x0| < |x - x0|/2, with |x - x0|/2 <= |y - x0| < 2|x - x0|, and the rest.
inline std::tuple<GridFunction, GridFunction, GridFunction> fractional_integral_split(const GridFunction& f,
                                                                                    double gamma,
                                                                                    const Point& x0) {
    const DomainGrid& g = f.grid();
    detail::require_gamma(gamma, g.dimension());
    if (!g.domain().contains(x0)) throw DomainError("split center x0 must lie in the domain");
    const auto table = detail::kernel_table(g, gamma);
    const std::size_t n = g.size();
    const int dim = g.dimension();
    std::vector<double> dist0(n);
    for (std::size_t j = 0; j < n; ++j) dist0[j] = distance(g.node(j), x0, dim);
    std::vector<double> j1(n, 0.0), j2(n, 0.0), j3(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const int ci = g.node_col(i), ri = g.node_row(i);
        const double dx = dist0[i];
        double s1 = 0, s2 = 0, s3 = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (f[j] == 0.0) continue;
            const double term = f[j] * table.at(g.node_col(j) - ci, g.node_row(j) - ri);
            if (dist0[j] < 0.5 * dx) s1 += term;
            else if (dist0[j] < 2.0 * dx) s2 += term;
            else s3 += term;
        }
        j1[i] = s1;
        j2[i] = s2;
        j3[i] = s3;
    });
    const auto& gp = f.grid_ptr();
    return {GridFunction(gp, std::move(j1)), GridFunction(gp, std::move(j2)), GridFunction(gp, std::move(j3))};
}

namespace detail {

// Sparse table for range-max queries over one lattice row.
class RowMax {
public:
    void build(const double* row, int n) {
        n_ = n;
        levels_ = 1;
        while ((1 << levels_) <= n) ++levels_;
        t_.assign(static_cast<std::size_t>(levels_) * n, 0.0);
        std::copy(row, row + n, t_.begin());
        for (int l = 1; l < levels_; ++l)
            for (int i = 0; i + (1 << l) <= n; ++i)
                t_[static_cast<std::size_t>(l) * n + i] =
                    std::max(t_[static_cast<std::size_t>(l - 1) * n + i],
                             t_[static_cast<std::size_t>(l - 1) * n + i + (1 << (l - 1))]);
    }
    // max over [lo, hi), hi > lo
    double query(int lo, int hi) const {
        int l = 0;
        while ((2 << l) <= hi - lo) ++l;
        return std::max(t_[static_cast<std::size_t>(l) * n_ + lo], t_[static_cast<std::size_t>(l) * n_ + hi - (1 << l)]);
    }

private:
    int n_ = 0, levels_ = 0;
    std::vector<double> t_;
};

}  // namespace detail

/// |B(z, r)| by the midpoint rule of the grid: cell measure times the number
/// of points of the unbounded lattice through z inside the ball. Same for
/// every node z.
inline double lattice_ball_measure(const DomainGrid& g, double r) {
    const int n = g.dimension();
    const int ki = static_cast<int>(std::ceil(r / g.hx()));
    const int kj = n == 1 ? 0 : static_cast<int>(std::ceil(r / g.hy()));
    std::size_t count = 0;
    for (int j = -kj; j <= kj; ++j)
        for (int i = -ki; i <= ki; ++i)
            if (std::hypot(i * g.hx(), n == 1 ? 0.0 : j * g.hy()) < r) ++count;
    return static_cast<double>(count) * g.cell_measure();
}

/// M_sigma f(x) = sup over node centers z and scheduled radii r with
/// |x - z| < r of |B(z, r)|^{sigma/n - 1} * int_{B~(z, r)} |f|.
/// f is extended by zero outside Omega; |B(z, r)| is the full ball, measured
/// with the same midpoint rule as the integral so that averages of a
/// constant never exceed it.
inline GridFunction fractional_maximal(const GridFunction& f, double sigma) {
    const DomainGrid& g = f.grid();
    const int n = g.dimension();
    if (!(sigma >= 0) || !(sigma < n)) throw ConfigurationError("sigma must lie in [0, n)");
    const BallTable& table = g.balls();
    const int nx = g.lattice_cols(), ny = g.lattice_rows();
    const std::size_t N = g.size();

    std::vector<double> prefix(static_cast<std::size_t>(ny) * (nx + 1), 0.0);
    for (std::size_t i = 0; i < N; ++i)
        prefix[static_cast<std::size_t>(g.node_row(i)) * (nx + 1) + g.node_col(i) + 1] = std::abs(f[i]);
    for (int row = 0; row < ny; ++row) {
        double* r = prefix.data() + static_cast<std::size_t>(row) * (nx + 1);
        for (int c = 0; c < nx; ++c) r[c + 1] += r[c];
    }

    std::vector<double> out(N, 0.0);
    std::vector<double> lattice_avg(static_cast<std::size_t>(ny) * nx);
    std::vector<detail::RowMax> rows(static_cast<std::size_t>(ny));
    for (std::size_t k = 0; k < table.radii.size(); ++k) {
        const double scale = std::pow(lattice_ball_measure(g, table.radii[k]), sigma / n - 1.0) * g.cell_measure();
        std::fill(lattice_avg.begin(), lattice_avg.end(), 0.0);
        for (std::size_t z = 0; z < N; ++z) {
            double s = 0;
            for (const Span& sp : table.ball(z, k)) {
                const double* r = prefix.data() + static_cast<std::size_t>(sp.row) * (nx + 1);
                s += r[sp.col_hi] - r[sp.col_lo];
            }
            lattice_avg[static_cast<std::size_t>(g.node_row(z)) * nx + g.node_col(z)] = scale * s;
        }
        for (int row = 0; row < ny; ++row)
            rows[static_cast<std::size_t>(row)].build(lattice_avg.data() + static_cast<std::size_t>(row) * nx, nx);
        // z lies in B(x, r) exactly when x lies in B(z, r)
        parallel_for(N, [&](std::size_t x) {
            double m = out[x];
            for (const Span& sp : table.ball(x, k))
                m = std::max(m, rows[static_cast<std::size_t>(sp.row)].query(sp.col_lo, sp.col_hi));
            out[x] = m;
        });
    }
    return GridFunction(f.grid_ptr(), std::move(out));
}

/// f_Omega = (1/|Omega|) int_Omega f, with |Omega| the grid measure.
inline double mean_value(const GridFunction& f) { return integrate(f.grid(), f) / f.grid().measure(); }

/// |grad f| by finite differences: central in the interior, second-order
/// one-sided next to the boundary, first-order when only one neighbour exists.
inline GridFunction gradient_magnitude(const GridFunction& f) {
    const DomainGrid& g = f.grid();
    const int dim = g.dimension();
    auto at = [&](int col, int row) -> int {
        if (col < 0 || row < 0 || col >= g.lattice_cols() || row >= g.lattice_rows()) return -1;
        return g.lattice_node(col, row);
    };
    auto partial = [&](std::size_t i, int dc, int dr, double h) {
        const int c = g.node_col(i), r = g.node_row(i);
        const int fwd = at(c + dc, r + dr), bwd = at(c - dc, r - dr);
        if (fwd >= 0 && bwd >= 0) return (f[fwd] - f[bwd]) / (2.0 * h);
        if (fwd >= 0) {
            const int fwd2 = at(c + 2 * dc, r + 2 * dr);
            if (fwd2 >= 0) return (-3.0 * f[i] + 4.0 * f[fwd] - f[fwd2]) / (2.0 * h);
            return (f[fwd] - f[i]) / h;
        }
        if (bwd >= 0) {
            const int bwd2 = at(c - 2 * dc, r - 2 * dr);
            if (bwd2 >= 0) return (3.0 * f[i] - 4.0 * f[bwd] + f[bwd2]) / (2.0 * h);
            return (f[i] - f[bwd]) / h;
        }
        return 0.0;
    };
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double gx = partial(i, 1, 0, g.hx());
        if (dim == 1) {
            out[i] = std::abs(gx);
        } else {
            const double gy = partial(i, 0, 1, g.hy());
            out[i] = std::hypot(gx, gy);
        }
    }
    return GridFunction(f.grid_ptr(), std::move(out));
}

}  // namespace vexm
