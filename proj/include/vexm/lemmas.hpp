#pragma once

// Empirical versions of the auxiliary estimates used for variable-exponent
// Morrey spaces on bounded domains. Each function returns the observed
// quantity; tests and the harness decide what bound to compare it with.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vexm/exponent.hpp"
#include "vexm/grid.hpp"
#include "vexm/norms.hpp"
#include "vexm/operators.hpp"

namespace vexm {

/// int_{B~(x0, r)} |x - x0|^{lambda(x) - n} dx.
///
/// 1-D: every cell is clipped to the ball and integrated exactly with the
/// exponent frozen at the cell's node. 2-D: midpoint rule over the nodes in
/// the ball, with the exact cell integral for a node coinciding with x0.
inline double power_kernel_ball_integral(const DomainGrid& grid, const Point& x0, double r,
                                         const ExponentField& lam) {
    const int n = grid.dimension();
    double total = 0;
    if (n == 1) {
        const double c0 = x0[0];
        const double half = 0.5 * grid.hx();
        // antiderivative of |t|^{e} on the real line, odd in t
        auto F = [](double t, double e) {
            const double v = std::pow(std::abs(t), e + 1.0) / (e + 1.0);
            return t < 0 ? -v : v;
        };
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.node(i)[0];
            double u = std::max((x - c0) - half, -r);
            double v = std::min((x - c0) + half, r);
            // x0 on a cell edge: |t|^{lambda} is not Lipschitz at 0, so rounding
            // residue there would cost ~1e-17^{lambda}
            if (std::abs(u) < 1e-9 * half) u = 0.0;
            if (std::abs(v) < 1e-9 * half) v = 0.0;
            if (!(v > u)) continue;
            const double e = lam.value(grid.node(i)) - 1.0;
            if (!(e > -1.0)) throw ConfigurationError("kernel |x - x0|^{lambda - 1} needs lambda > 0");
            total += F(v, e) - F(u, e);
        }
        return total;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = distance(grid.node(i), x0, n);
        if (!(d < r)) continue;
        const double e = lam.value(grid.node(i)) - n;
        if (d <= 1e-12 * grid.spacing())
            total += power_cell_integral(grid, e);
        else
            total += std::pow(d, e) * grid.cell_measure();
    }
    return total;
}

/// int_{B~(x0, r)} |x - x0|^{lambda(x) - n} dx / r^{lambda(x0)}.
inline double integral_bound_ratio(const DomainGrid& grid, const Point& x0, double r, const ExponentField& lam) {
    return power_kernel_ball_integral(grid, x0, r, lam) / std::pow(r, lam.value(x0));
}

struct BallRatio {
    double max_ratio = 0;
    Point center{};
    double radius = 0;
};

/// max over node centers and scheduled radii of
/// ||chi_{B~(x, r)}||_p / |B(x, r)|^{1/p(x)}.
inline BallRatio ball_indicator_ratio(const DomainGrid& grid, const ExponentField& p) {
    const auto ps = p.sample(grid);
    const BallTable& table = grid.balls();
    const double w = grid.cell_measure();
    BallRatio best;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        for (std::size_t k = 0; k < table.radii.size(); ++k) {
            const auto nodes = span_nodes(grid, table.ball(c, k));
            std::vector<double> powers;
            powers.reserve(nodes.size());
            for (std::size_t i : nodes) powers.push_back(ps[i]);
            auto modular = [&](double eta) {
                const double le = std::log(eta);
                double s = 0;
                for (double q : powers) s += std::exp(-q * le);
                return s * w;
            };
            const double measure = w * static_cast<double>(nodes.size());
            const double hi = 1.0 + measure;
            const double norm = solve_unit_level(modular, hi * 1e-3, hi).value;
            const double r = table.radii[k];
            const double ratio = norm / std::pow(ball_volume(r, grid.dimension()), 1.0 / ps[c]);
            if (ratio > best.max_ratio) best = {ratio, grid.node(c), r};
        }
    }
    return best;
}

/// max over scheduled r and node pairs with |x - y| <= r of
/// |log(r^{-lambda(x)} / r^{-lambda(y)})| = |lambda(x) - lambda(y)| |log r|.
inline double radius_power_log_ratio(const DomainGrid& grid, const ExponentField& lam) {
    if (lam.is_constant()) return 0.0;
    const auto v = lam.sample(grid);
    const auto radii = radii_schedule(grid);
    const int dim = grid.dimension();
    double best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const double d = distance(grid.node(i), grid.node(j), dim);
            const double dl = std::abs(v[i] - v[j]);
            for (double r : radii)
                if (d <= r) best = std::max(best, dl * std::abs(std::log(r)));
        }
    return best;
}

/// K0 with |lambda(x) - lambda(y)| |log r| <= K0 * C0 for every radius up to
/// diam(Omega) on a convex domain: radii below 1/2 need K0 = 1; larger radii
/// chain m = floor(2 diam) + 1 steps shorter than 1/2, each contributing at
/// most C0 / log 2, against |log r| <= max(log 2, log diam).
inline double radius_power_chain_factor(const DomainGrid& grid) {
    const double diam = grid.diameter();
    const double m = std::floor(2.0 * diam) + 1.0;
    const double log_r = std::max(std::log(2.0), std::log(diam));
    return std::max(1.0, m * log_r / std::log(2.0));
}

}  // namespace vexm
