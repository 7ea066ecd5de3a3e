#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "vexm/errors.hpp"
#include "vexm/exponent.hpp"
#include "vexm/grid.hpp"
#include "vexm/parallel.hpp"
#include "vexm/root_finding.hpp"

namespace vexm {

/// Result of a Luxemburg-type norm computation.
struct NormResult {
    double value = 0;
    double modular_at_value = 0;  // 1 up to the solver tolerance for nonzero input, else 0
    int bisection_iterations = 0;
    std::pair<double, double> bracket{0, 0};
};

namespace detail {

inline void require_exponent_samples(const std::vector<double>& p) {
    for (double v : p)
        if (!(v >= 1.0 - 1e-12) || !std::isfinite(v))
            throw ConfigurationError("Lebesgue exponent values must lie in [1, infinity)");
}

// log|f| and p at the nonzero nodes of a subset; the modular of f / eta is
// sum_i w * exp(p_i * (log|f_i| - log eta)).
struct ModularTerms {
    std::vector<double> log_abs;
    std::vector<double> power;
    double weight = 0;
    double max_abs = 0;

    double at(double eta) const {
        const double le = std::log(eta);
        double s = 0;
        for (std::size_t i = 0; i < log_abs.size(); ++i) s += std::exp(power[i] * (log_abs[i] - le));
        return s * weight;
    }
};

template <typename Indices>
ModularTerms modular_terms(const GridFunction& f, const std::vector<double>& p, const Indices& idx) {
    ModularTerms t;
    t.weight = f.grid().cell_measure();
    for (std::size_t i : idx) {
        const double a = std::abs(f[i]);
        if (a == 0.0) continue;
        t.log_abs.push_back(std::log(a));
        t.power.push_back(p[i]);
        t.max_abs = std::max(t.max_abs, a);
    }
    return t;
}

struct AllNodes {
    std::size_t n;
    struct It {
        std::size_t i;
        std::size_t operator*() const { return i; }
        It& operator++() { ++i; return *this; }
        bool operator!=(const It& o) const { return i != o.i; }
    };
    It begin() const { return {0}; }
    It end() const { return {n}; }
};

inline NormResult norm_from_terms(const ModularTerms& t, double subset_measure,
                                  const UnitLevelOptions& opt) {
    if (t.log_abs.empty()) return {};
    const double hi = t.max_abs * (1.0 + subset_measure);
    const auto r = solve_unit_level([&](double eta) { return t.at(eta); }, hi * 1e-3, hi, opt);
    return {r.value, r.level, r.iterations, r.bracket};
}

}  // namespace detail

/// rho_p(f) = sum over the nodes of |f|^p * cell_measure.
inline double lebesgue_modular(const GridFunction& f, const ExponentField& p) {
    const auto ps = p.sample(f.grid());
    detail::require_exponent_samples(ps);
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::abs(f[i]);
        if (a != 0.0) s += std::pow(a, ps[i]);
    }
    return s * f.grid().cell_measure();
}

/// Modular restricted to a ball subset.
inline double lebesgue_modular(const GridFunction& f, const ExponentField& p, const BallSubset& subset) {
    const auto ps = p.sample(f.grid());
    detail::require_exponent_samples(ps);
    double s = 0;
    for (std::size_t i : subset.node_indices) {
        const double a = std::abs(f[i]);
        if (a != 0.0) s += std::pow(a, ps[i]);
    }
    return s * f.grid().cell_measure();
}

/// Luxemburg norm inf{eta > 0 : rho_p(f / eta) <= 1}.
inline NormResult lebesgue_norm(const GridFunction& f, const ExponentField& p, const UnitLevelOptions& opt = {}) {
    const auto ps = p.sample(f.grid());
    detail::require_exponent_samples(ps);
    const auto t = detail::modular_terms(f, ps, detail::AllNodes{f.size()});
    return detail::norm_from_terms(t, f.grid().measure(), opt);
}

/// Luxemburg norm of f restricted to a set of nodes.
inline NormResult lebesgue_norm(const GridFunction& f, const ExponentField& p, const BallSubset& subset,
                                const UnitLevelOptions& opt = {}) {
    const auto ps = p.sample(f.grid());
    detail::require_exponent_samples(ps);
    const auto t = detail::modular_terms(f, ps, subset.node_indices);
    return detail::norm_from_terms(
        t, f.grid().cell_measure() * static_cast<double>(subset.node_indices.size()), opt);
}

namespace detail {

// Sup over (node center, scheduled radius) of r^{-lambda(center)} * sum over the
// ball of cell values. Row prefix sums make each ball O(#rows).
class MorreySup {
public:
    MorreySup(const DomainGrid& grid, const std::vector<double>& lambda_at_node)
        : grid_(grid), table_(grid.balls()) {
        const std::size_t nr = table_.radii.size();
        scale_.resize(grid.size() * nr);
        for (std::size_t c = 0; c < grid.size(); ++c)
            for (std::size_t k = 0; k < nr; ++k)
                scale_[c * nr + k] = std::pow(table_.radii[k], -lambda_at_node[c]);
        prefix_.assign(static_cast<std::size_t>(grid.lattice_rows()) * (grid.lattice_cols() + 1), 0.0);
    }

    /// values are per-node cell contributions (already multiplied by the weight).
    double operator()(const std::vector<double>& values) {
        const int nx = grid_.lattice_cols();
        std::fill(prefix_.begin(), prefix_.end(), 0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::size_t row = static_cast<std::size_t>(grid_.node_row(i));
            prefix_[row * (nx + 1) + grid_.node_col(i) + 1] = values[i];
        }
        for (int row = 0; row < grid_.lattice_rows(); ++row) {
            double* r = prefix_.data() + static_cast<std::size_t>(row) * (nx + 1);
            for (int c = 0; c < nx; ++c) r[c + 1] += r[c];
        }
        const std::size_t nr = table_.radii.size();
        std::vector<double> best(grid_.size(), 0.0);
        parallel_for(grid_.size(), [&](std::size_t c) {
            double m = 0;
            for (std::size_t k = 0; k < nr; ++k) {
                double s = 0;
                for (const Span& sp : table_.ball(c, k)) {
                    const double* r = prefix_.data() + static_cast<std::size_t>(sp.row) * (nx + 1);
                    s += r[sp.col_hi] - r[sp.col_lo];
                }
                m = std::max(m, scale_[c * nr + k] * s);
            }
            best[c] = m;
        });
        return *std::max_element(best.begin(), best.end());
    }

private:
    const DomainGrid& grid_;
    const BallTable& table_;
    std::vector<double> scale_;
    std::vector<double> prefix_;
};

inline std::vector<double> lambda_samples(const ExponentField& lam, const DomainGrid& grid) {
    auto v = lam.sample(grid);
    for (double x : v)
        if (!(x >= 0.0) || x > grid.dimension())
            throw ConfigurationError("Morrey exponent values must lie in [0, n]");
    return v;
}

}  // namespace detail

/// sup over node centers x and scheduled radii r of
/// r^{-lambda(x)} * rho_p(f restricted to B~(x, r)).
inline double morrey_modular(const GridFunction& f, const ExponentField& p, const ExponentField& lam) {
    const DomainGrid& g = f.grid();
    const auto ps = p.sample(g);
    detail::require_exponent_samples(ps);
    detail::MorreySup sup(g, detail::lambda_samples(lam, g));
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(f[i]);
        v[i] = a == 0.0 ? 0.0 : std::pow(a, ps[i]) * g.cell_measure();
    }
    return sup(v);
}

/// Morrey norm inf{eta > 0 : I_{p,lambda}(f / eta) <= 1}.
inline NormResult morrey_norm(const GridFunction& f, const ExponentField& p, const ExponentField& lam,
                              const UnitLevelOptions& opt = {}) {
    const DomainGrid& g = f.grid();
    const auto ps = p.sample(g);
    detail::require_exponent_samples(ps);
    const auto lams = detail::lambda_samples(lam, g);
    if (f.is_zero()) return {};
    detail::MorreySup sup(g, lams);
    std::vector<double> log_abs(g.size()), v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::abs(f[i]);
        log_abs[i] = a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a);
    }
    const double w = g.cell_measure();
    auto modular = [&](double eta) {
        const double le = std::log(eta);
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = std::isinf(log_abs[i]) ? 0.0 : std::exp(ps[i] * (log_abs[i] - le)) * w;
        return sup(v);
    };
    const double hi = f.max_abs() * (1.0 + g.measure());
    const auto r = solve_unit_level(modular, hi * 1e-3, hi, opt);
    return {r.value, r.level, r.iterations, r.bracket};
}

/// sup over node centers and scheduled radii of
/// r^{-lambda(x)/p(x)} * ||f chi_{B~(x,r)}||_p.
inline double morrey_norm_equiv(const GridFunction& f, const ExponentField& p, const ExponentField& lam,
                                const UnitLevelOptions& opt = {}) {
    const DomainGrid& g = f.grid();
    const auto ps = p.sample(g);
    detail::require_exponent_samples(ps);
    const auto lams = detail::lambda_samples(lam, g);
    if (f.is_zero()) return 0.0;
    const BallTable& table = g.balls();
    const std::size_t nr = table.radii.size();
    std::vector<double> best(g.size(), 0.0);
    parallel_for(g.size(), [&](std::size_t c) {
        double m = 0;
        for (std::size_t k = 0; k < nr; ++k) {
            const auto nodes = span_nodes(g, table.ball(c, k));
            const auto t = detail::modular_terms(f, ps, nodes);
            if (t.log_abs.empty()) continue;
            const double norm =
                detail::norm_from_terms(t, g.cell_measure() * static_cast<double>(nodes.size()), opt).value;
            m = std::max(m, std::pow(table.radii[k], -lams[c] / ps[c]) * norm);
        }
        best[c] = m;
    });
    return *std::max_element(best.begin(), best.end());
}

/// Both sides of the variable-exponent Hoelder inequality
/// int |f g| <= 4 ||f||_p ||g||_{p'}.
inline std::pair<double, double> holder_check(const GridFunction& f, const GridFunction& g, const ExponentField& p) {
    f.require_same_grid(g);
    const double lhs = integrate(f.grid(), f.times(g).abs());
    const double rhs = 4.0 * lebesgue_norm(f, p).value * lebesgue_norm(g, conjugate(p)).value;
    return {lhs, rhs};
}

/// Both sides of ||f g||_r <= K ||f||_p ||g||_q with 1/r = 1/p + 1/q.
inline std::pair<double, double> generalized_holder_check(const GridFunction& f, const GridFunction& g,
                                                          const ExponentField& p, const ExponentField& q,
                                                          double K = 4.0) {
    f.require_same_grid(g);
    const auto r = holder_sum(p, q);
    const double lhs = lebesgue_norm(f.times(g), r).value;
    const double rhs = K * lebesgue_norm(f, p).value * lebesgue_norm(g, q).value;
    return {lhs, rhs};
}

}  // namespace vexm
