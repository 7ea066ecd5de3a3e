#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/grid.hpp"

namespace vexm {

enum class ExponentKind { constant, affine, sine, table, derived };

inline const char* to_string(ExponentKind k) {
    switch (k) {
        case ExponentKind::constant: return "constant";
        case ExponentKind::affine: return "affine";
        case ExponentKind::sine: return "sine";
        case ExponentKind::table: return "table";
        case ExponentKind::derived: return "derived";
    }
    return "?";
}

/// Declarative parameters of an exponent field, kept for serialization.
struct ExponentSpec {
    ExponentKind kind = ExponentKind::constant;
    double value = 0;                 // constant value, or the offset c of affine/sine
    std::array<double, 2> slope{};    // affine: c + slope . x
    double amplitude = 0;             // sine: c + A sin(w (x1 + x2) + phi)
    double frequency = 0;
    double phase = 0;
    std::vector<Point> points;        // table: nearest-node lookup
    std::vector<double> values;
    std::string description;          // derived fields only
};

/// An exponent function p(.), q(.) or lambda(.) on a domain.
///
/// Values are produced by an analytic evaluator and clamped to the declared
/// range. Fields are immutable and cheap to copy.
class ExponentField {
public:
    using Evaluator = std::function<double(const Point&)>;

    static ExponentField constant(double v) {
        ExponentSpec spec;
        spec.kind = ExponentKind::constant;
        spec.value = v;
        return ExponentField(std::move(spec), [v](const Point&) { return v; }, v, v);
    }

    /// c + slope . x; the range is taken over the domain's closure.
    static ExponentField affine(double c, std::array<double, 2> slope, const Domain& domain) {
        ExponentSpec spec;
        spec.kind = ExponentKind::affine;
        spec.value = c;
        spec.slope = slope;
        if (domain.dimension() == 1) spec.slope[1] = 0.0;
        const auto s = spec.slope;
        double lo = 0, hi = 0;
        const auto& b = domain.bounds;
        switch (domain.shape) {
            case Shape::interval:
                lo = std::min(c + s[0] * b[0], c + s[0] * b[1]);
                hi = std::max(c + s[0] * b[0], c + s[0] * b[1]);
                break;
            case Shape::rectangle: {
                const double vx = std::abs(s[0]) * 0.5 * (b[1] - b[0]);
                const double vy = std::abs(s[1]) * 0.5 * (b[3] - b[2]);
                const double mid = c + s[0] * 0.5 * (b[0] + b[1]) + s[1] * 0.5 * (b[2] + b[3]);
                lo = mid - vx - vy;
                hi = mid + vx + vy;
                break;
            }
            case Shape::disk: {
                const double mid = c + s[0] * b[0] + s[1] * b[1];
                const double v = std::hypot(s[0], s[1]) * b[2];
                lo = mid - v;
                hi = mid + v;
                break;
            }
        }
        ExponentField f(std::move(spec), [c, s](const Point& x) { return c + s[0] * x[0] + s[1] * x[1]; },
                        lo, hi);
        f.domain_ = domain;
        return f;
    }

    /// c + A sin(w (x1 + x2) + phi).
    static ExponentField sine(double c, double amplitude, double frequency, double phase) {
        ExponentSpec spec;
        spec.kind = ExponentKind::sine;
        spec.value = c;
        spec.amplitude = amplitude;
        spec.frequency = frequency;
        spec.phase = phase;
        const double a = std::abs(amplitude);
        return ExponentField(
            std::move(spec),
            [c, amplitude, frequency, phase](const Point& x) {
                return c + amplitude * std::sin(frequency * (x[0] + x[1]) + phase);
            },
            c - a, c + a);
    }

    /// Tabulated values; evaluation returns the value at the nearest table
    /// point (lowest index on ties).
    static ExponentField table(std::vector<Point> points, std::vector<double> values, int dim) {
        if (points.empty() || points.size() != values.size())
            throw ConfigurationError("table exponent needs matching, nonempty points and values");
        ExponentSpec spec;
        spec.kind = ExponentKind::table;
        spec.points = points;
        spec.values = values;
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        const double lo = *mn, hi = *mx;
        auto pts = std::make_shared<const std::vector<Point>>(std::move(points));
        auto vals = std::make_shared<const std::vector<double>>(std::move(values));
        return ExponentField(
            std::move(spec),
            [pts, vals, dim](const Point& x) {
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < pts->size(); ++i) {
                    const double d = distance((*pts)[i], x, dim);
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                return (*vals)[best];
            },
            lo, hi);
    }

    /// A field computed from other fields. [lo, hi] must contain every value.
    static ExponentField derived(std::string description, Evaluator fn, double lo, double hi) {
        ExponentSpec spec;
        spec.kind = ExponentKind::derived;
        spec.description = std::move(description);
        return ExponentField(std::move(spec), std::move(fn), lo, hi);
    }

    ExponentKind kind() const { return spec_.kind; }
    const ExponentSpec& spec() const { return spec_; }
    bool is_constant() const { return spec_.kind == ExponentKind::constant; }
    double constant_value() const { return spec_.value; }
    /// Declared range [lo, hi].
    std::pair<double, double> range() const { return {lo_, hi_}; }

    /// Restricts evaluation to the closure of `domain`.
    ExponentField on(const Domain& domain) const {
        ExponentField f = *this;
        f.domain_ = domain;
        return f;
    }
    const std::optional<Domain>& domain() const { return domain_; }

    /// Value at x clamped to the declared range; x must lie in the closure of
    /// the attached domain, when one is attached.
    double eval(const Point& x) const {
        if (domain_ && !domain_->contains_closure(x))
            throw DomainError("exponent evaluated at " + format_point(x, domain_->dimension()) +
                              " outside its domain");
        return value(x);
    }

    /// Unchecked evaluation.
    double value(const Point& x) const { return std::clamp((*fn_)(x), lo_, hi_); }

    std::vector<double> sample(const DomainGrid& grid) const {
        std::vector<double> v(grid.size());
        if (is_constant()) {
            std::fill(v.begin(), v.end(), spec_.value);
            return v;
        }
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(grid.node(i));
        return v;
    }

private:
    ExponentField(ExponentSpec spec, Evaluator fn, double lo, double hi)
        : spec_(std::move(spec)), fn_(std::make_shared<const Evaluator>(std::move(fn))), lo_(lo), hi_(hi) {
        if (!(lo_ <= hi_)) throw ConfigurationError("exponent range is empty");
    }

    ExponentSpec spec_;
    std::shared_ptr<const Evaluator> fn_;
    double lo_ = 0, hi_ = 0;
    std::optional<Domain> domain_;
};

/// Pointwise value at a point.
inline double eval(const ExponentField& field, const Point& x) { return field.eval(x); }

/// (min, max) over the grid nodes, standing in for ess inf / ess sup.
inline std::pair<double, double> bounds(const ExponentField& field, const DomainGrid& grid) {
    const auto v = field.sample(grid);
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    return {*mn, *mx};
}

/// Lebesgue exponents need 1 <= p_- and p_+ < infinity.
inline void require_lebesgue_exponent(const ExponentField& p, const std::string& name) {
    const auto [lo, hi] = p.range();
    if (lo < 1.0 || !std::isfinite(hi))
        throw ConfigurationError("exponent '" + name + "' must take values in [1, infinity)");
}

/// Morrey exponents need 0 <= lambda_- and lambda_+ <= n.
inline void require_morrey_exponent(const ExponentField& lam, int n, const std::string& name) {
    const auto [lo, hi] = lam.range();
    if (lo < 0.0 || hi > n)
        throw ConfigurationError("exponent '" + name + "' must take values in [0, n]");
}

/// p'(x) = p(x) / (p(x) - 1).
inline ExponentField conjugate(const ExponentField& p) {
    const auto [lo, hi] = p.range();
    if (lo <= 1.0 + 1e-9)
        throw DegenerateExponentError("conjugate exponent needs p > 1 everywhere (p_- = " +
                                      std::to_string(lo) + ")");
    ExponentField out = [&] {
        if (p.is_constant()) {
            const double v = p.constant_value();
            return ExponentField::constant(v / (v - 1.0));
        }
        return ExponentField::derived(
            "conjugate", [p](const Point& x) { const double v = p.value(x); return v / (v - 1.0); },
            hi / (hi - 1.0), lo / (lo - 1.0));
    }();
    return p.domain() ? out.on(*p.domain()) : out;
}

/// lambda(x) / p(x).
inline ExponentField lambda_over_p(const ExponentField& lam, const ExponentField& p) {
    const auto [plo, phi] = p.range();
    if (plo < 1.0) throw ConfigurationError("lambda_over_p needs p >= 1");
    const auto [llo, lhi] = lam.range();
    ExponentField out = [&] {
        if (lam.is_constant() && p.is_constant())
            return ExponentField::constant(lam.constant_value() / p.constant_value());
        const double lo = std::min(llo / phi, llo / plo);
        const double hi = std::max(lhi / plo, lhi / phi);
        return ExponentField::derived(
            "lambda/p", [lam, p](const Point& x) { return lam.value(x) / p.value(x); }, lo, hi);
    }();
    if (lam.domain()) return out.on(*lam.domain());
    return p.domain() ? out.on(*p.domain()) : out;
}

/// r(.) with 1/r = 1/p + 1/q.
inline ExponentField holder_sum(const ExponentField& p, const ExponentField& q) {
    if (p.is_constant() && q.is_constant())
        return ExponentField::constant(1.0 / (1.0 / p.constant_value() + 1.0 / q.constant_value()));
    const auto [plo, phi] = p.range();
    const auto [qlo, qhi] = q.range();
    return ExponentField::derived(
        "holder_sum", [p, q](const Point& x) { return 1.0 / (1.0 / p.value(x) + 1.0 / q.value(x)); },
        1.0 / (1.0 / plo + 1.0 / qlo), 1.0 / (1.0 / phi + 1.0 / qhi));
}

struct LogHolderReport {
    double c0_estimate = 0;
    std::pair<Point, Point> worst_pair{};
    bool is_finite = true;
    std::size_t pairs_examined = 0;
    bool subsampled = false;
};

struct LogHolderOptions {
    double cap = 10.0;                 // estimates above this are reported as not finite
    std::size_t all_pairs_limit = 2000;
    std::size_t sampled_pairs = 1'000'000;
    std::uint64_t seed = 0;
};

/// Empirical log-Hoelder constant: max over node pairs with 0 < |x-y| < 1/2
/// of |r(x) - r(y)| * (-log |x-y|). Above `all_pairs_limit` nodes a fixed-seed
/// uniform sample of pairs is used instead.
inline LogHolderReport lh0_modulus(const ExponentField& field, const DomainGrid& grid,
                                   const LogHolderOptions& opt = {}) {
    if (grid.size() < 2) throw PreconditionError("lh0_modulus needs at least two nodes");
    LogHolderReport rep;
    if (field.is_constant()) return rep;
    const auto v = field.sample(grid);
    const int dim = grid.dimension();
    auto visit = [&](std::size_t i, std::size_t j) {
        const double d = distance(grid.node(i), grid.node(j), dim);
        if (!(d > 0.0) || d >= 0.5) return;
        ++rep.pairs_examined;
        const double est = std::abs(v[i] - v[j]) * (-std::log(d));
        if (est > rep.c0_estimate) {
            rep.c0_estimate = est;
            rep.worst_pair = {grid.node(i), grid.node(j)};
        }
    };
    const std::size_t n = grid.size();
    if (n <= opt.all_pairs_limit) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
    } else {
        rep.subsampled = true;
        std::mt19937_64 rng(opt.seed);
        for (std::size_t s = 0; s < opt.sampled_pairs; ++s) {
            const std::size_t i = rng() % n;
            const std::size_t j = rng() % n;
            visit(i, j);
        }
    }
    rep.is_finite = rep.c0_estimate <= opt.cap;
    return rep;
}

}  // namespace vexm
