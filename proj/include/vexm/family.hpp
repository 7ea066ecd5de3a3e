#pragma once

// Seeded test-function families for the ratio harness.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/grid.hpp"
#include "vexm/operators.hpp"

namespace vexm {

enum class FamilyKind { mixed, power, bump, trig, indicator, gradient_pair, potential_pair };

inline const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::mixed: return "mixed";
        case FamilyKind::power: return "power";
        case FamilyKind::bump: return "bump";
        case FamilyKind::trig: return "trig";
        case FamilyKind::indicator: return "indicator";
        case FamilyKind::gradient_pair: return "gradient-pair";
        case FamilyKind::potential_pair: return "potential-pair";
    }
    return "?";
}

inline FamilyKind family_kind_from_string(const std::string& s) {
    for (FamilyKind k : {FamilyKind::mixed, FamilyKind::power, FamilyKind::bump, FamilyKind::trig,
                         FamilyKind::indicator, FamilyKind::gradient_pair, FamilyKind::potential_pair})
        if (s == to_string(k)) return k;
    throw ConfigurationError("unknown family kind '" + s + "'");
}

struct FamilySpec {
    FamilyKind kind = FamilyKind::mixed;
    int count = 10;                   // members per sub-kind for mixed
    std::uint64_t seed = 0;
    std::vector<double> alphas;       // explicit power exponents; stratified random when empty
    std::optional<Point> center;      // indicator
    std::optional<double> radius;     // indicator
    double s = 0.25;                  // potential-pair order, f = I_{2s} g

    bool operator==(const FamilySpec&) const = default;
};

struct FamilyMember {
    std::string id;
    GridFunction f;
    std::optional<GridFunction> gradient;  // |grad f|, analytic
    std::optional<GridFunction> source;    // g with f = I_{2s} g
};

/// Case data the generator needs: the weight point and p_+ (power integrability).
struct FamilyContext {
    Point x0{0.0, 0.0};
    double p_plus = 2.0;
};

namespace detail {

// Portable uniform in [0, 1): the top 53 bits of a 64-bit Mersenne twister draw.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : eng_(seed) {}
    double operator()() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t sub_seed(std::uint64_t seed, FamilyKind k) {
    return seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(k) * 0xBF58476D1CE4E5B9ull + 1;
}

inline Point random_point(const Domain& d, Uniform& u) {
    switch (d.shape) {
        case Shape::interval: return {u(d.bounds[0], d.bounds[1]), 0.0};
        case Shape::rectangle: return {u(d.bounds[0], d.bounds[1]), u(d.bounds[2], d.bounds[3])};
        case Shape::disk:
            for (;;) {
                const Point p{u(-1.0, 1.0), u(-1.0, 1.0)};
                if (p[0] * p[0] + p[1] * p[1] < 1.0)
                    return {d.bounds[0] + d.bounds[2] * p[0], d.bounds[1] + d.bounds[2] * p[1]};
            }
    }
    return {0.0, 0.0};
}

inline FamilyMember normalized(std::string id, GridFunction f, std::optional<GridFunction> grad = std::nullopt) {
    const double m = f.max_abs();
    if (m > 0) {
        f = f.scaled(1.0 / m);
        if (grad) grad = grad->scaled(1.0 / m);
    }
    return {std::move(id), std::move(f), std::move(grad), std::nullopt};
}

inline std::vector<FamilyMember> powers(const FamilySpec& spec, const GridPtr& grid, const FamilyContext& ctx) {
    const double n = grid->dimension();
    std::vector<double> alphas = spec.alphas;
    if (alphas.empty()) {
        Uniform u(sub_seed(spec.seed, FamilyKind::power));
        const double lo = -0.4 * n / ctx.p_plus, hi = 2.0;
        for (int i = 0; i < spec.count; ++i) alphas.push_back(lo + (i + u()) / spec.count * (hi - lo));
    }
    std::vector<FamilyMember> out;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double alpha = alphas[i];
        if (!(alpha * ctx.p_plus > -n))
            throw ConfigurationError("power exponent " + std::to_string(alpha) + " is not p-integrable at x0");
        out.push_back(normalized("power-" + std::to_string(i), weight_power(grid, ctx.x0, alpha)));
    }
    return out;
}

// exp(1 - 1/(1 - t^2)) for t = |x - c| / w < 1, with its radial derivative.
inline std::vector<FamilyMember> bumps(const FamilySpec& spec, const GridPtr& grid, bool with_gradient) {
    Uniform u(sub_seed(spec.seed, FamilyKind::bump));
    const Domain& d = grid->domain();
    const int dim = grid->dimension();
    std::vector<FamilyMember> out;
    for (int i = 0; i < spec.count; ++i) {
        const Point c = random_point(d, u);
        const double w = std::max(3.0 * grid->spacing(), u(0.1, 0.5) * d.diameter());
        std::vector<double> v(grid->size(), 0.0), g(grid->size(), 0.0);
        for (std::size_t k = 0; k < grid->size(); ++k) {
            const double t = distance(grid->node(k), c, dim) / w;
            if (t >= 1.0) continue;
            const double e = 1.0 - t * t;
            v[k] = std::exp(1.0 - 1.0 / e);
            g[k] = v[k] * 2.0 * t / (e * e) / w;
        }
        GridFunction f(grid, std::move(v));
        out.push_back(normalized("bump-" + std::to_string(i), std::move(f),
                                 with_gradient ? std::optional<GridFunction>(GridFunction(grid, std::move(g)))
                                               : std::nullopt));
    }
    return out;
}

// sum over a few modes of c cos(pi k.x / L + phi) / (1 + |k|)
inline std::vector<FamilyMember> trigs(const FamilySpec& spec, const GridPtr& grid) {
    Uniform u(sub_seed(spec.seed, FamilyKind::trig));
    const double L = 0.5 * grid->diameter();
    const bool two_d = grid->dimension() == 2;
    std::vector<FamilyMember> out;
    for (int i = 0; i < spec.count; ++i) {
        struct Mode {
            double k1, k2, c, phi;
        };
        std::vector<Mode> modes;
        for (int k = 1; k <= 5; ++k) {
            const double k2 = two_d ? std::floor(u(0.0, 4.0)) : 0.0;
            modes.push_back({static_cast<double>(k), k2, u(-1.0, 1.0), u(0.0, 2.0 * std::numbers::pi)});
        }
        auto f = GridFunction::sample(grid, [&](const Point& x) {
            double s = 0;
            for (const auto& m : modes)
                s += m.c * std::cos(std::numbers::pi * (m.k1 * x[0] + m.k2 * x[1]) / L + m.phi) /
                     (1.0 + m.k1 + m.k2);
            return s;
        });
        out.push_back(normalized("trig-" + std::to_string(i), std::move(f)));
    }
    return out;
}

inline std::vector<FamilyMember> indicators(const FamilySpec& spec, const GridPtr& grid) {
    Uniform u(sub_seed(spec.seed, FamilyKind::indicator));
    const Domain& d = grid->domain();
    const int dim = grid->dimension();
    std::vector<FamilyMember> out;
    const int count = spec.center && spec.radius ? 1 : spec.count;
    for (int i = 0; i < count; ++i) {
        const Point z = spec.center ? *spec.center : random_point(d, u);
        const double r = spec.radius ? *spec.radius : u(0.05, 0.5) * d.diameter();
        if (!(r > 0)) throw ConfigurationError("indicator radius must be positive");
        auto f = GridFunction::sample(grid, [&](const Point& x) { return distance(x, z, dim) < r ? 1.0 : 0.0; });
        out.push_back({"indicator-" + std::to_string(i), std::move(f), std::nullopt, std::nullopt});
    }
    return out;
}

}  // namespace detail

/// Members of the requested family; identical for identical (spec, grid).
inline std::vector<FamilyMember> generate_family(const FamilySpec& spec, const GridPtr& grid,
                                                 const FamilyContext& ctx = {}) {
    if (spec.count < 1 && spec.alphas.empty()) throw ConfigurationError("family count must be positive");
    switch (spec.kind) {
        case FamilyKind::power: return detail::powers(spec, grid, ctx);
        case FamilyKind::bump: return detail::bumps(spec, grid, false);
        case FamilyKind::trig: return detail::trigs(spec, grid);
        case FamilyKind::indicator: return detail::indicators(spec, grid);
        case FamilyKind::gradient_pair: return detail::bumps(spec, grid, true);
        case FamilyKind::mixed: {
            auto out = detail::powers(spec, grid, ctx);
            for (auto& m : detail::bumps(spec, grid, false)) out.push_back(std::move(m));
            for (auto& m : detail::trigs(spec, grid)) out.push_back(std::move(m));
            return out;
        }
        case FamilyKind::potential_pair: {
            if (!(spec.s > 0 && 2.0 * spec.s < grid->dimension()))
                throw ConfigurationError("potential-pair needs 0 < 2s < n");
            FamilySpec base = spec;
            base.kind = FamilyKind::mixed;
            auto out = generate_family(base, grid, ctx);
            for (auto& m : out) {
                m.source = m.f;
                m.f = fractional_integral(m.f, 2.0 * spec.s);
            }
            return out;
        }
    }
    throw ConfigurationError("unknown family kind");
}

}  // namespace vexm
