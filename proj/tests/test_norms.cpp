#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "vexm/norms.hpp"

using namespace vexm;

namespace {

const Domain kInterval = Domain::interval(-1, 1);

// Brute-force Morrey modular: every node center, every scheduled radius,
// nodes found by a direct distance scan.
double morrey_oracle(const GridFunction& f, const ExponentField& p, const ExponentField& lam) {
    const DomainGrid& g = f.grid();
    double best = 0;
    for (std::size_t c = 0; c < g.size(); ++c)
        for (double r : radii_schedule(g)) {
            double s = 0;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (distance(g.node(i), g.node(c), g.dimension()) < r)
                    s += std::pow(std::abs(f[i]), p.value(g.node(i))) * g.cell_measure();
            best = std::max(best, std::pow(r, -lam.value(g.node(c))) * s);
        }
    return best;
}

GridFunction random_trig(const GridPtr& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c[4], w[4], ph[4];
    for (int k = 0; k < 4; ++k) c[k] = u(rng), w[k] = 6.0 * u(rng), ph[k] = 3.0 * u(rng);
    return GridFunction::sample(g, [&](const Point& x) {
        double s = 0;
        for (int k = 0; k < 4; ++k) s += c[k] * std::sin(w[k] * (x[0] + 0.7 * x[1]) + ph[k]);
        return s;
    });
}

ExponentField random_exponent(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double amp = 0.5 * (hi - lo) * u(rng);
    return ExponentField::sine(lo + amp + (hi - lo - 2 * amp) * u(rng), amp, 0.5 + 3 * u(rng), 6 * u(rng));
}

}  // namespace

TEST(Norms, LebesgueModularExamples) {
    const auto g = build_grid(kInterval, 100);
    EXPECT_NEAR(lebesgue_modular(GridFunction::constant(g, 1.0), ExponentField::constant(2.0)), 2.0, 1e-12);
    EXPECT_NEAR(lebesgue_modular(GridFunction::constant(g, 2.0), ExponentField::constant(2.0)), 8.0, 1e-12);
}

TEST(Norms, LebesgueModularMatchesAdaptiveQuadrature) {
    const auto g = build_grid(kInterval, 2000);
    const auto f = GridFunction::sample(g, [](const Point& x) { return std::sqrt(std::abs(x[0])); });
    const auto p = ExponentField::affine(2.0, {1.0, 0.0}, kInterval);
    auto integrand = [](double x) { return std::pow(std::abs(x), 0.5 * (2.0 + x)); };
    using boost::math::quadrature::gauss_kronrod;
    const double ref = gauss_kronrod<double, 61>::integrate(integrand, -1.0, 0.0, 15, 1e-13) +
                       gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-13);
    EXPECT_NEAR(lebesgue_modular(f, p) / ref, 1.0, 1e-4);
}

TEST(Norms, LebesgueModularZeroIffZero) {
    const auto g = build_grid(kInterval, 50);
    const auto p = ExponentField::constant(1.5);
    EXPECT_EQ(lebesgue_modular(GridFunction::constant(g, 0.0), p), 0.0);
    std::vector<double> v(g->size(), 0.0);
    v[7] = 1e-3;
    EXPECT_GT(lebesgue_modular(GridFunction(g, v), p), 0.0);
}

TEST(Norms, LebesgueNormIndicator) {
    const auto g = build_grid(kInterval, 100);
    const auto r = lebesgue_norm(GridFunction::constant(g, 1.0), ExponentField::constant(2.0));
    EXPECT_NEAR(r.value, std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(r.modular_at_value, 1.0, 1e-8);
    EXPECT_LE(r.bracket.first, r.value);
    EXPECT_GE(r.bracket.second, r.value);
    EXPECT_GT(r.bisection_iterations, 0);
}

TEST(Norms, LebesgueNormZero) {
    const auto g = build_grid(kInterval, 10);
    EXPECT_EQ(lebesgue_norm(GridFunction::constant(g, 0.0), ExponentField::constant(2.0)).value, 0.0);
}

TEST(Norms, LebesgueNormPowerClosedForm) {
    const auto g = build_grid(kInterval, 2000);
    const auto f = GridFunction::sample(g, [](const Point& x) { return std::abs(x[0]); });
    EXPECT_NEAR(lebesgue_norm(f, ExponentField::constant(2.0)).value, std::sqrt(2.0 / 3.0), 1e-3);
}

TEST(Norms, LebesgueNormOnSubset) {
    const auto g = build_grid(kInterval, 200);
    const auto b = ball_subset(*g, {0, 0}, 0.5);
    const double m = g->cell_measure() * static_cast<double>(b.node_indices.size());
    const auto r = lebesgue_norm(GridFunction::constant(g, 1.0), ExponentField::constant(3.0), b);
    EXPECT_NEAR(r.value, std::cbrt(m), 1e-9);
}

TEST(Norms, MorreyLambdaZeroIsLebesgueModular) {
    const auto g = build_grid(kInterval, 80);
    std::mt19937_64 rng(1);
    const auto f = random_trig(g, rng);
    const auto p = ExponentField::affine(1.8, {0.3, 0.0}, kInterval);
    const auto zero = ExponentField::constant(0.0);
    EXPECT_NEAR(morrey_modular(f, p, zero), lebesgue_modular(f, p), 1e-12);
    EXPECT_NEAR(morrey_norm(f, ExponentField::constant(2.0), zero).value,
                lebesgue_norm(f, ExponentField::constant(2.0)).value, 1e-6);
}

TEST(Norms, MorreyModularIndicatorMatchesEnumeration) {
    const auto g = build_grid(kInterval, 60);
    const auto one = GridFunction::constant(g, 1.0);
    const auto p = ExponentField::constant(2.0), lam = ExponentField::constant(0.5);
    EXPECT_NEAR(morrey_modular(one, p, lam), morrey_oracle(one, p, lam), 1e-12);
    EXPECT_NEAR(morrey_norm(one, p, lam).value, std::sqrt(morrey_oracle(one, p, lam)), 1e-8);
}

TEST(Norms, MorreyModularSingleCell) {
    const auto g = build_grid(kInterval, 40);
    std::vector<double> v(g->size(), 0.0);
    v[13] = 2.0;
    const GridFunction f(g, v);
    const auto p = ExponentField::constant(1.5), lam = ExponentField::constant(0.7);
    // best ball is the smallest scheduled radius that still sees the cell
    const double want = std::pow(2.0, 1.5) * g->cell_measure() * std::pow(radii_schedule(*g)[0], -0.7);
    EXPECT_NEAR(morrey_modular(f, p, lam), want, 1e-12);
    EXPECT_NEAR(morrey_oracle(f, p, lam), want, 1e-12);
}

TEST(NormsProperty, MorreyModularMatchesBruteForce) {
    std::mt19937_64 rng(2);
    for (const auto& d : {kInterval, Domain::rectangle(0, 1, 0, 1), Domain::disk(0, 0, 1)}) {
        const auto g = build_grid(d, d.dimension() == 1 ? 70 : 12);
        for (int k = 0; k < 5; ++k) {
            const auto f = random_trig(g, rng);
            const auto p = random_exponent(rng, 1.1, 3.0);
            const auto lam = random_exponent(rng, 0.0, d.dimension() - 0.05);
            const double a = morrey_modular(f, p, lam), b = morrey_oracle(f, p, lam);
            EXPECT_NEAR(a / b, 1.0, 1e-12);
        }
    }
}

TEST(Norms, MorreyNormZero) {
    const auto g = build_grid(kInterval, 10);
    const auto z = GridFunction::constant(g, 0.0);
    EXPECT_EQ(morrey_norm(z, ExponentField::constant(2.0), ExponentField::constant(0.5)).value, 0.0);
    EXPECT_EQ(morrey_norm_equiv(z, ExponentField::constant(2.0), ExponentField::constant(0.5)), 0.0);
}

TEST(Norms, MorreyEquivIndicatorLambdaZero) {
    const auto g = build_grid(kInterval, 100);
    EXPECT_NEAR(morrey_norm_equiv(GridFunction::constant(g, 1.0), ExponentField::constant(2.0),
                                  ExponentField::constant(0.0)),
                std::sqrt(2.0), 1e-6);
}

TEST(NormsProperty, MorreyEquivComparableForConstantExponents) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 10; ++k) {
        const auto g = build_grid(kInterval, 60);
        const auto f = random_trig(g, rng);
        const auto p = ExponentField::constant(1.1 + 2 * u(rng));
        const auto lam = ExponentField::constant(0.9 * u(rng));
        const double ratio = morrey_norm_equiv(f, p, lam) / morrey_norm(f, p, lam).value;
        EXPECT_GE(ratio, 0.5);
        EXPECT_LE(ratio, 2.0);
    }
}

TEST(NormsProperty, UnitModular) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) {
        const auto g = build_grid(k % 2 ? kInterval : Domain::rectangle(0, 1, 0, 1), k % 2 ? 120 : 14);
        const auto f = random_trig(g, rng).scaled(std::pow(10.0, 3 * (k % 5) - 6));
        const auto p = random_exponent(rng, 1.05, 4.0);
        const auto lam = random_exponent(rng, 0.0, g->dimension() - 0.1);
        const auto l = lebesgue_norm(f, p);
        EXPECT_NEAR(lebesgue_modular(f.scaled(1.0 / l.value), p), 1.0, 1e-8);
        const auto m = morrey_norm(f, p, lam);
        EXPECT_NEAR(morrey_modular(f.scaled(1.0 / m.value), p, lam), 1.0, 1e-8);
    }
}

TEST(NormsProperty, Homogeneity) {
    std::mt19937_64 rng(5);
    const auto g = build_grid(kInterval, 100);
    const auto f = random_trig(g, rng);
    const auto p = random_exponent(rng, 1.2, 3.0), lam = random_exponent(rng, 0.0, 0.9);
    const double l = lebesgue_norm(f, p).value, m = morrey_norm(f, p, lam).value;
    for (double c : {0.1, 3.0, 100.0}) {
        EXPECT_NEAR(lebesgue_norm(f.scaled(c), p).value / (c * l), 1.0, 1e-8);
        EXPECT_NEAR(morrey_norm(f.scaled(-c), p, lam).value / (c * m), 1.0, 1e-8);
    }
}

TEST(NormsProperty, Monotonicity) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    const auto g = build_grid(kInterval, 90);
    for (int k = 0; k < 20; ++k) {
        const auto gf = random_trig(g, rng);
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = gf[i] * u(rng);
        const GridFunction f(g, v);
        const auto p = random_exponent(rng, 1.1, 3.0), lam = random_exponent(rng, 0.0, 0.9);
        EXPECT_LE(lebesgue_norm(f, p).value, lebesgue_norm(gf, p).value * (1 + 1e-8));
        EXPECT_LE(morrey_norm(f, p, lam).value, morrey_norm(gf, p, lam).value * (1 + 1e-8));
    }
}

TEST(NormsProperty, ModularNormEquivalence) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        const auto g = build_grid(kInterval, 80);
        const auto f = random_trig(g, rng).scaled(std::pow(4.0, k % 4 - 1.0));
        const auto p = random_exponent(rng, 1.1, 3.5), lam = random_exponent(rng, 0.0, 0.9);
        const auto [p_lo, p_hi] = bounds(p, *g);
        const double mod = morrey_modular(f, p, lam), norm = morrey_norm(f, p, lam).value;
        const double c2 = std::max(1.0, mod), c1 = std::max(1.0, norm);
        EXPECT_LE(norm, std::pow(c2, 1.0 / p_lo) * (1 + 1e-8));
        EXPECT_LE(mod, std::pow(c1, p_hi) * (1 + 1e-8));
    }
}

TEST(Norms, HolderConstants) {
    const auto g = build_grid(kInterval, 100);
    const auto one = GridFunction::constant(g, 1.0);
    const auto [lhs, rhs] = holder_check(one, one, ExponentField::constant(2.0));
    EXPECT_NEAR(lhs, 2.0, 1e-12);
    EXPECT_NEAR(rhs, 8.0, 1e-8);
    const auto z = holder_check(GridFunction::constant(g, 0.0), one, ExponentField::constant(2.0));
    EXPECT_EQ(z.first, 0.0);
    EXPECT_EQ(z.second, 0.0);
}

TEST(NormsProperty, HolderInequality) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        const auto g = build_grid(k % 4 ? kInterval : Domain::rectangle(0, 1, 0, 1), k % 4 ? 100 : 10);
        const auto f = random_trig(g, rng), h = random_trig(g, rng);
        const auto [lhs, rhs] = holder_check(f, h, random_exponent(rng, 1.1, 6.0));
        EXPECT_LE(lhs, rhs * (1 + 1e-6));
    }
}

TEST(NormsProperty, GeneralizedHolderWithKFour) {
    std::mt19937_64 rng(9);
    const auto g = build_grid(kInterval, 100);
    for (int k = 0; k < 30; ++k) {
        const auto f = random_trig(g, rng), h = random_trig(g, rng);
        // keeps 1/r = 1/p + 1/q <= 1
        const auto [lhs, rhs] =
            generalized_holder_check(f, h, random_exponent(rng, 2.0, 6.0), random_exponent(rng, 2.0, 6.0));
        EXPECT_LE(lhs, rhs);
    }
}

TEST(NormsProperty, CharacteristicFunctionNorm) {
    std::mt19937_64 rng(10);
    for (const auto& d : {kInterval, Domain::interval(0, 0.3), Domain::rectangle(0, 2, 0, 3), Domain::disk(0, 0, 0.5)}) {
        const auto g = build_grid(d, d.dimension() == 1 ? 200 : 20);
        for (int k = 0; k < 10; ++k)
            EXPECT_LE(lebesgue_norm(GridFunction::constant(g, 1.0), random_exponent(rng, 1.0, 8.0)).value,
                      1.0 + g->measure());
    }
}
