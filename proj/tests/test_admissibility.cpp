#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vexm/admissibility.hpp"

using namespace vexm;

namespace {

const Domain kInterval = Domain::interval(-1, 1);

InequalityCase pinned_case() {
    InequalityCase c;
    c.id = "pinned";
    c.theorem = Theorem::MainMorrey;
    c.gamma = 0.5;
    c.a = c.b = 0.0;
    c.p = ExponentField::constant(1.25);
    c.lam = ExponentField::constant(0.2);
    return c;
}

bool fails(const AdmissibilityVerdict& v, const std::string& name) {
    const auto* k = v.find(name);
    return k && !k->satisfied;
}

}  // namespace

TEST(Admissibility, SolveQPinnedCase) {
    const auto g = build_grid(kInterval, 100);
    const auto q = solve_q_from_condD(ExponentField::constant(1.25), ExponentField::constant(0.2), 0.5, 0, 0, *g);
    ASSERT_TRUE(q.is_constant());
    EXPECT_NEAR(q.constant_value(), 40.0 / 7.0, 1e-12);
}

TEST(Admissibility, SolveQIsPWhenGapVanishes) {
    const auto g = build_grid(kInterval, 100);
    const auto p = ExponentField::affine(2.0, {0.3, 0}, kInterval);
    const auto q = solve_q_from_condD(p, ExponentField::constant(0.4), 0.3, 0.0, 0.3, *g);
    const auto ps = p.sample(*g), qs = q.sample(*g);
    for (std::size_t i = 0; i < ps.size(); ++i) EXPECT_EQ(ps[i], qs[i]);
}

TEST(Admissibility, SolveQBlowsUpAtConditionCBoundary) {
    const auto g = build_grid(kInterval, 100);
    // n - gamma p - lambda = 1 - 0.5 * 1.6 - 0.2 = 0
    try {
        solve_q_from_condD(ExponentField::constant(1.6), ExponentField::constant(0.2), 0.5, 0, 0, *g);
        FAIL() << "expected an inadmissible-exponent error";
    } catch (const InadmissibleExponentError& e) {
        EXPECT_NE(std::string(e.what()).find("at node"), std::string::npos) << e.what();
    }
    // variable p crossing the boundary: the worst node is the right end
    try {
        solve_q_from_condD(ExponentField::affine(1.5, {0.3, 0}, kInterval), ExponentField::constant(0.2), 0.5, 0, 0,
                           *g);
        FAIL() << "expected an inadmissible-exponent error";
    } catch (const InadmissibleExponentError& e) {
        EXPECT_NE(std::string(e.what()).find("0.99"), std::string::npos) << e.what();
    }
}

TEST(AdmissibilityProperty, SolveQRoundTripResidual) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int solved = 0;
    for (int k = 0; k < 100; ++k) {
        const bool two_d = k % 4 == 0;
        const auto g = two_d ? build_grid(Domain::rectangle(0, 1, 0, 1), 12) : build_grid(kInterval, 80);
        const double n = g->dimension();
        const auto p = ExponentField::sine(1.3 + u(rng), 0.2 * u(rng), 3 * u(rng), 6 * u(rng));
        const auto lam = ExponentField::sine(0.2 + 0.5 * n * u(rng), 0.1 * u(rng), 3 * u(rng), 6 * u(rng));
        const double gamma = 0.1 + 0.5 * u(rng), a = -0.1 * u(rng), b = a + gamma * u(rng);
        try {
            const auto q = solve_q_from_condD(p, lam, gamma, a, b, *g);
            EXPECT_LE(condD_residual(p, q, lam, gamma, a, b, *g), 1e-12);
            ++solved;
        } catch (const InadmissibleExponentError&) {
        }
    }
    EXPECT_GE(solved, 50);
}

TEST(Admissibility, PinnedCaseVerdict) {
    const auto g = build_grid(kInterval, 100);
    const auto v = check_main(pinned_case(), *g);
    EXPECT_TRUE(v.overall) << testing::PrintToString(v.failed());
    ASSERT_NE(v.find("condA"), nullptr);
    EXPECT_EQ(v.find("condA")->margin, 0.0);
    EXPECT_TRUE(v.find("condA")->satisfied);
    EXPECT_NEAR(v.find("condC")->margin, 0.175, 1e-12);
    EXPECT_NEAR(v.derived.at("q"), 40.0 / 7.0, 1e-12);
    EXPECT_DOUBLE_EQ(v.derived.at("sigma"), 0.5);
    EXPECT_LE(std::abs(v.find("condD")->margin), 1e-12);
    EXPECT_EQ(v.diagnostics.at("c0_p"), 0.0);
}

TEST(Admissibility, OverallIsConjunction) {
    const auto g = build_grid(kInterval, 50);
    auto c = pinned_case();
    for (double b : {0.0, 0.1, 0.3, -0.1}) {
        c.b = b;
        const auto v = check_main(c, *g);
        bool all = true;
        for (const auto& k : v.conditions) all = all && k.satisfied;
        EXPECT_EQ(v.overall, all);
    }
}

TEST(Admissibility, AGreaterThanBFailsConditionA) {
    const auto g = build_grid(kInterval, 50);
    auto c = pinned_case();
    c.a = 0.1;
    const auto v = check_main(c, *g);
    EXPECT_FALSE(v.overall);
    EXPECT_TRUE(fails(v, "condA"));
}

TEST(Admissibility, ConditionBIsStrict) {
    const auto g = build_grid(kInterval, 50);
    auto c = pinned_case();
    c.b = 0.2;  // n / (p')_+ with p = 1.25, p' = 5
    const auto v = check_main(c, *g);
    EXPECT_FALSE(v.overall);
    EXPECT_TRUE(fails(v, "condB"));
    EXPECT_NEAR(v.find("condB")->margin, 0.0, 1e-15);
    EXPECT_TRUE(v.find("condB")->strict);
}

TEST(Admissibility, CenterOutsideDomainFails) {
    const auto g = build_grid(kInterval, 50);
    auto c = pinned_case();
    c.x0 = Point{1.0, 0.0};
    EXPECT_TRUE(fails(check_main(c, *g), "x0_in_domain"));
}

TEST(Admissibility, DeriveSigma) {
    EXPECT_DOUBLE_EQ(derive_sigma(0.5, 0.1, 0.1), 0.5);
    EXPECT_DOUBLE_EQ(derive_sigma(0.5, 0.0, 0.5), 0.0);
    EXPECT_NEAR(derive_sigma(0.7, 0.0, 0.2), 0.5, 1e-15);
    EXPECT_THROW(derive_sigma(0.5, 0.0, 0.6), PreconditionError);
}

TEST(Admissibility, GagliardoNirenbergExponent) {
    const auto g = build_grid(kInterval, 30);
    const auto ps = ExponentField::affine(3.0, {0.5, 0}, kInterval), q = ExponentField::constant(2.0);
    EXPECT_EQ(gn_interpolation_exponent(ps, q, 1.0).sample(*g), ps.sample(*g));
    EXPECT_EQ(gn_interpolation_exponent(ps, q, 0.0).sample(*g), q.sample(*g));
    EXPECT_NEAR(gn_interpolation_exponent(ExponentField::constant(4.0), q, 0.5).constant_value(), 8.0 / 3.0, 1e-15);
    EXPECT_THROW(gn_interpolation_exponent(ps, q, 1.5), ConfigurationError);
}

TEST(Admissibility, SteinWeissRejectsBrokenIdentity) {
    const auto g = build_grid(kInterval, 30);
    InequalityCase c;
    c.theorem = Theorem::SteinWeiss1958;
    c.gamma = 0.5;
    c.a = c.b = -0.25;
    c.p = ExponentField::constant(2.0);
    c.q = ExponentField::constant(2.0);
    const auto v = check_classical(c, *g);
    EXPECT_FALSE(v.overall);
    EXPECT_TRUE(fails(v, "exponent_identity"));
    EXPECT_NEAR(v.find("exponent_identity")->margin, -0.5, 1e-15);
}

TEST(Admissibility, AdamsExample) {
    const auto g = build_grid(kInterval, 30);
    InequalityCase c;
    c.theorem = Theorem::Adams;
    c.gamma = 0.25;
    c.p = ExponentField::constant(2.0);
    c.lam = ExponentField::constant(0.2);
    const auto v = check_classical(c, *g);
    EXPECT_TRUE(v.overall) << testing::PrintToString(v.failed());
    EXPECT_NEAR(v.derived.at("q"), 16.0 / 3.0, 1e-12);
    // p < (n - lambda)/gamma = 3.2
    EXPECT_NEAR(v.find("p_range")->margin, 1.0, 1e-12);
}

TEST(Admissibility, SpanneIdentityWithEqualExponents) {
    const auto g = build_grid(kInterval, 30);
    InequalityCase c;
    c.theorem = Theorem::Spanne;
    c.gamma = 0.25;
    c.p = ExponentField::constant(2.0);
    c.q = c.p;
    c.lam = ExponentField::constant(0.3);
    c.aux["mu"] = 0.3;
    const auto v = check_classical(c, *g);
    EXPECT_TRUE(v.find("morrey_identity")->satisfied);
}

TEST(Admissibility, MissingAuxNamesTheKey) {
    const auto g = build_grid(kInterval, 30);
    InequalityCase c;
    c.theorem = Theorem::Samko;
    c.gamma = 0.3;
    try {
        check_classical(c, *g);
        FAIL();
    } catch (const ConfigurationError& e) {
        EXPECT_NE(std::string(e.what()).find("nu"), std::string::npos);
    }
}

TEST(Admissibility, SamkoDerivesMu) {
    const auto g = build_grid(kInterval, 60);
    for (const Point x0 : {Point{0.1, 0}, Point{-1.0, 0}}) {
        InequalityCase c;
        c.theorem = Theorem::Samko;
        c.gamma = 0.3;
        c.x0 = x0;
        c.p = ExponentField::affine(2.0, {0.2, 0}, kInterval);
        c.aux["nu"] = 0.1;
        const auto v = check_classical(c, *g);
        const double p0 = c.p.value(x0);
        const double q0 = v.derived.at("q_at_x0");
        EXPECT_NEAR(1.0 / p0 - 1.0 / q0, 0.3, 1e-12);
        EXPECT_NEAR(v.derived.at("mu") / q0, 0.1 / p0, 1e-12);
        EXPECT_TRUE(v.overall) << testing::PrintToString(v.failed());
        EXPECT_EQ(v.notes.empty(), x0[0] != -1.0);
    }
}

TEST(Admissibility, VariableSteinWeissSolvesQ) {
    const auto g = build_grid(kInterval, 60);
    InequalityCase c;
    c.theorem = Theorem::VarSteinWeiss;
    c.gamma = 0.4;
    c.a = 0.0;
    c.b = 0.1;
    c.p = ExponentField::affine(1.6, {0.1, 0}, kInterval);
    const auto v = check_classical(c, *g);
    EXPECT_TRUE(v.overall) << testing::PrintToString(v.failed());
    EXPECT_LE(std::abs(v.find("exponent_identity")->margin), 1e-12);
}

TEST(AdmissibilityProperty, ConstantExponentsAgreeWithKRRS) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = build_grid(kInterval, 40);
    int compared = 0;
    while (compared < 50) {
        InequalityCase c;
        c.gamma = 0.05 + 0.9 * u(rng);
        c.a = 0.4 * u(rng) - 0.3;
        c.b = c.a + 1.2 * c.gamma * u(rng) - 0.1 * c.gamma;
        c.p = ExponentField::constant(1.05 + 2.5 * u(rng));
        c.lam = ExponentField::constant(0.05 + 0.9 * u(rng));
        const double s = c.gamma - (c.b - c.a);
        if (!(1.0 / c.p.constant_value() - s / (1.0 - c.lam.constant_value()) > 0)) continue;
        c.theorem = Theorem::MainMorrey;
        const auto main = check_main(c, *g);
        c.theorem = Theorem::KRRS;
        const auto krrs = check_classical(c, *g);
        for (const char* name : {"condA", "condB", "condC", "condD"})
            EXPECT_EQ(main.find(name)->satisfied, krrs.find(name)->satisfied) << name;
        ++compared;
    }
}

TEST(AdmissibilityProperty, ShrinkingBTowardANeverBreaksConditionA) {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto g = build_grid(kInterval, 40);
    for (int k = 0; k < 30; ++k) {
        InequalityCase c = pinned_case();
        c.gamma = 0.1 + 0.5 * u(rng);
        c.a = -0.2 * u(rng);
        const double b0 = c.a + 1.5 * c.gamma * u(rng);
        bool was = false;
        for (int step = 0; step <= 10; ++step) {
            c.b = b0 + (c.a - b0) * step / 10.0;
            const bool now = check_main(c, *g).find("condA")->satisfied;
            EXPECT_FALSE(was && !now) << k << " " << step;
            was = now;
        }
    }
}

TEST(Admissibility, ApplicationsNeedTheOrigin) {
    InequalityCase c;
    c.theorem = Theorem::FractionalHS;
    c.aux["s"] = 0.25;
    c.p = ExponentField::constant(1.25);
    c.lam = ExponentField::constant(0.3);
    const auto inside = check_case(c, *build_grid(kInterval, 40));
    EXPECT_TRUE(inside.overall) << testing::PrintToString(inside.failed());
    EXPECT_TRUE(fails(check_case(c, *build_grid(Domain::interval(0.5, 2), 40)), "origin_in_domain"));
    EXPECT_DOUBLE_EQ(effective_gamma(c), 0.5);
}

TEST(Admissibility, PoincareOrdersExponents) {
    InequalityCase c;
    c.theorem = Theorem::Poincare;
    c.p = ExponentField::constant(1.2);
    c.q = ExponentField::constant(1.5);
    c.lam = ExponentField::constant(0.5);
    const auto g = build_grid(Domain::disk(0, 0, 1), 20);
    const auto v = check_case(c, *g);
    EXPECT_TRUE(v.overall) << testing::PrintToString(v.failed());
    ASSERT_NE(v.find("p_le_r"), nullptr);
    ASSERT_NE(v.find("q_le_r"), nullptr);
    c.q = ExponentField::constant(20.0);
    EXPECT_TRUE(fails(check_case(c, *g), "q_le_r"));
}

TEST(Admissibility, GagliardoNirenbergRequiresEqualWeights) {
    InequalityCase c;
    c.theorem = Theorem::GagliardoNirenberg;
    c.p = ExponentField::constant(1.2);
    c.q = ExponentField::constant(2.0);
    c.lam = ExponentField::constant(0.5);
    c.aux["theta"] = 0.5;
    c.exponents.emplace("p_star", ExponentField::constant(1.0 / (1.0 / 1.2 - 1.0 / 1.5)));
    const auto g = build_grid(Domain::rectangle(-1, 1, -1, 1), 16);
    EXPECT_TRUE(check_case(c, *g).overall) << testing::PrintToString(check_case(c, *g).failed());
    c.b = 0.1;
    EXPECT_TRUE(fails(check_case(c, *g), "b_equals_a"));
}

TEST(Admissibility, TheoremNamesRoundTrip) {
    for (Theorem t : {Theorem::SteinWeiss1958, Theorem::Spanne, Theorem::Adams, Theorem::KRRS, Theorem::Samko,
                      Theorem::VarSteinWeiss, Theorem::MainMorrey, Theorem::Poincare, Theorem::HardySobolev,
                      Theorem::GagliardoNirenberg, Theorem::FractionalHS})
        EXPECT_EQ(theorem_from_string(to_string(t)), t);
    EXPECT_THROW(theorem_from_string("Hardy"), ConfigurationError);
}
