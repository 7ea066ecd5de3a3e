#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/exponent.hpp"
#include "vexm/grid.hpp"

namespace vexm {

enum class Theorem {
    SteinWeiss1958,
    Spanne,
    Adams,
    KRRS,
    Samko,
    VarSteinWeiss,
    MainMorrey,
    Poincare,
    HardySobolev,
    GagliardoNirenberg,
    FractionalHS,
};

inline const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::SteinWeiss1958: return "SteinWeiss1958";
        case Theorem::Spanne: return "Spanne";
        case Theorem::Adams: return "Adams";
        case Theorem::KRRS: return "KRRS";
        case Theorem::Samko: return "Samko";
        case Theorem::VarSteinWeiss: return "VarSteinWeiss";
        case Theorem::MainMorrey: return "MainMorrey";
        case Theorem::Poincare: return "Poincare";
        case Theorem::HardySobolev: return "HardySobolev";
        case Theorem::GagliardoNirenberg: return "GagliardoNirenberg";
        case Theorem::FractionalHS: return "FractionalHS";
    }
    return "?";
}

inline Theorem theorem_from_string(const std::string& s) {
    for (Theorem t : {Theorem::SteinWeiss1958, Theorem::Spanne, Theorem::Adams, Theorem::KRRS, Theorem::Samko,
                      Theorem::VarSteinWeiss, Theorem::MainMorrey, Theorem::Poincare, Theorem::HardySobolev,
                      Theorem::GagliardoNirenberg, Theorem::FractionalHS})
        if (s == to_string(t)) return t;
    throw ConfigurationError("unknown theorem '" + s + "'");
}

/// One fully parameterized inequality instance.
struct InequalityCase {
    std::string id = "case";
    Theorem theorem = Theorem::MainMorrey;
    double gamma = 0.5;
    double a = 0;
    double b = 0;
    std::optional<Point> x0;                         // defaults to the node nearest the centroid
    ExponentField p = ExponentField::constant(2.0);
    std::optional<ExponentField> q;                  // solved from the exponent identity when absent
    ExponentField lam = ExponentField::constant(0.0);
    std::map<std::string, double> aux;               // mu, nu, theta, s
    std::map<std::string, ExponentField> exponents;  // "r" (Poincare), "p_star" (Gagliardo-Nirenberg)

    double aux_value(const std::string& key) const {
        const auto it = aux.find(key);
        if (it == aux.end())
            throw ConfigurationError(std::string("theorem ") + to_string(theorem) + " needs aux parameter '" +
                                     key + "'");
        return it->second;
    }
    const ExponentField& exponent(const std::string& key) const {
        const auto it = exponents.find(key);
        if (it == exponents.end())
            throw ConfigurationError(std::string("theorem ") + to_string(theorem) + " needs exponent '" + key +
                                     "'");
        return it->second;
    }
};

/// Order of the fractional integral the theorem uses: gamma itself, 1 for the
/// gradient inequalities, 2s for the fractional Hardy-Sobolev inequality.
inline double effective_gamma(const InequalityCase& c) {
    switch (c.theorem) {
        case Theorem::Poincare:
        case Theorem::HardySobolev:
        case Theorem::GagliardoNirenberg: return 1.0;
        case Theorem::FractionalHS: return 2.0 * c.aux_value("s");
        default: return c.gamma;
    }
}

struct Condition {
    std::string name;
    bool satisfied = false;
    double margin = 0;     // signed distance to the constraint boundary
    bool strict = false;
};

struct AdmissibilityVerdict {
    std::vector<Condition> conditions;
    bool overall = true;
    std::vector<std::string> notes;
    std::map<std::string, double> derived;       // solved quantities: q, mu, sigma
    std::map<std::string, double> diagnostics;   // log-Hoelder constants, never gating

    const Condition* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
    std::vector<std::string> failed() const {
        std::vector<std::string> out;
        for (const auto& c : conditions)
            if (!c.satisfied) out.push_back(c.name);
        return out;
    }
};

inline constexpr double kConditionTolerance = 1e-12;

namespace detail {

struct VerdictBuilder {
    AdmissibilityVerdict v;

    void strict(const std::string& name, double margin) { add(name, margin, true); }
    void non_strict(const std::string& name, double margin) { add(name, margin, false); }
    // identities are reported with margin = -residual
    void identity(const std::string& name, double residual) { add(name, -std::abs(residual), false); }

    void add(const std::string& name, double margin, bool is_strict) {
        const bool ok = is_strict ? margin > kConditionTolerance : margin >= -kConditionTolerance;
        v.conditions.push_back({name, ok, margin, is_strict});
        v.overall = v.overall && ok;
    }
};

inline double positive_part_ratio(double num, double den) {
    return den > 0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// q(x) = 1 / (1/p(x) - (gamma + a - b) / (n - lambda(x))).
inline ExponentField solve_q_from_condD(const ExponentField& p, const ExponentField& lam, double gamma, double a,
                                        double b, const DomainGrid& grid) {
    const double n = grid.dimension();
    const double c = gamma + a - b;
    if (c == 0.0) return p;
    const auto ps = p.sample(grid);
    const auto ls = lam.sample(grid);
    std::size_t worst = 0;
    double worst_recip = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double recip = 1.0 / ps[i] - c / (n - ls[i]);
        if (recip < worst_recip) {
            worst_recip = recip;
            worst = i;
        }
        if (recip > 0) {
            lo = std::min(lo, 1.0 / recip);
            hi = std::max(hi, 1.0 / recip);
        }
    }
    if (!(worst_recip > 0))
        throw InadmissibleExponentError("exponent identity gives 1/q = " + std::to_string(worst_recip) +
                                        " <= 0 at node " +
                                        format_point(grid.node(worst), grid.dimension()));
    if (p.is_constant() && lam.is_constant()) {
        const ExponentField q = ExponentField::constant(
            1.0 / (1.0 / p.constant_value() - c / (n - lam.constant_value())));
        return p.domain() ? q.on(*p.domain()) : q;
    }
    // interval bound over the declared ranges, falling back to the node range
    const auto [plo, phi] = p.range();
    const auto [llo, lhi] = lam.range();
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = -rmin;
    for (double pv : {plo, phi})
        for (double lv : {llo, lhi}) {
            const double recip = 1.0 / pv - c / (n - lv);
            rmin = std::min(rmin, recip);
            rmax = std::max(rmax, recip);
        }
    if (rmin > 0 && lhi < n) {
        lo = 1.0 / rmax;
        hi = 1.0 / rmin;
    }
    ExponentField q = ExponentField::derived(
        "q from exponent identity",
        [p, lam, c, n](const Point& x) { return 1.0 / (1.0 / p.value(x) - c / (n - lam.value(x))); }, lo, hi);
    return p.domain() ? q.on(*p.domain()) : q;
}

/// max over nodes of |(gamma + a - b)/(n - lambda) - (1/p - 1/q)|.
inline double condD_residual(const ExponentField& p, const ExponentField& q, const ExponentField& lam, double gamma,
                             double a, double b, const DomainGrid& grid) {
    const double n = grid.dimension();
    const auto ps = p.sample(grid), qs = q.sample(grid), ls = lam.sample(grid);
    double r = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        r = std::max(r, std::abs((gamma + a - b) / (n - ls[i]) - (1.0 / ps[i] - 1.0 / qs[i])));
    return r;
}

/// sigma = gamma - (b - a), the order of the fractional maximal operator
/// controlling the middle piece of the splitting.
inline double derive_sigma(double gamma, double a, double b) {
    const double sigma = gamma - (b - a);
    if (sigma < -kConditionTolerance)
        throw PreconditionError("sigma = gamma - (b - a) is negative; b - a <= gamma is required");
    return std::max(0.0, sigma);
}

/// r(x) = 1 / (theta/p*(x) + (1 - theta)/q(x)).
inline ExponentField gn_interpolation_exponent(const ExponentField& p_star, const ExponentField& q, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigurationError("theta must lie in [0, 1]");
    if (theta == 1.0) return p_star;
    if (theta == 0.0) return q;
    if (p_star.is_constant() && q.is_constant())
        return ExponentField::constant(1.0 / (theta / p_star.constant_value() + (1.0 - theta) / q.constant_value()));
    const auto [alo, ahi] = p_star.range();
    const auto [blo, bhi] = q.range();
    return ExponentField::derived(
        "interpolation exponent",
        [p_star, q, theta](const Point& x) { return 1.0 / (theta / p_star.value(x) + (1.0 - theta) / q.value(x)); },
        1.0 / (theta / alo + (1.0 - theta) / blo), 1.0 / (theta / ahi + (1.0 - theta) / bhi));
}

/// x0 used by a case: the declared point, or the node nearest the centroid.
inline Point resolve_x0(const InequalityCase& c, const DomainGrid& grid) {
    if (c.x0) return *c.x0;
    return grid.node(nearest_node(grid, grid.domain().centroid()));
}

namespace detail {

// Hypotheses shared by the variable-exponent Morrey results: exponent ranges,
// p <= q, and conditions A-D for the given order gamma.
inline void morrey_conditions(VerdictBuilder& vb, const ExponentField& p, const ExponentField& q,
                              const ExponentField& lam, double gamma, double a, double b, const DomainGrid& grid) {
    const double n = grid.dimension();
    const auto ps = p.sample(grid), qs = q.sample(grid), ls = lam.sample(grid);
    const auto [pmin, pmax] = std::minmax_element(ps.begin(), ps.end());
    const auto [qmin, qmax] = std::minmax_element(qs.begin(), qs.end());
    const auto [lmin, lmax] = std::minmax_element(ls.begin(), ls.end());
    vb.strict("gamma_range", std::min(gamma, n - gamma));
    vb.strict("p_range", *pmin - 1.0);
    vb.strict("q_range", *qmin - 1.0);
    vb.strict("lambda_range", std::min(*lmin, n - *lmax));
    double p_le_q = std::numeric_limits<double>::infinity();
    double cond_c = *lmin;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p_le_q = std::min(p_le_q, qs[i] - ps[i]);
        cond_c = std::min(cond_c, n - (gamma - b + a) * ps[i] - ls[i]);
    }
    vb.non_strict("p_le_q", p_le_q);
    vb.non_strict("condA", std::min(b - a, gamma - (b - a)));
    const double p_conj_max = *pmin > 1.0 ? *pmin / (*pmin - 1.0) : std::numeric_limits<double>::infinity();
    vb.strict("condB", std::min(a - (*lmax - n) / *qmax, n / p_conj_max - b));
    vb.strict("condC", cond_c);
    vb.identity("condD", condD_residual(p, q, lam, gamma, a, b, grid));
}

inline void record_lh0(AdmissibilityVerdict& v, const std::string& name, const ExponentField& f,
                       const DomainGrid& grid) {
    const auto rep = lh0_modulus(f, grid);
    v.diagnostics["c0_" + name] = rep.c0_estimate;
    if (!rep.is_finite) v.notes.push_back("log-Hoelder estimate for " + name + " exceeds the cap");
}

inline ExponentField q_or_solve(const InequalityCase& c, double gamma, const DomainGrid& grid,
                                AdmissibilityVerdict& v) {
    if (c.q) return *c.q;
    try {
        return solve_q_from_condD(c.p, c.lam, gamma, c.a, c.b, grid);
    } catch (const InadmissibleExponentError& e) {
        v.notes.push_back(std::string("q could not be solved: ") + e.what());
        return c.p;  // condD will then report the residual
    }
}

}  // namespace detail

/// Hypotheses of the variable-exponent Morrey Stein-Weiss inequality.
inline AdmissibilityVerdict check_main(const InequalityCase& c, const DomainGrid& grid) {
    detail::VerdictBuilder vb;
    const ExponentField q = detail::q_or_solve(c, c.gamma, grid, vb.v);
    const Point x0 = resolve_x0(c, grid);
    vb.non_strict("x0_in_domain", grid.domain().contains(x0) ? 0.0 : -1.0);
    detail::morrey_conditions(vb, c.p, q, c.lam, c.gamma, c.a, c.b, grid);
    vb.v.derived["sigma"] = c.gamma - (c.b - c.a);
    if (q.is_constant()) vb.v.derived["q"] = q.constant_value();
    detail::record_lh0(vb.v, "p", c.p, grid);
    detail::record_lh0(vb.v, "q", q, grid);
    detail::record_lh0(vb.v, "lambda", c.lam, grid);
    return vb.v;
}

namespace detail {

inline double constant_or_center(const ExponentField& f, const DomainGrid& grid, VerdictBuilder& vb,
                                 const std::string& name) {
    if (f.is_constant()) return f.constant_value();
    vb.v.notes.push_back("exponent " + name + " is not constant; using its value at the centroid");
    return f.value(grid.domain().centroid());
}

inline AdmissibilityVerdict classical_constant(const InequalityCase& c, const DomainGrid& grid) {
    VerdictBuilder vb;
    const double n = grid.dimension();
    const double g = c.gamma, a = c.a, b = c.b;
    const bool constant = c.p.is_constant() && c.lam.is_constant() && (!c.q || c.q->is_constant());
    vb.non_strict("constant_exponents", constant ? 0.0 : -1.0);
    const double p = constant_or_center(c.p, grid, vb, "p");
    const double lam = constant_or_center(c.lam, grid, vb, "lambda");
    const double p_conj = p > 1.0 ? p / (p - 1.0) : std::numeric_limits<double>::infinity();
    vb.strict("gamma_range", std::min(g, n - g));
    auto q_from = [&](double recip_gap) {
        if (c.q) return constant_or_center(*c.q, grid, vb, "q");
        const double recip = 1.0 / p - recip_gap;
        vb.v.derived["q"] = recip > 0 ? 1.0 / recip : std::numeric_limits<double>::infinity();
        return vb.v.derived["q"];
    };
    switch (c.theorem) {
        case Theorem::SteinWeiss1958: {
            const double q = q_from((g + a - b) / n);
            vb.strict("p_range", p - 1.0);
            vb.non_strict("p_le_q", q - p);
            vb.strict("weight_bounds", std::min(a + n / q, n / p_conj - b));
            vb.non_strict("a_le_b", b - a);
            vb.identity("exponent_identity", (1.0 / p - 1.0 / q) - (g + a - b) / n);
            break;
        }
        case Theorem::Spanne: {
            const double mu = c.aux_value("mu");
            const double q = q_from(g / n);
            vb.strict("p_range", std::min(p - 1.0, n / g - p));
            vb.identity("exponent_identity", (1.0 / p - 1.0 / q) - g / n);
            vb.strict("lambda_mu_order", std::min({lam, mu - lam, n - mu}));
            vb.identity("morrey_identity", lam / p - mu / q);
            break;
        }
        case Theorem::Adams: {
            const double q = q_from(g / (n - lam));
            vb.non_strict("lambda_range", std::min(lam, n - lam));
            vb.strict("p_range", std::min(p - 1.0, positive_part_ratio(n - lam, g) - p));
            vb.identity("exponent_identity", (1.0 / p - 1.0 / q) - g / (n - lam));
            break;
        }
        case Theorem::KRRS: {
            const double s = g - (b - a);
            const double q = q_from(s / (n - lam));
            vb.non_strict("condA", std::min(b - a, g - (b - a)));
            vb.strict("p_range", std::min(p - 1.0, positive_part_ratio(n, s) - p));
            vb.strict("condB", std::min(a + (n - lam) / q, n / p_conj - b));
            vb.strict("condC", std::min(lam, n - s * p - lam));
            vb.identity("condD", (1.0 / p - 1.0 / q) - s / (n - lam));
            break;
        }
        default: throw ConfigurationError("not a constant-exponent theorem");
    }
    return vb.v;
}

inline AdmissibilityVerdict samko(const InequalityCase& c, const DomainGrid& grid) {
    VerdictBuilder vb;
    const double n = grid.dimension();
    const double g = c.gamma;
    const auto ps = c.p.sample(grid);
    const auto [pmin, pmax] = std::minmax_element(ps.begin(), ps.end());
    vb.strict("gamma_range", std::min(g, n - g));
    vb.strict("p_range", std::min(*pmin - 1.0, n / g - *pmax));
    if (c.q) {
        const auto qs = c.q->sample(grid);
        double r = 0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            r = std::max(r, std::abs((1.0 / ps[i] - 1.0 / qs[i]) - g / n));
        vb.identity("exponent_identity", r);
    }
    const Point x0 = resolve_x0(c, grid);
    const bool inside = grid.domain().contains(x0);
    vb.non_strict("x0_in_closure", grid.domain().contains_closure(x0) ? 0.0 : -1.0);
    if (!inside && grid.domain().contains_closure(x0))
        vb.v.notes.push_back("x0 lies on the boundary; allowed for this theorem only");
    const double p0 = c.p.value(x0);
    const double q0 = 1.0 / (1.0 / p0 - g / n);
    const double nu = c.aux_value("nu");
    vb.strict("nu_range", std::min(nu - (g * p0 - n), n * (p0 - 1.0) - nu));
    const double mu = q0 / p0 * nu;
    vb.v.derived["mu"] = mu;
    vb.v.derived["q_at_x0"] = q0;
    if (const auto it = c.aux.find("mu"); it != c.aux.end()) vb.identity("mu_identity", it->second - mu);
    // the LH0 hypothesis on p is reported, not gated
    detail::record_lh0(vb.v, "p", c.p, grid);
    return vb.v;
}

inline AdmissibilityVerdict var_stein_weiss(const InequalityCase& c, const DomainGrid& grid) {
    VerdictBuilder vb;
    const double n = grid.dimension();
    const double g = c.gamma, a = c.a, b = c.b;
    ExponentField q = c.p;
    if (c.q) {
        q = *c.q;
    } else {
        const double gap = (g + a - b) / n;
        const auto [plo, phi] = c.p.range();
        const ExponentField p = c.p;
        if (gap == 0.0) {
            q = p;
        } else {
            q = ExponentField::derived(
                "q from exponent identity", [p, gap](const Point& x) { return 1.0 / (1.0 / p.value(x) - gap); },
                1.0 / std::max(1e-300, 1.0 / plo - gap), 1.0 / std::max(1e-300, 1.0 / phi - gap));
        }
    }
    const auto ps = c.p.sample(grid), qs = q.sample(grid);
    const auto [pmin, pmax] = std::minmax_element(ps.begin(), ps.end());
    const auto [qmin, qmax] = std::minmax_element(qs.begin(), qs.end());
    vb.strict("gamma_range", std::min(g, n - g));
    vb.strict("p_range", *pmin - 1.0);
    vb.strict("q_range", *qmin - 1.0);
    double p_le_q = std::numeric_limits<double>::infinity(), resid = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p_le_q = std::min(p_le_q, qs[i] - ps[i]);
        resid = std::max(resid, std::abs((1.0 / ps[i] - 1.0 / qs[i]) - (g + a - b) / n));
    }
    vb.non_strict("p_le_q", p_le_q);
    const double pminus_conj = *pmin / (*pmin - 1.0);
    vb.strict("weight_bounds", std::min(a + n / *qmax, n / pminus_conj - b));
    vb.non_strict("a_le_b", b - a);
    vb.identity("exponent_identity", resid);
    detail::record_lh0(vb.v, "p", c.p, grid);
    detail::record_lh0(vb.v, "q", q, grid);
    return vb.v;
}

inline void origin_condition(VerdictBuilder& vb, const DomainGrid& grid) {
    vb.non_strict("origin_in_domain", grid.domain().contains({0.0, 0.0}) ? 0.0 : -1.0);
}

inline AdmissibilityVerdict applications(const InequalityCase& c, const DomainGrid& grid) {
    VerdictBuilder vb;
    origin_condition(vb, grid);
    switch (c.theorem) {
        case Theorem::Poincare: {
            const double g = 1.0;
            // every supported shape is convex
            vb.non_strict("convex_domain", 0.0);
            const ExponentField q = c.q ? *c.q : c.p;
            ExponentField r = c.p;
            if (const auto it = c.exponents.find("r"); it != c.exponents.end()) {
                r = it->second;
            } else {
                try {
                    r = solve_q_from_condD(c.p, c.lam, g, c.a, c.b, grid);
                } catch (const InadmissibleExponentError& e) {
                    vb.v.notes.push_back(std::string("r could not be solved: ") + e.what());
                }
            }
            // conditions A-D with r in place of q; then p <= q <= r
            detail::morrey_conditions(vb, c.p, r, c.lam, g, c.a, c.b, grid);
            const auto ps = c.p.sample(grid), qs = q.sample(grid), rs = r.sample(grid);
            double pq = std::numeric_limits<double>::infinity(), qr = pq;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                pq = std::min(pq, qs[i] - ps[i]);
                qr = std::min(qr, rs[i] - qs[i]);
            }
            for (auto& k : vb.v.conditions)
                if (k.name == "p_le_q") k.name = "p_le_r";
            vb.non_strict("p_le_q", pq);
            vb.non_strict("q_le_r", qr);
            record_lh0(vb.v, "r", r, grid);
            break;
        }
        case Theorem::HardySobolev: {
            const ExponentField q = q_or_solve(c, 1.0, grid, vb.v);
            detail::morrey_conditions(vb, c.p, q, c.lam, 1.0, c.a, c.b, grid);
            record_lh0(vb.v, "q", q, grid);
            break;
        }
        case Theorem::GagliardoNirenberg: {
            const ExponentField& p_star = c.exponent("p_star");
            const double theta = c.aux_value("theta");
            vb.non_strict("theta_range", std::min(theta, 1.0 - theta));
            vb.non_strict("b_equals_a", -std::abs(c.b - c.a));
            detail::morrey_conditions(vb, c.p, p_star, c.lam, 1.0, c.a, c.a, grid);
            if (c.q) {
                const auto qs = c.q->sample(grid);
                vb.strict("q_param_range", *std::min_element(qs.begin(), qs.end()) - 1.0);
            }
            record_lh0(vb.v, "p_star", p_star, grid);
            break;
        }
        case Theorem::FractionalHS: {
            const double s = c.aux_value("s");
            vb.non_strict("s_range", std::min(s, 1.0 - s));
            const double g = 2.0 * s;
            const ExponentField q = q_or_solve(c, g, grid, vb.v);
            detail::morrey_conditions(vb, c.p, q, c.lam, g, c.a, c.b, grid);
            record_lh0(vb.v, "q", q, grid);
            break;
        }
        default: throw ConfigurationError("not an application theorem");
    }
    record_lh0(vb.v, "p", c.p, grid);
    record_lh0(vb.v, "lambda", c.lam, grid);
    return vb.v;
}

}  // namespace detail

/// Hypotheses of the classical and variable-Lebesgue theorems, and of the
/// gradient / fractional-Laplacian applications.
inline AdmissibilityVerdict check_classical(const InequalityCase& c, const DomainGrid& grid) {
    switch (c.theorem) {
        case Theorem::SteinWeiss1958:
        case Theorem::Spanne:
        case Theorem::Adams:
        case Theorem::KRRS: return detail::classical_constant(c, grid);
        case Theorem::Samko: return detail::samko(c, grid);
        case Theorem::VarSteinWeiss: return detail::var_stein_weiss(c, grid);
        case Theorem::Poincare:
        case Theorem::HardySobolev:
        case Theorem::GagliardoNirenberg:
        case Theorem::FractionalHS: return detail::applications(c, grid);
        case Theorem::MainMorrey: return check_main(c, grid);
    }
    throw ConfigurationError("unknown theorem");
}

/// Verdict for any theorem kind.
inline AdmissibilityVerdict check_case(const InequalityCase& c, const DomainGrid& grid) {
    return c.theorem == Theorem::MainMorrey ? check_main(c, grid) : check_classical(c, grid);
}

}  // namespace vexm
