#pragma once

// Two sides of each inequality over a function family, sweeps over parameter
// lattices and refinement studies.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vexm/admissibility.hpp"
#include "vexm/case_file.hpp"
#include "vexm/family.hpp"
#include "vexm/grid.hpp"
#include "vexm/norms.hpp"
#include "vexm/operators.hpp"

namespace vexm {

enum class NormKind { lebesgue, morrey };

/// Everything needed to evaluate both sides for one (case, grid).
struct RatioSetup {
    GridPtr grid;
    InequalityCase c;
    Point x0{0.0, 0.0};          // weight point
    double gamma = 0;            // operator order actually applied
    NormKind norm = NormKind::morrey;
    ExponentField p = ExponentField::constant(2.0);
    ExponentField q = ExponentField::constant(2.0);
    ExponentField lam_lhs = ExponentField::constant(0.0);
    ExponentField lam_rhs = ExponentField::constant(0.0);
    std::optional<GridFunction> w_lhs;
    std::optional<GridFunction> w_rhs;
};

namespace detail {

inline ExponentField solve_q(const InequalityCase& c, double gamma, double a, double b, const ExponentField& lam,
                             const DomainGrid& grid) {
    if (c.q) return *c.q;
    return solve_q_from_condD(c.p, lam, gamma, a, b, grid);
}

}  // namespace detail

/// Resolves q, weights and norms for a case on a grid. Throws
/// InadmissibleExponentError when q cannot be solved.
inline RatioSetup prepare_ratio(const InequalityCase& c, const GridPtr& grid) {
    RatioSetup s;
    s.grid = grid;
    s.c = c;
    s.gamma = effective_gamma(c);
    s.p = c.p;
    s.lam_lhs = c.lam;
    s.lam_rhs = c.lam;
    const ExponentField zero = ExponentField::constant(0.0);
    const bool application = is_application(c.theorem);
    s.x0 = application ? Point{0.0, 0.0} : resolve_x0(c, *grid);
    if (application && !grid->domain().contains(s.x0))
        throw ConfigurationError("the applications need a domain containing the origin");
    if (!application && !grid->domain().contains(s.x0) && c.theorem != Theorem::Samko)
        throw DomainError("x0 = " + format_point(s.x0, grid->dimension()) + " is not in the domain");
    double wa = c.a, wb = c.b;
    switch (c.theorem) {
        case Theorem::SteinWeiss1958:
        case Theorem::VarSteinWeiss:
            s.norm = NormKind::lebesgue;
            s.q = detail::solve_q(c, s.gamma, c.a, c.b, zero, *grid);
            break;
        case Theorem::Samko: {
            s.norm = NormKind::lebesgue;
            s.q = detail::solve_q(c, s.gamma, 0.0, 0.0, zero, *grid);
            const double nu = c.aux_value("nu");
            const double p0 = c.p.value(s.x0), q0 = s.q.value(s.x0);
            const double mu = c.aux.count("mu") ? c.aux.at("mu") : q0 / p0 * nu;
            const ExponentField p = c.p, q = s.q;
            s.w_lhs = weight_power(grid, s.x0, [q, mu](const Point& x) { return mu / q.value(x); });
            s.w_rhs = weight_power(grid, s.x0, [p, nu](const Point& x) { return nu / p.value(x); });
            break;
        }
        case Theorem::Spanne:
            s.q = detail::solve_q(c, s.gamma, 0.0, 0.0, zero, *grid);
            s.lam_lhs = ExponentField::constant(c.aux_value("mu"));
            wa = wb = 0;
            break;
        case Theorem::Adams:
            s.q = detail::solve_q(c, s.gamma, 0.0, 0.0, c.lam, *grid);
            wa = wb = 0;
            break;
        case Theorem::Poincare:
            s.q = c.q ? *c.q : c.p;
            break;
        case Theorem::GagliardoNirenberg: {
            if (!c.q) throw ConfigurationError("theorem GagliardoNirenberg needs exponent 'q'");
            s.q = gn_interpolation_exponent(c.exponent("p_star"), *c.q, c.aux_value("theta"));
            wb = c.a;
            break;
        }
        default: s.q = detail::solve_q(c, s.gamma, c.a, c.b, c.lam, *grid); break;
    }
    if (!s.w_lhs) s.w_lhs = weight_power(grid, s.x0, wa);
    if (!s.w_rhs) s.w_rhs = weight_power(grid, s.x0, wb);
    return s;
}

inline double lhs_norm(const RatioSetup& s, const GridFunction& g, const ExponentField& q) {
    return s.norm == NormKind::lebesgue ? lebesgue_norm(g, q).value : morrey_norm(g, q, s.lam_lhs).value;
}
inline double lhs_norm(const RatioSetup& s, const GridFunction& g) { return lhs_norm(s, g, s.q); }
inline double rhs_norm(const RatioSetup& s, const GridFunction& g) {
    return s.norm == NormKind::lebesgue ? lebesgue_norm(g, s.p).value : morrey_norm(g, s.p, s.lam_rhs).value;
}

/// lhs = || |x - x0|^a I_gamma f ||, rhs = || |x - x0|^b f || in the norms of
/// the case's theorem.
inline std::pair<double, double> stein_weiss_ratio(const RatioSetup& s, const GridFunction& f) {
    if (is_application(s.c.theorem))
        throw ConfigurationError(std::string("theorem ") + to_string(s.c.theorem) + " is evaluated by application_ratio");
    f.require_grid(*s.grid);
    if (f.is_zero()) return {0.0, 0.0};
    const GridFunction If = fractional_integral(f, s.gamma);
    return {lhs_norm(s, s.w_lhs->times(If)), rhs_norm(s, s.w_rhs->times(f))};
}

inline std::pair<double, double> stein_weiss_ratio(const InequalityCase& c, const GridFunction& f) {
    return stein_weiss_ratio(prepare_ratio(c, f.grid_ptr()), f);
}

/// Both sides of the gradient and fractional-Laplacian inequalities.
inline std::pair<double, double> application_ratio(const RatioSetup& s, const FamilyMember& m) {
    const Theorem t = s.c.theorem;
    m.f.require_grid(*s.grid);
    switch (t) {
        case Theorem::Poincare:
        case Theorem::HardySobolev:
        case Theorem::GagliardoNirenberg: {
            if (!m.gradient)
                throw ConfigurationError(std::string("theorem ") + to_string(t) + " needs gradient-pair members");
            const GridFunction& grad = *m.gradient;
            if (t == Theorem::Poincare) {
                const GridFunction centered = m.f.shifted(-mean_value(m.f));
                return {lhs_norm(s, s.w_lhs->times(centered)), rhs_norm(s, s.w_rhs->times(grad))};
            }
            if (t == Theorem::HardySobolev)
                return {lhs_norm(s, s.w_lhs->times(m.f)), rhs_norm(s, s.w_rhs->times(grad))};
            const double theta = s.c.aux_value("theta");
            const GridFunction wf = s.w_lhs->times(m.f);
            const double lhs = lhs_norm(s, wf);
            const double grad_part = theta == 0.0 ? 1.0 : std::pow(rhs_norm(s, s.w_lhs->times(grad)), theta);
            const double f_part = theta == 1.0 ? 1.0 : std::pow(lhs_norm(s, wf, *s.c.q), 1.0 - theta);
            return {lhs, grad_part * f_part};
        }
        case Theorem::FractionalHS: {
            if (!m.source) throw ConfigurationError("theorem FractionalHS needs potential-pair members");
            return {lhs_norm(s, s.w_lhs->times(m.f)), rhs_norm(s, s.w_rhs->times(*m.source))};
        }
        default:
            throw ConfigurationError(std::string("theorem ") + to_string(t) + " is evaluated by stein_weiss_ratio");
    }
}

/// max over nodes of |f - f_Omega| / I_1(|grad f|), the pointwise Poincare
/// bound on a convex domain. Nodes where both sides vanish are skipped.
inline double pointwise_poincare_ratio(const FamilyMember& m) {
    if (!m.gradient) throw ConfigurationError("pointwise Poincare ratio needs a gradient-pair member");
    const GridFunction centered = m.f.shifted(-mean_value(m.f)).abs();
    const GridFunction bound = fractional_integral(*m.gradient, 1.0);
    double worst = 0;
    for (std::size_t i = 0; i < centered.size(); ++i) {
        if (centered[i] == 0.0) continue;
        worst = std::max(worst, bound[i] > 0 ? centered[i] / bound[i] : std::numeric_limits<double>::infinity());
    }
    return worst;
}

// ---- reports ------------------------------------------------------------

inline constexpr double kViolationTolerance = 1e-12;

struct MemberRatio {
    std::string member;
    double lhs = 0;
    double rhs = 0;
    std::optional<double> ratio;   // absent when rhs = 0
    bool violation = false;        // rhs = 0 with lhs > tolerance
    bool operator==(const MemberRatio&) const = default;
};

inline MemberRatio make_member_ratio(std::string member, double lhs, double rhs) {
    MemberRatio m{std::move(member), lhs, rhs, std::nullopt, false};
    if (rhs > 0)
        m.ratio = lhs / rhs;
    else
        m.violation = lhs > kViolationTolerance;
    return m;
}

struct RefinementPoint {
    int resolution = 0;
    std::optional<double> sup_ratio;
    bool operator==(const RefinementPoint&) const = default;
};

struct RatioReport {
    std::string case_id;
    Theorem theorem = Theorem::MainMorrey;
    double gamma = 0, a = 0, b = 0;
    Json case_spec;
    AdmissibilityVerdict verdict;
    bool admissible = false;
    bool forced = false;     // ran although inadmissible
    bool skipped = false;    // inadmissible and not forced
    std::vector<MemberRatio> members;
    std::optional<double> sup_ratio;
    bool violation = false;
    std::optional<double> pointwise_ratio;
    std::vector<RefinementPoint> refinement;
    std::optional<double> stability;
    std::uint64_t seed = 0;
    GridSpec grid;
    FamilySpec family;
    std::string timestamp;
    std::string error;
};

inline bool operator==(const Condition& x, const Condition& y) {
    return x.name == y.name && x.satisfied == y.satisfied && x.margin == y.margin && x.strict == y.strict;
}
inline bool operator==(const AdmissibilityVerdict& x, const AdmissibilityVerdict& y) {
    return x.conditions == y.conditions && x.overall == y.overall && x.notes == y.notes && x.derived == y.derived &&
           x.diagnostics == y.diagnostics;
}
inline bool operator==(const RatioReport& x, const RatioReport& y) {
    return x.case_id == y.case_id && x.theorem == y.theorem && x.gamma == y.gamma && x.a == y.a && x.b == y.b &&
           x.case_spec == y.case_spec && x.verdict == y.verdict && x.admissible == y.admissible &&
           x.forced == y.forced && x.skipped == y.skipped && x.members == y.members && x.sup_ratio == y.sup_ratio &&
           x.violation == y.violation && x.pointwise_ratio == y.pointwise_ratio && x.refinement == y.refinement &&
           x.stability == y.stability && x.seed == y.seed && x.grid == y.grid && x.family == y.family &&
           x.timestamp == y.timestamp && x.error == y.error;
}

/// Recomputes sup_ratio and the violation flag from the member rows.
inline void summarize(RatioReport& r) {
    r.sup_ratio.reset();
    r.violation = false;
    for (const auto& m : r.members) {
        if (m.ratio) r.sup_ratio = std::max(r.sup_ratio.value_or(0.0), *m.ratio);
        r.violation = r.violation || m.violation;
    }
}

struct RunOptions {
    bool allow_inadmissible = false;
    std::string timestamp;                                  // recorded verbatim; empty keeps output deterministic
    std::function<void(const std::string&)> progress;       // progress lines
};

/// Family actually used for a theorem: the gradient and potential
/// inequalities replace the default mixed family by their pair kinds.
inline FamilySpec family_for(Theorem t, FamilySpec f) {
    if (f.kind != FamilyKind::mixed) return f;
    if (t == Theorem::Poincare || t == Theorem::HardySobolev || t == Theorem::GagliardoNirenberg)
        f.kind = FamilyKind::gradient_pair;
    if (t == Theorem::FractionalHS) f.kind = FamilyKind::potential_pair;
    return f;
}

/// Evaluates each member with `evaluate`; failures of one member abort the case.
template <typename Evaluate>
void evaluate_members(RatioReport& r, const std::vector<FamilyMember>& members, Evaluate&& evaluate) {
    for (const auto& m : members) {
        const auto [lhs, rhs] = evaluate(m);
        if (lhs == 0.0 && rhs == 0.0) continue;  // zero member: nothing to compare
        r.members.push_back(make_member_ratio(m.id, lhs, rhs));
    }
    summarize(r);
}

/// Runs one case on one grid.
inline RatioReport run_case(const InequalityCase& c, const GridSpec& gs, const FamilySpec& family,
                            const RunOptions& opt = {}) {
    RatioReport r;
    r.case_id = c.id;
    r.theorem = c.theorem;
    r.gamma = c.gamma;
    r.a = c.a;
    r.b = c.b;
    r.case_spec = case_to_json(c, gs);
    r.seed = family.seed;
    r.grid = gs;
    r.family = family_for(c.theorem, family);
    r.timestamp = opt.timestamp;
    try {
        const GridPtr grid = build_grid(gs.domain, gs.resolution);
        r.verdict = check_case(c, *grid);
        r.admissible = r.verdict.overall;
        if (!r.admissible && !opt.allow_inadmissible) {
            r.skipped = true;
            return r;
        }
        r.forced = !r.admissible;
        const RatioSetup setup = prepare_ratio(c, grid);
        FamilyContext ctx;
        ctx.x0 = setup.x0;
        ctx.p_plus = bounds(c.p, *grid).second;
        const auto members = generate_family(r.family, grid, ctx);
        if (is_application(c.theorem)) {
            evaluate_members(r, members, [&](const FamilyMember& m) { return application_ratio(setup, m); });
            if (c.theorem == Theorem::Poincare) {
                double w = 0;
                for (const auto& m : members) w = std::max(w, pointwise_poincare_ratio(m));
                r.pointwise_ratio = w;
            }
        } else {
            evaluate_members(r, members, [&](const FamilyMember& m) { return stein_weiss_ratio(setup, m.f); });
        }
    } catch (const std::exception& e) {
        r.error = std::string(to_string(c.theorem)) + " case '" + c.id + "': " + e.what();
    }
    return r;
}

/// One report per case, in input order; a failing case records its error.
inline std::vector<RatioReport> sweep(const std::vector<InequalityCase>& cases, const GridSpec& gs,
                                      const FamilySpec& family, const RunOptions& opt = {}) {
    std::vector<RatioReport> out;
    out.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (opt.progress)
            opt.progress("case " + std::to_string(i + 1) + "/" + std::to_string(cases.size()) + " " + cases[i].id);
        out.push_back(run_case(cases[i], gs, family, opt));
    }
    return out;
}

/// Runs the case at each resolution (at least three, increasing). The report
/// is the finest run with one refinement row per resolution and
/// stability = |last - previous| / previous.
inline RatioReport refinement_study(const InequalityCase& c, const GridSpec& gs, const FamilySpec& family,
                                    const std::vector<int>& resolutions, const RunOptions& opt = {}) {
    if (resolutions.size() < 3) throw PreconditionError("a refinement study needs at least three resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1]) throw PreconditionError("resolutions must be increasing");
    RatioReport last;
    std::vector<RefinementPoint> rows;
    for (int res : resolutions) {
        if (opt.progress) opt.progress("resolution " + std::to_string(res));
        GridSpec g = gs;
        g.resolution = res;
        last = run_case(c, g, family, opt);
        rows.push_back({res, last.sup_ratio});
        if (!last.error.empty() || last.skipped) break;
    }
    last.refinement = rows;
    const std::size_t k = rows.size();
    if (k >= 2 && rows[k - 1].sup_ratio && rows[k - 2].sup_ratio && *rows[k - 2].sup_ratio > 0)
        last.stability = std::abs(*rows[k - 1].sup_ratio - *rows[k - 2].sup_ratio) / *rows[k - 2].sup_ratio;
    return last;
}

}  // namespace vexm
