#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "vexm/errors.hpp"

namespace vexm {

struct UnitLevelOptions {
    double modular_tolerance = 1e-8;   // stop when |F(eta) - 1| <= this
    double relative_width = 1e-12;     // or when the bracket is this narrow relative to eta
    int max_iterations = 200;
};

struct UnitLevelResult {
    double value = 0;          // eta with F(eta) = 1
    double level = 0;          // F(value)
    int iterations = 0;
    std::pair<double, double> bracket{0, 0};
};

/// Solves F(eta) = 1 for a continuous, strictly decreasing F on (0, inf).
///
/// The bracket [lo, hi] (F(lo) >= 1 >= F(hi)) is first widened geometrically,
/// then narrowed in log-log coordinates with Illinois false-position steps.
/// A plain bisection step replaces any step that fails to halve the bracket
/// twice in a row, so the bracket width shrinks at least as fast as bisection
/// every other iteration.
template <typename Modular>
UnitLevelResult solve_unit_level(Modular&& F, double lo, double hi, const UnitLevelOptions& opt = {}) {
    if (!(lo > 0) || !(hi > lo)) throw NumericalError("invalid initial bracket for norm computation");
    auto h = [&](double s) { return std::log(F(std::exp(s))); };

    int iterations = 0;
    double s_lo = std::log(lo), s_hi = std::log(hi);
    double h_lo = h(s_lo), h_hi = h(s_hi);
    for (int i = 0; h_lo < 0 && i < 400; ++i) {
        s_hi = s_lo;
        h_hi = h_lo;
        s_lo -= std::log(16.0);
        h_lo = h(s_lo);
    }
    for (int i = 0; h_hi > 0 && i < 400; ++i) {
        s_lo = s_hi;
        h_lo = h_hi;
        s_hi += std::log(16.0);
        h_hi = h(s_hi);
    }
    if (!(h_lo >= 0) || !(h_hi <= 0)) {
        std::ostringstream os;
        os << "could not bracket the unit level: F(" << std::exp(s_lo) << ") = " << std::exp(h_lo)
           << ", F(" << std::exp(s_hi) << ") = " << std::exp(h_hi);
        throw NumericalError(os.str());
    }
    if (h_lo == 0) return {std::exp(s_lo), 1.0, 0, {std::exp(s_lo), std::exp(s_hi)}};
    if (h_hi == 0) return {std::exp(s_hi), 1.0, 0, {std::exp(s_lo), std::exp(s_hi)}};

    int last = 0;          // end replaced by the previous step (-1 lo, +1 hi)
    int slow_steps = 0;
    double width_before = s_hi - s_lo;
    double best_s = s_hi, best_h = h_hi;
    while (iterations < opt.max_iterations) {
        ++iterations;
        double s_new = 0.5 * (s_lo + s_hi);
        if (std::isfinite(h_lo) && std::isfinite(h_hi) && slow_steps < 2) {
            const double t = s_hi - h_hi * (s_hi - s_lo) / (h_hi - h_lo);
            if (t > s_lo && t < s_hi) s_new = t;
        } else {
            slow_steps = 0;
        }
        const double h_new = h(s_new);
        if (std::abs(h_new) < std::abs(best_h)) {
            best_s = s_new;
            best_h = h_new;
        }
        if (std::abs(std::expm1(h_new)) <= opt.modular_tolerance)
            return {std::exp(s_new), std::exp(h_new), iterations, {std::exp(s_lo), std::exp(s_hi)}};
        if (h_new > 0) {
            s_lo = s_new;
            h_lo = h_new;
            if (last == -1) h_hi *= 0.5;
            last = -1;
        } else {
            s_hi = s_new;
            h_hi = h_new;
            if (last == +1) h_lo *= 0.5;
            last = +1;
        }
        const double width = s_hi - s_lo;
        slow_steps = width > 0.5 * width_before ? slow_steps + 1 : 0;
        width_before = width;
        if (width <= opt.relative_width)
            return {std::exp(best_s), std::exp(best_h), iterations, {std::exp(s_lo), std::exp(s_hi)}};
    }
    std::ostringstream os;
    os.precision(17);
    os << "norm bisection did not converge after " << iterations << " iterations; bracket ["
       << std::exp(s_lo) << ", " << std::exp(s_hi) << "], best level " << std::exp(best_h);
    throw NumericalError(os.str());
}

}  // namespace vexm
