#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "vexm/errors.hpp"

namespace vexm {

/// A point of R^n, n in {1, 2}. One-dimensional points keep the second
/// coordinate at zero.
using Point = std::array<double, 2>;

/// Euclidean distance between two points of the given dimension.
inline double distance(const Point& a, const Point& b, int dim) {
    if (dim == 1) return std::abs(a[0] - b[0]);
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

enum class Shape { interval, rectangle, disk };

inline const char* to_string(Shape s) {
    switch (s) {
        case Shape::interval: return "interval";
        case Shape::rectangle: return "rectangle";
        case Shape::disk: return "disk";
    }
    return "?";
}

inline Shape shape_from_string(const std::string& s) {
    if (s == "interval") return Shape::interval;
    if (s == "rectangle") return Shape::rectangle;
    if (s == "disk") return Shape::disk;
    throw ConfigurationError("unsupported domain shape '" + s + "'");
}

/// A bounded open set: (lo, hi), (x_lo, x_hi) x (y_lo, y_hi), or the open
/// disk |x - c| < R. All shapes are convex.
struct Domain {
    Shape shape = Shape::interval;
    // interval: {lo, hi}; rectangle: {x_lo, x_hi, y_lo, y_hi}; disk: {cx, cy, R}
    std::array<double, 4> bounds{-1.0, 1.0, 0.0, 0.0};

    static Domain interval(double lo, double hi) {
        if (!(hi > lo)) throw ConfigurationError("interval must have positive length");
        return Domain{Shape::interval, {lo, hi, 0.0, 0.0}};
    }
    static Domain rectangle(double x_lo, double x_hi, double y_lo, double y_hi) {
        if (!(x_hi > x_lo) || !(y_hi > y_lo))
            throw ConfigurationError("rectangle must have positive area");
        return Domain{Shape::rectangle, {x_lo, x_hi, y_lo, y_hi}};
    }
    static Domain disk(double cx, double cy, double radius) {
        if (!(radius > 0)) throw ConfigurationError("disk radius must be positive");
        return Domain{Shape::disk, {cx, cy, radius, 0.0}};
    }

    int dimension() const { return shape == Shape::interval ? 1 : 2; }

    bool contains(const Point& p) const {
        switch (shape) {
            case Shape::interval: return p[0] > bounds[0] && p[0] < bounds[1];
            case Shape::rectangle:
                return p[0] > bounds[0] && p[0] < bounds[1] && p[1] > bounds[2] && p[1] < bounds[3];
            case Shape::disk: return distance(p, {bounds[0], bounds[1]}, 2) < bounds[2];
        }
        return false;
    }

    bool contains_closure(const Point& p) const {
        switch (shape) {
            case Shape::interval: return p[0] >= bounds[0] && p[0] <= bounds[1];
            case Shape::rectangle:
                return p[0] >= bounds[0] && p[0] <= bounds[1] && p[1] >= bounds[2] &&
                       p[1] <= bounds[3];
            case Shape::disk: return distance(p, {bounds[0], bounds[1]}, 2) <= bounds[2];
        }
        return false;
    }

    /// Lebesgue measure of the continuous set.
    double measure() const {
        switch (shape) {
            case Shape::interval: return bounds[1] - bounds[0];
            case Shape::rectangle: return (bounds[1] - bounds[0]) * (bounds[3] - bounds[2]);
            case Shape::disk: return std::numbers::pi * bounds[2] * bounds[2];
        }
        return 0.0;
    }

    double diameter() const {
        switch (shape) {
            case Shape::interval: return bounds[1] - bounds[0];
            case Shape::rectangle: return std::hypot(bounds[1] - bounds[0], bounds[3] - bounds[2]);
            case Shape::disk: return 2.0 * bounds[2];
        }
        return 0.0;
    }

    Point centroid() const {
        switch (shape) {
            case Shape::interval: return {0.5 * (bounds[0] + bounds[1]), 0.0};
            case Shape::rectangle:
                return {0.5 * (bounds[0] + bounds[1]), 0.5 * (bounds[2] + bounds[3])};
            case Shape::disk: return {bounds[0], bounds[1]};
        }
        return {0.0, 0.0};
    }

    bool operator==(const Domain&) const = default;
};

inline std::string format_point(const Point& p, int dim) {
    std::ostringstream os;
    os.precision(10);
    if (dim == 1)
        os << "(" << p[0] << ")";
    else
        os << "(" << p[0] << ", " << p[1] << ")";
    return os.str();
}

/// Volume of the full Euclidean ball of radius r in R^dim.
inline double ball_volume(double r, int dim) {
    return dim == 1 ? 2.0 * r : std::numbers::pi * r * r;
}

}  // namespace vexm
