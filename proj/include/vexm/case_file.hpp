#pragma once

// JSON case files: domain, exponents, theorem parameters, family, lattice and
// refinement blocks. Unknown keys are rejected everywhere.

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "vexm/admissibility.hpp"
#include "vexm/domain.hpp"
#include "vexm/errors.hpp"
#include "vexm/exponent.hpp"
#include "vexm/family.hpp"

namespace vexm {

using Json = nlohmann::ordered_json;

/// Finite numbers stay numbers; infinities and NaN become the strings
/// "inf", "-inf", "nan" so they survive a round trip.
inline Json number_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigurationError("expected a number for '" + where + "'");
}

namespace detail {

// Strict view over one JSON object.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string where, std::initializer_list<const char*> allowed)
        : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigurationError("'" + where_ + "' must be a JSON object");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key()))
                throw ConfigurationError("unknown key '" + it.key() + "' in " + where_);
    }

    bool has(const char* key) const { return j_.contains(key); }
    const Json& required(const char* key) const {
        if (!j_.contains(key)) throw ConfigurationError("missing required key '" + std::string(key) + "' in " + where_);
        return j_.at(key);
    }
    double number(const char* key) const { return number_from_json(required(key), path(key)); }
    double number_or(const char* key, double fallback) const {
        return has(key) ? number_from_json(j_.at(key), path(key)) : fallback;
    }
    std::string string(const char* key) const {
        const Json& v = required(key);
        if (!v.is_string()) throw ConfigurationError("'" + path(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const char* key) const {
        const Json& v = required(key);
        if (!v.is_array()) throw ConfigurationError("'" + path(key) + "' must be an array");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number_from_json(e, path(key)));
        return out;
    }
    std::string path(const char* key) const { return where_ + "." + key; }

private:
    const Json& j_;
    std::string where_;
};

inline Point point_from_json(const Json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigurationError("'" + where + "' must be an array of " + std::to_string(dim) + " numbers");
    Point p{0.0, 0.0};
    for (int i = 0; i < dim; ++i) p[i] = number_from_json(j[i], where);
    return p;
}

inline Json point_to_json(const Point& p, int dim) {
    Json a = Json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

}  // namespace detail

// ---- domain -------------------------------------------------------------

struct GridSpec {
    Domain domain;
    int resolution = 100;
    bool operator==(const GridSpec&) const = default;
};

inline Json grid_spec_to_json(const GridSpec& g) {
    Json j;
    j["shape"] = to_string(g.domain.shape);
    Json b = Json::array();
    const int nb = g.domain.shape == Shape::interval ? 2 : g.domain.shape == Shape::rectangle ? 4 : 3;
    for (int i = 0; i < nb; ++i) b.push_back(g.domain.bounds[i]);
    j["bounds"] = b;
    j["resolution"] = g.resolution;
    return j;
}

inline GridSpec grid_spec_from_json(const Json& j) {
    detail::ObjectReader r(j, "domain", {"shape", "bounds", "resolution"});
    const Shape shape = shape_from_string(r.string("shape"));
    const auto b = r.numbers("bounds");
    GridSpec g;
    auto need = [&](std::size_t n) {
        if (b.size() != n)
            throw ConfigurationError("domain.bounds for shape '" + std::string(to_string(shape)) + "' needs " +
                                     std::to_string(n) + " numbers");
    };
    switch (shape) {
        case Shape::interval: need(2); g.domain = Domain::interval(b[0], b[1]); break;
        case Shape::rectangle: need(4); g.domain = Domain::rectangle(b[0], b[1], b[2], b[3]); break;
        case Shape::disk: need(3); g.domain = Domain::disk(b[0], b[1], b[2]); break;
    }
    const double res = r.number("resolution");
    if (res != std::floor(res) || res < 4 || res > 1e6)
        throw ConfigurationError("domain.resolution must be an integer >= 4");
    g.resolution = static_cast<int>(res);
    return g;
}

// ---- exponents ----------------------------------------------------------

inline Json exponent_to_json(const ExponentField& f, int dim) {
    const ExponentSpec& s = f.spec();
    Json j;
    j["kind"] = to_string(s.kind);
    switch (s.kind) {
        case ExponentKind::constant: j["value"] = s.value; break;
        case ExponentKind::affine:
            j["c"] = s.value;
            j["slope"] = dim == 1 ? Json::array({s.slope[0]}) : Json::array({s.slope[0], s.slope[1]});
            break;
        case ExponentKind::sine:
            j["c"] = s.value;
            j["amplitude"] = s.amplitude;
            j["frequency"] = s.frequency;
            j["phase"] = s.phase;
            break;
        case ExponentKind::table: {
            Json pts = Json::array();
            for (const auto& p : s.points) pts.push_back(detail::point_to_json(p, dim));
            j["points"] = pts;
            j["values"] = s.values;
            break;
        }
        case ExponentKind::derived: {
            j["description"] = s.description;
            const auto [lo, hi] = f.range();
            j["range"] = Json::array({number_to_json(lo), number_to_json(hi)});
            break;
        }
    }
    return j;
}

inline ExponentField exponent_from_json(const Json& j, const Domain& domain, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigurationError("'" + where + "' must be an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = domain.dimension();
    ExponentField f = ExponentField::constant(0.0);
    if (kind == "constant") {
        detail::ObjectReader r(j, where, {"kind", "value"});
        f = ExponentField::constant(r.number("value"));
    } else if (kind == "affine") {
        detail::ObjectReader r(j, where, {"kind", "c", "slope"});
        const auto s = r.numbers("slope");
        if (static_cast<int>(s.size()) != dim)
            throw ConfigurationError("'" + where + ".slope' needs " + std::to_string(dim) + " numbers");
        f = ExponentField::affine(r.number("c"), {s[0], dim == 2 ? s[1] : 0.0}, domain);
    } else if (kind == "sine") {
        detail::ObjectReader r(j, where, {"kind", "c", "amplitude", "frequency", "phase"});
        f = ExponentField::sine(r.number("c"), r.number("amplitude"), r.number("frequency"), r.number_or("phase", 0.0));
    } else if (kind == "table") {
        detail::ObjectReader r(j, where, {"kind", "points", "values"});
        const Json& pts = r.required("points");
        if (!pts.is_array()) throw ConfigurationError("'" + where + ".points' must be an array");
        std::vector<Point> points;
        for (const auto& p : pts) points.push_back(detail::point_from_json(p, dim, where + ".points"));
        f = ExponentField::table(std::move(points), r.numbers("values"), dim);
    } else {
        throw ConfigurationError("unsupported exponent kind '" + kind + "' in " + where);
    }
    return f.on(domain);
}

// ---- family -------------------------------------------------------------

inline Json family_to_json(const FamilySpec& f, int dim) {
    Json j;
    j["kind"] = to_string(f.kind);
    j["count"] = f.count;
    if (!f.alphas.empty()) j["alphas"] = f.alphas;
    if (f.center) j["center"] = detail::point_to_json(*f.center, dim);
    if (f.radius) j["radius"] = *f.radius;
    if (f.kind == FamilyKind::potential_pair) j["s"] = f.s;
    return j;
}

inline FamilySpec family_from_json(const Json& j, int dim) {
    detail::ObjectReader r(j, "family", {"kind", "count", "alphas", "center", "radius", "s"});
    FamilySpec f;
    if (r.has("kind")) f.kind = family_kind_from_string(r.string("kind"));
    const double count = r.number_or("count", 10);
    if (count != std::floor(count) || count < 1) throw ConfigurationError("family.count must be a positive integer");
    f.count = static_cast<int>(count);
    if (r.has("alphas")) f.alphas = r.numbers("alphas");
    if (r.has("center")) {
        f.center = detail::point_from_json(r.required("center"), dim, "family.center");
    }
    if (r.has("radius")) f.radius = r.number("radius");
    f.s = r.number_or("s", f.s);
    return f;
}

// ---- case ---------------------------------------------------------------

struct LatticeSpec {
    std::vector<double> gamma, a, b;
    bool b_equals_a = false;
};

struct OutputSpec {
    std::string path;
    std::string format = "csv";
};

/// Everything one case file declares.
struct CaseFile {
    InequalityCase inequality;
    GridSpec grid;
    FamilySpec family;
    std::uint64_t seed = 0;
    std::optional<LatticeSpec> lattice;
    std::vector<int> resolutions;
    OutputSpec output;
};

inline bool is_application(Theorem t) {
    return t == Theorem::Poincare || t == Theorem::HardySobolev || t == Theorem::GagliardoNirenberg ||
           t == Theorem::FractionalHS;
}

/// JSON echo of a case, used in reports. Derived exponents are written with
/// their description and range only.
inline Json case_to_json(const InequalityCase& c, const GridSpec& g) {
    const int dim = g.domain.dimension();
    Json j;
    j["id"] = c.id;
    j["theorem"] = to_string(c.theorem);
    j["domain"] = grid_spec_to_json(g);
    j["gamma"] = c.gamma;
    j["a"] = c.a;
    j["b"] = c.b;
    if (c.x0) j["x0"] = detail::point_to_json(*c.x0, dim);
    j["p"] = exponent_to_json(c.p, dim);
    if (c.q) j["q"] = exponent_to_json(*c.q, dim);
    j["lambda"] = exponent_to_json(c.lam, dim);
    if (!c.aux.empty()) {
        Json aux;
        for (const auto& [k, v] : c.aux) aux[k] = v;
        j["aux"] = aux;
    }
    if (!c.exponents.empty()) {
        Json ex;
        for (const auto& [k, v] : c.exponents) ex[k] = exponent_to_json(v, dim);
        j["exponents"] = ex;
    }
    return j;
}

inline CaseFile case_file_from_json(const Json& j) {
    detail::ObjectReader r(j, "case file",
                           {"id", "theorem", "domain", "gamma", "a", "b", "x0", "p", "q", "lambda", "aux", "exponents",
                            "family", "seed", "lattice", "resolutions", "output"});
    CaseFile cf;
    InequalityCase& c = cf.inequality;
    if (r.has("id")) c.id = r.string("id");
    c.theorem = theorem_from_string(r.string("theorem"));
    cf.grid = grid_spec_from_json(r.required("domain"));
    const Domain& dom = cf.grid.domain;
    const int dim = dom.dimension();
    c.gamma = is_application(c.theorem) ? r.number_or("gamma", 1.0) : r.number("gamma");
    c.a = r.number_or("a", 0.0);
    c.b = r.number_or("b", 0.0);
    if (r.has("x0")) c.x0 = detail::point_from_json(r.required("x0"), dim, "x0");
    c.p = exponent_from_json(r.required("p"), dom, "p");
    if (r.has("q")) c.q = exponent_from_json(r.required("q"), dom, "q");
    c.lam = r.has("lambda") ? exponent_from_json(r.required("lambda"), dom, "lambda")
                            : ExponentField::constant(0.0).on(dom);
    if (r.has("aux")) {
        const Json& aux = r.required("aux");
        detail::ObjectReader ar(aux, "aux", {"mu", "nu", "theta", "s"});
        for (auto it = aux.begin(); it != aux.end(); ++it) c.aux[it.key()] = number_from_json(it.value(), "aux." + it.key());
    }
    if (r.has("exponents")) {
        const Json& ex = r.required("exponents");
        detail::ObjectReader er(ex, "exponents", {"r", "p_star"});
        for (auto it = ex.begin(); it != ex.end(); ++it)
            c.exponents.emplace(it.key(), exponent_from_json(it.value(), dom, "exponents." + it.key()));
    }
    if (r.has("family")) cf.family = family_from_json(r.required("family"), dim);
    if (c.theorem == Theorem::FractionalHS) {
        if (!c.aux.count("s")) throw ConfigurationError("missing required key 's' in aux");
        cf.family.s = c.aux.at("s");
    }
    if (r.has("seed")) {
        const double s = r.number("seed");
        if (s < 0 || s != std::floor(s) || s > 9.007199254740992e15)
            throw ConfigurationError("seed must be a nonnegative integer");
        cf.seed = static_cast<std::uint64_t>(s);
    }
    cf.family.seed = cf.seed;
    if (r.has("lattice")) {
        detail::ObjectReader lr(r.required("lattice"), "lattice", {"gamma", "a", "b", "b_equals_a"});
        LatticeSpec l;
        l.gamma = lr.has("gamma") ? lr.numbers("gamma") : std::vector<double>{c.gamma};
        l.a = lr.has("a") ? lr.numbers("a") : std::vector<double>{c.a};
        l.b_equals_a = lr.has("b_equals_a") && lr.required("b_equals_a").get<bool>();
        l.b = lr.has("b") ? lr.numbers("b") : std::vector<double>{c.b};
        if (l.gamma.empty() || l.a.empty() || l.b.empty()) throw ConfigurationError("lattice axes must be nonempty");
        cf.lattice = l;
    }
    if (r.has("resolutions")) {
        for (double v : r.numbers("resolutions")) {
            if (v != std::floor(v) || v < 4) throw ConfigurationError("resolutions must be integers >= 4");
            cf.resolutions.push_back(static_cast<int>(v));
        }
    }
    if (r.has("output")) {
        detail::ObjectReader orr(r.required("output"), "output", {"path", "format"});
        if (orr.has("path")) cf.output.path = orr.string("path");
        if (orr.has("format")) cf.output.format = orr.string("format");
        if (cf.output.format != "csv" && cf.output.format != "json")
            throw ConfigurationError("output.format must be 'csv' or 'json'");
    }
    return cf;
}

/// Reads and validates a case file. Parse errors carry line and column.
inline CaseFile load_case_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open case file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line/column
        const std::string text = buf.str();
        const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigurationError("malformed JSON in '" + path + "' at line " + std::to_string(line) + ", column " +
                                 std::to_string(col) + ": " + e.what());
    }
    return case_file_from_json(j);
}

/// One case per lattice point, in gamma-major, then a, then b order.
inline std::vector<InequalityCase> expand_lattice(const CaseFile& cf) {
    if (!cf.lattice) return {cf.inequality};
    std::vector<InequalityCase> out;
    const LatticeSpec& l = *cf.lattice;
    for (double g : l.gamma)
        for (double a : l.a) {
            const std::vector<double> bs = l.b_equals_a ? std::vector<double>{a} : l.b;
            for (double b : bs) {
                InequalityCase c = cf.inequality;
                c.gamma = g;
                c.a = a;
                c.b = b;
                c.id = cf.inequality.id + "#" + std::to_string(out.size());
                out.push_back(std::move(c));
            }
        }
    return out;
}

}  // namespace vexm
