#pragma once

// CSV and JSON serialization of ratio reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vexm/case_file.hpp"
#include "vexm/errors.hpp"
#include "vexm/harness.hpp"

namespace vexm {

namespace detail {

inline Json optional_number(const std::optional<double>& v) { return v ? number_to_json(*v) : Json(nullptr); }

inline std::optional<double> optional_from_json(const Json& j, const std::string& where) {
    if (j.is_null()) return std::nullopt;
    return number_from_json(j, where);
}

inline const Json& field(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigurationError("report is missing '" + std::string(key) + "'");
    return j.at(key);
}

// Shortest decimal that round-trips; CSV uses the same text as JSON.
inline std::string csv_number(double v) { return number_to_json(v).dump(); }

}  // namespace detail

inline Json verdict_to_json(const AdmissibilityVerdict& v) {
    Json j;
    j["overall"] = v.overall;
    Json conds = Json::array();
    for (const auto& c : v.conditions) {
        Json row;
        row["name"] = c.name;
        row["satisfied"] = c.satisfied;
        row["margin"] = number_to_json(c.margin);
        row["strict"] = c.strict;
        conds.push_back(row);
    }
    j["conditions"] = conds;
    j["notes"] = v.notes;
    Json derived = Json::object(), diag = Json::object();
    for (const auto& [k, x] : v.derived) derived[k] = number_to_json(x);
    for (const auto& [k, x] : v.diagnostics) diag[k] = number_to_json(x);
    j["derived"] = derived;
    j["diagnostics"] = diag;
    return j;
}

inline AdmissibilityVerdict verdict_from_json(const Json& j) {
    using detail::field;
    AdmissibilityVerdict v;
    v.overall = field(j, "overall").get<bool>();
    for (const auto& row : field(j, "conditions"))
        v.conditions.push_back({field(row, "name").get<std::string>(), field(row, "satisfied").get<bool>(),
                                number_from_json(field(row, "margin"), "margin"), field(row, "strict").get<bool>()});
    v.notes = field(j, "notes").get<std::vector<std::string>>();
    for (auto it = field(j, "derived").begin(); it != field(j, "derived").end(); ++it)
        v.derived[it.key()] = number_from_json(it.value(), it.key());
    for (auto it = field(j, "diagnostics").begin(); it != field(j, "diagnostics").end(); ++it)
        v.diagnostics[it.key()] = number_from_json(it.value(), it.key());
    return v;
}

inline Json report_to_json(const RatioReport& r) {
    const int dim = r.grid.domain.dimension();
    Json j;
    j["case_id"] = r.case_id;
    j["theorem"] = to_string(r.theorem);
    j["gamma"] = r.gamma;
    j["a"] = r.a;
    j["b"] = r.b;
    j["case"] = r.case_spec;
    j["verdict"] = verdict_to_json(r.verdict);
    j["admissible"] = r.admissible;
    j["forced"] = r.forced;
    j["skipped"] = r.skipped;
    Json members = Json::array();
    for (const auto& m : r.members) {
        Json row;
        row["member"] = m.member;
        row["lhs"] = number_to_json(m.lhs);
        row["rhs"] = number_to_json(m.rhs);
        row["ratio"] = detail::optional_number(m.ratio);
        row["violation"] = m.violation;
        members.push_back(row);
    }
    j["members"] = members;
    j["sup_ratio"] = detail::optional_number(r.sup_ratio);
    j["violation"] = r.violation;
    j["pointwise_ratio"] = detail::optional_number(r.pointwise_ratio);
    Json refinement = Json::array();
    for (const auto& p : r.refinement) {
        Json row;
        row["resolution"] = p.resolution;
        row["sup_ratio"] = detail::optional_number(p.sup_ratio);
        refinement.push_back(row);
    }
    j["refinement"] = refinement;
    j["stability"] = detail::optional_number(r.stability);
    Json meta;
    meta["seed"] = r.seed;
    meta["grid"] = grid_spec_to_json(r.grid);
    meta["family"] = family_to_json(r.family, dim);
    if (!r.timestamp.empty()) meta["timestamp"] = r.timestamp;
    j["metadata"] = meta;
    j["error"] = r.error;
    return j;
}

inline RatioReport report_from_json(const Json& j) {
    using detail::field;
    RatioReport r;
    r.case_id = field(j, "case_id").get<std::string>();
    r.theorem = theorem_from_string(field(j, "theorem").get<std::string>());
    r.gamma = number_from_json(field(j, "gamma"), "gamma");
    r.a = number_from_json(field(j, "a"), "a");
    r.b = number_from_json(field(j, "b"), "b");
    r.case_spec = field(j, "case");
    r.verdict = verdict_from_json(field(j, "verdict"));
    r.admissible = field(j, "admissible").get<bool>();
    r.forced = field(j, "forced").get<bool>();
    r.skipped = field(j, "skipped").get<bool>();
    for (const auto& row : field(j, "members"))
        r.members.push_back({field(row, "member").get<std::string>(), number_from_json(field(row, "lhs"), "lhs"),
                             number_from_json(field(row, "rhs"), "rhs"),
                             detail::optional_from_json(field(row, "ratio"), "ratio"),
                             field(row, "violation").get<bool>()});
    r.sup_ratio = detail::optional_from_json(field(j, "sup_ratio"), "sup_ratio");
    r.violation = field(j, "violation").get<bool>();
    r.pointwise_ratio = detail::optional_from_json(field(j, "pointwise_ratio"), "pointwise_ratio");
    for (const auto& row : field(j, "refinement"))
        r.refinement.push_back({field(row, "resolution").get<int>(),
                                detail::optional_from_json(field(row, "sup_ratio"), "sup_ratio")});
    r.stability = detail::optional_from_json(field(j, "stability"), "stability");
    const Json& meta = field(j, "metadata");
    r.seed = field(meta, "seed").get<std::uint64_t>();
    r.grid = grid_spec_from_json(field(meta, "grid"));
    r.family = family_from_json(field(meta, "family"), r.grid.domain.dimension());
    r.family.seed = r.seed;
    if (meta.contains("timestamp")) r.timestamp = meta.at("timestamp").get<std::string>();
    r.error = field(j, "error").get<std::string>();
    return r;
}

inline std::string reports_to_json_text(const std::vector<RatioReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr.dump(2) + "\n";
}

inline std::vector<RatioReport> reports_from_json_text(const std::string& text) {
    const Json arr = Json::parse(text);
    if (!arr.is_array()) throw ConfigurationError("report file must hold a JSON array");
    std::vector<RatioReport> out;
    for (const auto& j : arr) out.push_back(report_from_json(j));
    return out;
}

inline const char* kCsvHeader = "case_id,member,theorem,gamma,a,b,lhs,rhs,ratio,admissible";

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

/// One row per (case, member); the ratio is empty when rhs = 0.
inline std::string reports_to_csv_text(const std::vector<RatioReport>& reports) {
    using detail::csv_number;
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : reports)
        for (const auto& m : r.members)
            os << csv_field(r.case_id) << ',' << csv_field(m.member) << ',' << to_string(r.theorem) << ','
               << csv_number(r.gamma) << ',' << csv_number(r.a) << ',' << csv_number(r.b) << ','
               << csv_number(m.lhs) << ',' << csv_number(m.rhs) << ',' << (m.ratio ? csv_number(*m.ratio) : "")
               << ',' << (r.admissible ? "true" : "false") << "\n";
    return os.str();
}

/// Writes `text` to `path` through a sibling temporary file and a rename, so
/// readers never observe a partially written file.
inline void write_file_atomically(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp + "'");
        out << text;
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw IoError("write failed for '" + path + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename into '" + path + "': " + ec.message());
    }
}

inline void export_report(const std::vector<RatioReport>& reports, const std::string& path,
                          const std::string& format) {
    if (format == "csv")
        write_file_atomically(path, reports_to_csv_text(reports));
    else if (format == "json")
        write_file_atomically(path, reports_to_json_text(reports));
    else
        throw ConfigurationError("unknown report format '" + format + "'");
}

}  // namespace vexm
