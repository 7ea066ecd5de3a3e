// vexm: command-line front end for the variable-exponent Morrey toolkit.
//
//   vexm check  CASE            admissibility table, exit 0 / 2
//   vexm norm   CASE --function SPEC
//   vexm ratio  CASE            ratio report for the case's family
//   vexm sweep  CASE            one report per lattice point
//   vexm refine CASE            refinement study over several resolutions

#include <csignal>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"

#include "vexm/vexm.hpp"

namespace {

using namespace vexm;

constexpr int kExitAdmissible = 0;
constexpr int kExitError = 1;
constexpr int kExitInadmissible = 2;

struct Flags {
    std::string case_path;
    bool json = false;
    bool allow_inadmissible = false;
    std::string out;
    std::string format;
    unsigned threads = 1;
    std::string function;
    std::vector<int> resolutions;
    std::string timestamp;
};

// Temporary report path removed by the signal handler.
char g_partial[4096] = {0};

extern "C" void on_signal(int sig) {
    if (g_partial[0] != '\0') ::unlink(g_partial);
    ::_exit(128 + sig);
}

void install_signal_handlers() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
}

void export_guarded(const std::vector<RatioReport>& reports, const std::string& path, const std::string& format) {
    const std::string partial = path + ".partial";
    std::snprintf(g_partial, sizeof g_partial, "%s", partial.c_str());
    export_report(reports, path, format);
    g_partial[0] = '\0';
}

std::string fmt(double v, int precision = 10) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("-"); }

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::string resolve_format(const Flags& f, const CaseFile& cf) {
    const std::string format = f.format.empty() ? cf.output.format : f.format;
    if (format != "csv" && format != "json") throw ConfigurationError("--format must be csv or json");
    return format;
}

std::string resolve_out(const Flags& f, const CaseFile& cf, const std::string& format) {
    if (!f.out.empty()) return f.out;
    if (!cf.output.path.empty()) return cf.output.path;
    return cf.inequality.id + "_report." + format;
}

void print_verdict(const AdmissibilityVerdict& v, const InequalityCase& c) {
    std::cout << "case " << c.id << " (" << to_string(c.theorem) << ")\n";
    std::cout << std::left << std::setw(22) << "condition" << std::setw(8) << "status" << std::setw(11) << "kind"
              << "margin\n";
    for (const auto& k : v.conditions)
        std::cout << std::left << std::setw(22) << k.name << std::setw(8) << (k.satisfied ? "ok" : "FAILED")
                  << std::setw(11) << (k.strict ? "strict" : "non-strict") << fmt(k.margin + 0.0) << "\n";
    for (const auto& [k, x] : v.derived) std::cout << "derived " << k << " = " << fmt(x) << "\n";
    for (const auto& [k, x] : v.diagnostics) std::cout << "diagnostic " << k << " = " << fmt(x) << "\n";
    for (const auto& n : v.notes) std::cout << "note: " << n << "\n";
    std::cout << "overall: " << (v.overall ? "admissible" : "inadmissible") << "\n";
}

Json verdict_json(const AdmissibilityVerdict& v, const InequalityCase& c) {
    Json j;
    j["case_id"] = c.id;
    j["theorem"] = to_string(c.theorem);
    j["admissible"] = v.overall;
    j["verdict"] = verdict_to_json(v);
    return j;
}

int cmd_check(const Flags& f) {
    const CaseFile cf = load_case_file(f.case_path);
    const GridPtr grid = build_grid(cf.grid.domain, cf.grid.resolution);
    const auto v = check_case(cf.inequality, *grid);
    if (f.json)
        print_json(verdict_json(v, cf.inequality));
    else
        print_verdict(v, cf.inequality);
    return v.overall ? kExitAdmissible : kExitInadmissible;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_number(const std::string& s, const std::string& spec) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigurationError("bad number '" + s + "' in function spec '" + spec + "'");
    return v;
}

Point to_point(const std::string& s, int dim, const std::string& spec) {
    const auto parts = split(s, ',');
    if (static_cast<int>(parts.size()) != dim)
        throw ConfigurationError("point '" + s + "' in '" + spec + "' needs " + std::to_string(dim) + " coordinates");
    Point p{0.0, 0.0};
    for (int i = 0; i < dim; ++i) p[i] = to_number(parts[i], spec);
    return p;
}

// one | zero | const:c | power:alpha | bump:center:width | indicator:center:radius | trig:seed
GridFunction parse_function(const std::string& spec, const GridPtr& grid, const Point& x0) {
    const auto parts = split(spec, ':');
    const std::string& kind = parts.at(0);
    const int dim = grid->dimension();
    auto need = [&](std::size_t n) {
        if (parts.size() != n) throw ConfigurationError("function spec '" + spec + "' has the wrong number of fields");
    };
    if (kind == "one") {
        need(1);
        return GridFunction::constant(grid, 1.0);
    }
    if (kind == "zero") {
        need(1);
        return GridFunction::constant(grid, 0.0);
    }
    if (kind == "const") {
        need(2);
        return GridFunction::constant(grid, to_number(parts[1], spec));
    }
    if (kind == "power") {
        need(2);
        return weight_power(grid, x0, to_number(parts[1], spec));
    }
    if (kind == "bump") {
        need(3);
        const Point c = to_point(parts[1], dim, spec);
        const double w = to_number(parts[2], spec);
        if (!(w > 0)) throw ConfigurationError("bump width must be positive");
        return GridFunction::sample(grid, [&](const Point& x) {
            const double t = distance(x, c, dim) / w;
            return t < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
        });
    }
    if (kind == "indicator") {
        need(3);
        const Point c = to_point(parts[1], dim, spec);
        const double r = to_number(parts[2], spec);
        return GridFunction::sample(grid, [&](const Point& x) { return distance(x, c, dim) < r ? 1.0 : 0.0; });
    }
    if (kind == "trig") {
        need(2);
        FamilySpec fs;
        fs.kind = FamilyKind::trig;
        fs.count = 1;
        fs.seed = static_cast<std::uint64_t>(to_number(parts[1], spec));
        return generate_family(fs, grid).at(0).f;
    }
    throw ConfigurationError("unknown function kind '" + kind + "'");
}

int cmd_norm(const Flags& f) {
    const CaseFile cf = load_case_file(f.case_path);
    const GridPtr grid = build_grid(cf.grid.domain, cf.grid.resolution);
    const Point x0 = resolve_x0(cf.inequality, *grid);
    const GridFunction g = parse_function(f.function, grid, x0);
    const auto leb = lebesgue_norm(g, cf.inequality.p);
    const auto mor = morrey_norm(g, cf.inequality.p, cf.inequality.lam);
    if (f.json) {
        Json j;
        j["function"] = f.function;
        auto row = [](const NormResult& r) {
            Json x;
            x["value"] = r.value;
            x["modular_at_value"] = r.modular_at_value;
            x["iterations"] = r.bisection_iterations;
            x["bracket"] = Json::array({r.bracket.first, r.bracket.second});
            return x;
        };
        j["lebesgue"] = row(leb);
        j["morrey"] = row(mor);
        print_json(j);
    } else {
        std::cout << std::fixed << std::setprecision(6);
        std::cout << "lebesgue_norm " << leb.value << "  (modular " << leb.modular_at_value << ", iterations "
                  << leb.bisection_iterations << ")\n";
        std::cout << "morrey_norm   " << mor.value << "  (modular " << mor.modular_at_value << ", iterations "
                  << mor.bisection_iterations << ")\n";
    }
    return kExitAdmissible;
}

RunOptions run_options(const Flags& f, bool progress) {
    RunOptions o;
    o.allow_inadmissible = f.allow_inadmissible;
    o.timestamp = f.timestamp;
    if (progress) o.progress = [](const std::string& line) { std::cerr << line << std::endl; };
    return o;
}

Json report_summary(const RatioReport& r, const std::string& path) {
    Json j;
    j["case_id"] = r.case_id;
    j["admissible"] = r.admissible;
    j["forced"] = r.forced;
    j["sup_ratio"] = r.sup_ratio ? Json(*r.sup_ratio) : Json(nullptr);
    j["violation"] = r.violation;
    if (r.pointwise_ratio) j["pointwise_ratio"] = *r.pointwise_ratio;
    if (r.stability) j["stability"] = *r.stability;
    if (!r.error.empty()) j["error"] = r.error;
    if (!path.empty()) j["report"] = path;
    return j;
}

int cmd_ratio(const Flags& f) {
    const CaseFile cf = load_case_file(f.case_path);
    const std::string format = resolve_format(f, cf);
    const std::string out = resolve_out(f, cf, format);
    const GridPtr grid = build_grid(cf.grid.domain, cf.grid.resolution);
    const auto v = check_case(cf.inequality, *grid);
    if (!v.overall && !f.allow_inadmissible) {
        if (f.json) {
            Json j = verdict_json(v, cf.inequality);
            j["report"] = nullptr;
            print_json(j);
        } else {
            print_verdict(v, cf.inequality);
            std::cout << "not running an inadmissible case; pass --allow-inadmissible to force it\n";
        }
        return kExitInadmissible;
    }
    const RatioReport r = run_case(cf.inequality, cf.grid, cf.family, run_options(f, false));
    if (!r.error.empty()) throw NumericalError(r.error);
    export_guarded({r}, out, format);
    if (f.json) {
        print_json(report_summary(r, out));
    } else {
        std::cout << "sup_ratio " << fmt(r.sup_ratio) << " over " << r.members.size() << " members"
                  << (r.forced ? " (inadmissible case, forced)" : "") << (r.violation ? " VIOLATION" : "") << "\n";
        if (r.pointwise_ratio) std::cout << "pointwise_ratio " << fmt(*r.pointwise_ratio) << "\n";
        std::cout << "report written to " << out << "\n";
    }
    return r.admissible ? kExitAdmissible : kExitInadmissible;
}

int cmd_sweep(const Flags& f) {
    const CaseFile cf = load_case_file(f.case_path);
    const std::string format = resolve_format(f, cf);
    const std::string out = resolve_out(f, cf, format);
    const auto cases = expand_lattice(cf);
    const auto reports = sweep(cases, cf.grid, cf.family, run_options(f, true));
    export_guarded(reports, out, format);
    bool failed = false;
    Json arr = Json::array();
    for (const auto& r : reports) {
        failed = failed || !r.error.empty();
        if (f.json) {
            arr.push_back(report_summary(r, ""));
        } else {
            std::cout << std::left << std::setw(24) << r.case_id << " gamma " << fmt(r.gamma, 6) << " a "
                      << fmt(r.a, 6) << " b " << fmt(r.b, 6) << "  "
                      << (r.admissible ? "admissible" : "inadmissible") << "  sup_ratio " << fmt(r.sup_ratio)
                      << (r.error.empty() ? "" : "  error: " + r.error) << "\n";
        }
    }
    if (f.json) {
        Json j;
        j["report"] = out;
        j["cases"] = arr;
        print_json(j);
    } else {
        std::cout << reports.size() << " reports written to " << out << "\n";
    }
    return failed ? kExitError : kExitAdmissible;
}

int cmd_refine(const Flags& f) {
    const CaseFile cf = load_case_file(f.case_path);
    const std::string format = resolve_format(f, cf);
    const std::string out = resolve_out(f, cf, format);
    const std::vector<int> res = f.resolutions.empty() ? cf.resolutions : f.resolutions;
    const RatioReport r = refinement_study(cf.inequality, cf.grid, cf.family, res, run_options(f, true));
    if (!r.error.empty()) throw NumericalError(r.error);
    if (r.skipped) {
        if (f.json)
            print_json(verdict_json(r.verdict, cf.inequality));
        else
            print_verdict(r.verdict, cf.inequality);
        return kExitInadmissible;
    }
    export_guarded({r}, out, format);
    if (f.json) {
        Json j = report_summary(r, out);
        Json rows = Json::array();
        for (const auto& p : r.refinement)
            rows.push_back({{"resolution", p.resolution}, {"sup_ratio", p.sup_ratio ? Json(*p.sup_ratio) : Json(nullptr)}});
        j["refinement"] = rows;
        print_json(j);
    } else {
        std::cout << std::left << std::setw(12) << "resolution" << "sup_ratio\n";
        for (const auto& p : r.refinement) std::cout << std::left << std::setw(12) << p.resolution << fmt(p.sup_ratio) << "\n";
        std::cout << "stability " << fmt(r.stability) << "\n";
        std::cout << "report written to " << out << "\n";
    }
    return r.admissible ? kExitAdmissible : kExitInadmissible;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-exponent Lebesgue/Morrey norms and Stein-Weiss ratio checks"};
    app.require_subcommand(1);
    Flags f;
    app.add_flag("--json", f.json, "machine-readable output");
    app.add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 256u));

    auto with_case = [&](CLI::App* sub) { sub->add_option("case", f.case_path, "case file")->required(); };
    auto with_report = [&](CLI::App* sub) {
        sub->add_option("--out", f.out, "report path");
        sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--allow-inadmissible", f.allow_inadmissible, "run cases whose hypotheses fail");
        sub->add_option("--timestamp", f.timestamp, "timestamp recorded in the report metadata");
    };

    auto* check = app.add_subcommand("check", "admissibility verdict");
    with_case(check);
    auto* norm = app.add_subcommand("norm", "Lebesgue and Morrey norms of one function");
    with_case(norm);
    norm->add_option("--function", f.function, "one | zero | const:c | power:a | bump:c:w | indicator:z:r | trig:seed")
        ->required();
    auto* ratio = app.add_subcommand("ratio", "ratio report over the case's family");
    with_case(ratio);
    with_report(ratio);
    auto* sweep_cmd = app.add_subcommand("sweep", "ratio reports over the lattice block");
    with_case(sweep_cmd);
    with_report(sweep_cmd);
    auto* refine = app.add_subcommand("refine", "refinement study");
    with_case(refine);
    with_report(refine);
    refine->add_option("--resolutions", f.resolutions, "resolutions, increasing")->delimiter(',');
    for (auto* sub : {check, norm, ratio, sweep_cmd, refine}) {
        sub->add_flag("--json", f.json, "machine-readable output");
        sub->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 256u));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    install_signal_handlers();
    set_thread_count(f.threads);
    try {
        if (*check) return cmd_check(f);
        if (*norm) return cmd_norm(f);
        if (*ratio) return cmd_ratio(f);
        if (*sweep_cmd) return cmd_sweep(f);
        if (*refine) return cmd_refine(f);
    } catch (const std::exception& e) {
        if (f.json) {
            Json j;
            j["error"] = e.what();
            print_json(j);
        }
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
