#pragma once

/**
 * @file cli.hpp
 * @brief The `pellsha` command line: sha, verify, classgroup, conic, form.
 *
 * Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
 * JSON numbers are emitted as decimal strings; keys are sorted.
 */

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pellsha/bqf.hpp"
#include "pellsha/conic.hpp"
#include "pellsha/oracle.hpp"
#include "pellsha/qfield.hpp"
#include "pellsha/sha.hpp"

namespace pellsha::cli {

using nlohmann::json;

enum class OutputFormat { Table, Json, Csv };

inline constexpr const char* kVerifyCsvHeader = "D,h_plus,t,sha_order,squared_order,genus_index,ok";

inline std::string str(Int v) { return std::to_string(v); }
inline std::string str(const BigInt& v) { return v.str(); }

inline std::string join(const std::vector<Int>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s + "]";
}

inline std::string forms_list(const std::vector<FormClass>& cs) {
    std::string s;
    for (const auto& c : cs) s += (s.empty() ? "" : " ") + ("(" + c.rep.to_string() + ")");
    return s.empty() ? "-" : s;
}

/// Oracle re-check of one discriminant: naive class count and raw local search.
inline bool paranoid_check(const Discriminant& D, const ShaReport& r) {
    if (oracle::naive_class_count(D.value()) != r.h_plus) return false;
    ClassGroup G = class_group(D);
    for (const FormClass& c : G.elements()) {
        for (Int p : local_primes(D)) {
            int k = zp_threshold(D.value(), p);
            if (oracle::brute_local(c.rep, 1, p, k) != represents_over_zp(c.rep, 1, p)) return false;
        }
    }
    return true;
}

inline json report_json(const ShaReport& r) {
    json j;
    j["D"] = str(r.D.value());
    j["h_plus"] = str(r.h_plus);
    j["t"] = str(r.t);
    j["sha_order"] = str(r.sha_order);
    j["squared_order"] = str(r.squared_order);
    j["genus_index"] = str(r.genus_index);
    j["counting_order"] = str(r.counting_order);
    j["structure"] = json::array();
    for (Int d : r.structure) j["structure"].push_back(str(d));
    j["sha_classes"] = json::array();
    for (const auto& c : r.sha_classes) j["sha_classes"].push_back(c.rep.to_string());
    j["hasse_failures"] = json::array();
    for (const auto& c : r.hasse_failures) j["hasse_failures"].push_back(c.rep.to_string());
    j["ok"] = r.ok;
    return j;
}

inline json row_json(const ShaReport& r) {
    json j;
    j["D"] = str(r.D.value());
    j["h_plus"] = str(r.h_plus);
    j["t"] = str(r.t);
    j["sha_order"] = str(r.sha_order);
    j["squared_order"] = str(r.squared_order);
    j["genus_index"] = str(r.genus_index);
    j["ok"] = r.ok;
    return j;
}

inline std::string csv_row(const ShaReport& r) {
    std::ostringstream os;
    os << r.D.value() << ',' << r.h_plus << ',' << r.t << ',' << r.sha_order << ',' << r.squared_order << ','
       << r.genus_index << ',' << (r.ok ? "true" : "false");
    return os.str();
}

inline void print_report_table(std::ostream& out, const ShaReport& r) {
    auto line = [&](const char* key, const std::string& value) {
        out << std::left << std::setw(16) << key << value << '\n';
    };
    line("D", str(r.D.value()));
    line("h_plus", str(r.h_plus));
    line("t", str(r.t));
    line("genus_index", str(r.genus_index));
    line("structure", join(r.structure));
    line("sha_order", str(r.sha_order));
    line("squared_order", str(r.squared_order));
    line("counting_order", str(r.counting_order));
    line("sha_classes", forms_list(r.sha_classes));
    line("hasse_failures", forms_list(r.hasse_failures));
    line("ok", r.ok ? "true" : "false");
}

inline std::optional<Form> parse_form(const std::string& text) {
    Form f;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> f.a >> c1 >> f.b >> c2 >> f.c) || c1 != ',' || c2 != ',') return std::nullopt;
    std::string rest;
    if (is >> rest) return std::nullopt;
    return f;
}

struct Options {
    std::string format = "table";
    int jobs = 1;
    bool paranoid = false;
};

inline OutputFormat format_of(const Options& o) {
    if (o.format == "json") return OutputFormat::Json;
    if (o.format == "csv") return OutputFormat::Csv;
    return OutputFormat::Table;
}

/// Validation failure: message to stderr, exit code 2.
struct UsageError {
    std::string message;
};

inline Discriminant parse_discriminant(Int D) {
    if (auto why = fundamental_failure(D)) throw UsageError{"not a fundamental discriminant: " + *why};
    return Discriminant::make(D);
}

inline int cmd_sha(Int d, const Options& o, std::ostream& out) {
    Discriminant D = parse_discriminant(d);
    ShaReport r = verify_main_theorem(D);
    if (o.paranoid && !paranoid_check(D, r)) r.ok = false;
    switch (format_of(o)) {
        case OutputFormat::Json: out << report_json(r).dump() << '\n'; break;
        case OutputFormat::Csv: out << kVerifyCsvHeader << '\n' << csv_row(r) << '\n'; break;
        case OutputFormat::Table: print_report_table(out, r); break;
    }
    return r.ok ? 0 : 1;
}

struct ScanRow {
    std::optional<ShaReport> report;
    std::string error;
};

inline int emit_verify(const std::vector<Int>& ds, const std::vector<ScanRow>& rows, Int skipped, const Options& o,
                       std::ostream& out, std::ostream& err);

inline int cmd_verify(Int lo, Int hi, const Options& o, std::ostream& out, std::ostream& err) {
    if (lo > hi) throw UsageError{"empty range: --min " + str(lo) + " exceeds --max " + str(hi)};
    std::vector<Int> ds;
    Int skipped = 0;
    for (Int d = lo; d <= hi; ++d) {
        if (is_fundamental(d)) {
            ds.push_back(d);
        } else {
            ++skipped;
        }
    }
    std::vector<ScanRow> rows(ds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < ds.size(); i = next++) {
            try {
                Discriminant D = Discriminant::make(ds[i]);
                ShaReport r = verify_main_theorem(D);
                if (o.paranoid && !paranoid_check(D, r)) r.ok = false;
                rows[i].report = std::move(r);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    int jobs = std::max(1, o.jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return emit_verify(ds, rows, skipped, o, out, err);
}

/// Renders scan rows (already in D order); exit 1 if any row failed.
inline int emit_verify(const std::vector<Int>& ds, const std::vector<ScanRow>& rows, Int skipped, const Options& o,
                       std::ostream& out, std::ostream& err) {
    Int failed = 0;
    for (const auto& row : rows) {
        if (!row.report || !row.report->ok) ++failed;
    }
    const bool all_ok = failed == 0;
    switch (format_of(o)) {
        case OutputFormat::Json: {
            json doc;
            doc["rows"] = json::array();
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].report) {
                    doc["rows"].push_back(row_json(*rows[i].report));
                } else {
                    doc["rows"].push_back({{"D", str(ds[i])}, {"error", rows[i].error}, {"ok", false}});
                }
            }
            doc["summary"] = {{"checked", str(static_cast<Int>(ds.size()))},
                              {"skipped", str(skipped)},
                              {"failed", str(failed)},
                              {"ok", all_ok}};
            out << doc.dump() << '\n';
            break;
        }
        case OutputFormat::Csv:
            out << kVerifyCsvHeader << '\n';
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].report) {
                    out << csv_row(*rows[i].report) << '\n';
                } else {
                    out << ds[i] << ",,,,,,false\n";
                }
            }
            err << "checked " << ds.size() << ", skipped " << skipped << ", failed " << failed << '\n';
            break;
        case OutputFormat::Table:
            out << std::right << std::setw(8) << "D" << std::setw(8) << "h_plus" << std::setw(4) << "t"
                << std::setw(10) << "sha" << std::setw(10) << "squares" << std::setw(8) << "genera" << "  ok\n";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (!rows[i].report) {
                    out << std::setw(8) << ds[i] << "  error: " << rows[i].error << '\n';
                    continue;
                }
                const auto& r = *rows[i].report;
                out << std::setw(8) << r.D.value() << std::setw(8) << r.h_plus << std::setw(4) << r.t
                    << std::setw(10) << r.sha_order << std::setw(10) << r.squared_order << std::setw(8)
                    << r.genus_index << "  " << (r.ok ? "yes" : "NO") << '\n';
            }
            out << "checked " << ds.size() << ", skipped " << skipped << ", failed " << failed << '\n';
            break;
    }
    return all_ok ? 0 : 1;
}

inline int cmd_classgroup(Int d, const Options& o, std::ostream& out) {
    Discriminant D = parse_discriminant(d);
    ClassGroup G = class_group(D);
    std::vector<bool> square(G.size(), false);
    for (std::size_t i = 0; i < G.size(); ++i) square[G.mul(i, i)] = true;
    switch (format_of(o)) {
        case OutputFormat::Json: {
            json j;
            j["D"] = str(d);
            j["h_plus"] = str(static_cast<Int>(G.size()));
            j["structure"] = json::array();
            for (Int x : G.structure()) j["structure"].push_back(str(x));
            j["classes"] = json::array();
            for (std::size_t i = 0; i < G.size(); ++i) {
                j["classes"].push_back({{"form", G.elements()[i].rep.to_string()},
                                        {"order", str(static_cast<Int>(G.order(i)))},
                                        {"square", static_cast<bool>(square[i])}});
            }
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::Csv:
            out << "a,b,c,order,square\n";
            for (std::size_t i = 0; i < G.size(); ++i) {
                out << G.elements()[i].rep.to_string() << ',' << G.order(i) << ',' << (square[i] ? "true" : "false")
                    << '\n';
            }
            break;
        case OutputFormat::Table:
            for (std::size_t i = 0; i < G.size(); ++i) {
                out << std::left << std::setw(24) << G.elements()[i].rep.to_string() << " order " << std::setw(6)
                    << G.order(i) << (square[i] ? " square" : "") << '\n';
            }
            out << "h_plus " << G.size() << "  structure " << join(G.structure()) << '\n';
            break;
    }
    return 0;
}

inline int cmd_conic(Int d, Int count, const Options& o, std::ostream& out) {
    Discriminant D = parse_discriminant(d);
    if (count < 0) throw UsageError{"--count must be nonnegative"};
    PellConic<BigInt> C(d);
    IntegralPoint g = generator_point(D);
    std::vector<IntegralPoint> multiples;
    for (Int k = 1; k <= count; ++k) multiples.push_back(C.scalar_mul(k, g));
    std::vector<IntegralPoint> torsion;
    if (!D.is_real()) torsion = torsion_points(D);
    auto pt = [](const IntegralPoint& P) { return "(" + P.x.str() + "," + P.y.str() + ")"; };

    switch (format_of(o)) {
        case OutputFormat::Json: {
            json j;
            j["D"] = str(d);
            j["generator"] = {g.x.str(), g.y.str()};
            if (!D.is_real()) {
                j["torsion"] = json::array();
                for (const auto& P : torsion) j["torsion"].push_back({P.x.str(), P.y.str()});
            }
            j["multiples"] = json::array();
            for (const auto& P : multiples) j["multiples"].push_back({P.x.str(), P.y.str()});
            out << j.dump() << '\n';
            break;
        }
        case OutputFormat::Csv:
            out << "k,x,y\n";
            for (std::size_t i = 0; i < multiples.size(); ++i) {
                out << i + 1 << ',' << multiples[i].x.str() << ',' << multiples[i].y.str() << '\n';
            }
            break;
        case OutputFormat::Table:
            if (D.is_real()) {
                out << "fundamental point " << pt(g) << '\n';
            } else {
                out << "torsion";
                for (const auto& P : torsion) out << ' ' << pt(P);
                out << "\ngenerator " << pt(g) << '\n';
            }
            for (std::size_t i = 0; i < multiples.size(); ++i) out << i + 1 << "P = " << pt(multiples[i]) << '\n';
            break;
    }
    return 0;
}

inline Form require_form(const Discriminant& D, const std::string& text) {
    auto f = parse_form(text);
    if (!f) throw UsageError{"cannot parse form '" + text + "' (expected a,b,c)"};
    if (f->discriminant() != D.value()) {
        throw UsageError{"form " + f->to_string() + " has discriminant " + str(f->discriminant()) + ", not " +
                         str(D.value())};
    }
    if (!is_primitive(*f)) throw UsageError{"form " + f->to_string() + " is not primitive"};
    return *f;
}

inline int cmd_form(const std::string& sub, Int d, const std::vector<std::string>& args, Int bound,
                    const Options& o, std::ostream& out) {
    Discriminant D = parse_discriminant(d);
    const bool as_json = format_of(o) == OutputFormat::Json;
    auto need = [&](std::size_t n) {
        if (args.size() != n) throw UsageError{"form " + sub + " expects " + std::to_string(n) + " argument(s)"};
    };
    if (sub == "reduce") {
        need(1);
        Form f = require_form(D, args[0]);
        if (!D.is_real() && f.a < 0) throw UsageError{"negative definite forms are not reduced here"};
        Reduction r = reduce(f);
        FormClass cls = make_class(D, f);
        if (as_json) {
            json j{{"reduced", r.form.to_string()},
                   {"canonical", cls.rep.to_string()},
                   {"transform", {str(r.transform.p), str(r.transform.q), str(r.transform.r), str(r.transform.s)}}};
            out << j.dump() << '\n';
        } else {
            out << r.form.to_string() << '\n';
            out << "transform [[" << r.transform.p << "," << r.transform.q << "],[" << r.transform.r << ","
                << r.transform.s << "]]\n";
            out << "canonical " << cls.rep.to_string() << '\n';
        }
        return 0;
    }
    if (sub == "compose") {
        need(2);
        Form f = require_form(D, args[0]), g = require_form(D, args[1]);
        if (!D.is_real() && (f.a < 0 || g.a < 0)) throw UsageError{"compose expects positive definite forms"};
        FormClass c = compose(make_class(D, f), make_class(D, g));
        if (as_json) {
            out << json{{"class", c.rep.to_string()}}.dump() << '\n';
        } else {
            out << c.rep.to_string() << '\n';
        }
        return 0;
    }
    if (sub == "equiv") {
        need(2);
        bool eq = is_equivalent(require_form(D, args[0]), require_form(D, args[1]));
        if (as_json) {
            out << json{{"equivalent", eq}}.dump() << '\n';
        } else {
            out << (eq ? "true" : "false") << '\n';
        }
        return 0;
    }
    if (sub == "represent") {
        need(2);
        Form f = require_form(D, args[0]);
        Int n = 0;
        try {
            std::size_t pos = 0;
            n = std::stoll(args[1], &pos);
            if (pos != args[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw UsageError{"cannot parse integer '" + args[1] + "'"};
        }
        if (n == 0) throw UsageError{"n must be nonzero"};
        auto global = represents_globally(f, n, bound);
        std::vector<Int> primes = prime_divisors(checked::mul(checked::mul(2, d), n));
        json local = json::object();
        for (Int p : primes) local[str(p)] = represents_over_zp(f, n, p);
        bool real = represents_over_qp(f, n, LocalPlace::real());
        if (as_json) {
            json j;
            j["global"] = global ? json{str(global->first), str(global->second)} : json(nullptr);
            j["zp"] = local;
            j["real"] = real;
            out << j.dump() << '\n';
        } else {
            out << "global (|x|,|y| <= " << bound << "): ";
            if (global) {
                out << "(" << global->first << "," << global->second << ")\n";
            } else {
                out << "none\n";
            }
            for (Int p : primes) out << "Z_" << p << ": " << (local[str(p)].get<bool>() ? "yes" : "no") << '\n';
            out << "R: " << (real ? "yes" : "no") << '\n';
        }
        return 0;
    }
    throw UsageError{"unknown form subcommand '" + sub + "'"};
}

/// Entry point shared by the binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tate-Shafarevich groups of Pell conics x^2 - D y^2 = 4", "pellsha"};
    app.fallthrough();
    app.require_subcommand(1);
    Options o;
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"table", "json", "csv"}));
    auto* jobs = app.add_option("--jobs", o.jobs, "worker threads for verify (env PELLSHA_JOBS)")
                     ->check(CLI::PositiveNumber);
    app.add_flag("--paranoid", o.paranoid, "re-check every row against brute-force oracles");

    Int d = 0, lo = 0, hi = 0, count = 5, bound = kGlobalSearchBound;
    auto* sha = app.add_subcommand("sha", "report Sha(C/Z) for one discriminant");
    sha->add_option("D", d, "fundamental discriminant")->required();
    auto* verify = app.add_subcommand("verify", "check #Sha = #Cl+^2 = h+/2^(t-1) over a range");
    verify->add_option("--min", lo)->required();
    verify->add_option("--max", hi)->required();
    auto* cg = app.add_subcommand("classgroup", "list the narrow class group");
    cg->add_option("D", d)->required();
    auto* conic = app.add_subcommand("conic", "integral points of x^2 - D y^2 = 4");
    conic->add_option("D", d)->required();
    conic->add_option("--count", count, "number of multiples to print");
    auto* form = app.add_subcommand("form", "binary quadratic form utilities");
    form->require_subcommand(1);
    std::vector<std::string> args;
    std::string which;
    for (const char* name : {"reduce", "compose", "equiv", "represent"}) {
        auto* s = form->add_subcommand(name);
        s->add_option("D", d)->required();
        s->add_option("args", args, "forms as a,b,c (and n for represent)");
        if (std::string(name) == "represent") s->add_option("--bound", bound, "global search box");
        s->callback([&which, name] { which = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "pellsha: " << e.what() << '\n';
        return 2;
    }

    // CLI11 silently ignores environment values that fail validation, so read it here
    if (jobs->count() == 0) {
        if (const char* env = std::getenv("PELLSHA_JOBS"); env && *env) {
            const std::string_view v{env};
            auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), o.jobs);
            if (ec != std::errc{} || end != v.data() + v.size() || o.jobs < 1) {
                err << "pellsha: PELLSHA_JOBS must be a positive integer\n";
                return 2;
            }
        }
    }

    try {
        if (*sha) return cmd_sha(d, o, out);
        if (*verify) return cmd_verify(lo, hi, o, out, err);
        if (*cg) return cmd_classgroup(d, o, out);
        if (*conic) return cmd_conic(d, count, o, out);
        if (*form) return cmd_form(which, d, args, bound, o, out);
    } catch (const UsageError& e) {
        err << "pellsha: " << e.message << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "pellsha: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "pellsha: internal error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace pellsha::cli
