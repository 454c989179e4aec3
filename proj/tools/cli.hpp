#pragma once

// Command dispatch for the primelike tool. Flag parsing lives in main.cpp;
// everything here works on a RunConfig so it can be driven from tests.

#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "primelike/primelike.hpp"

namespace primelike::cli {

enum class Command { sieve, gen_set, check, anb, prob, tail, report };

inline std::string_view to_string(Command c) {
    switch (c) {
        case Command::sieve: return "sieve";
        case Command::gen_set: return "gen-set";
        case Command::check: return "check";
        case Command::anb: return "anb";
        case Command::prob: return "prob";
        case Command::tail: return "tail";
        case Command::report: return "report";
    }
    return "?";
}

enum class Format { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
    Command command = Command::check;
    SetSpec spec;
    Natural lo = 4;
    Natural hi = 0;
    std::string output;  // empty: stdout
    Format format = Format::json;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    bool slow_mode = false;

    Natural allow_below = 42;  // check: failures below this do not fail the run
    Natural n = 0;             // anb, prob
    Natural sieve_limit = 0;
    Natural segment_size = Natural{1} << 20;
    std::optional<Natural> pmax;
    std::optional<Natural> c_from_pmax;
    Natural table_from = 0, table_to = 0, table_step = 0;  // prob table mode when table_step > 0
    Natural tail_from = 0;
    double tail_c = 1.0;
    std::string input;  // report
    bool plot_data = false;
};

// The configuration fields that determine a command's output.
inline Json config_json(const RunConfig& c) {
    Json j;
    j["command"] = std::string(to_string(c.command));
    switch (c.command) {
        case Command::sieve:
            j["limit"] = c.sieve_limit;
            j["segment"] = c.segment_size;
            break;
        case Command::gen_set:
            j["spec"] = spec_to_json(c.spec);
            break;
        case Command::check:
            j["spec"] = spec_to_json(c.spec);
            j["lo"] = c.lo;
            j["hi"] = c.hi;
            j["allow_below"] = c.allow_below;
            j["slow"] = c.slow_mode;
            j["format"] = c.format == Format::json ? "json" : "csv";
            j["workers"] = c.workers;
            break;
        case Command::anb:
            j["spec"] = spec_to_json(c.spec);
            j["n"] = c.n;
            break;
        case Command::prob:
            j["n"] = c.n;
            if (c.pmax) j["pmax"] = *c.pmax;
            if (c.c_from_pmax) j["c_from_pmax"] = *c.c_from_pmax;
            if (c.table_step) {
                j["table_from"] = c.table_from;
                j["table_to"] = c.table_to;
                j["table_step"] = c.table_step;
            }
            break;
        case Command::tail:
            j["from"] = c.tail_from;
            j["c"] = c.tail_c;
            break;
        case Command::report:
            j["in"] = c.input;
            j["plot_data"] = c.plot_data;
            break;
    }
    return j;
}

namespace detail {

inline void emit(const RunConfig& c, std::ostream& out, std::string_view text) {
    if (c.output.empty())
        out << text;
    else
        write_text_file(c.output, text);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string rational_text(const BigRational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

inline int run_sieve(const RunConfig& c, std::ostream& out) {
    const NumberSet p = primes_up_to(c.sieve_limit, {c.segment_size, c.workers});
    Json j;
    j["header"] = make_header(config_json(c));
    j["limit"] = c.sieve_limit;
    j["count"] = p.size();
    if (!c.output.empty()) {
        save_set_file(c.output, p, {std::string(" ") + kToolName + " " + kToolVersion, " sieve limit=" +
                                                                                            std::to_string(c.sieve_limit)});
        j["out"] = c.output;
    }
    out << dump(j);
    return kExitOk;
}

inline std::vector<std::string> set_file_comments(const SetSpec& spec) {
    std::vector<std::string> comments{std::string(" ") + kToolName + " " + kToolVersion};
    for (const auto& [k, v] : spec.to_pairs()) comments.push_back(" " + k + "=" + v);
    return comments;
}

inline int run_gen_set(const RunConfig& c, std::ostream& out) {
    if (c.output.empty()) throw InputError("gen-set: --out is required");
    const NumberSet s = build(c.spec, {c.segment_size, c.workers});
    save_set_file(c.output, s, set_file_comments(c.spec));
    out << "wrote " << s.size() << " elements (limit " << s.limit() << ") to " << c.output << "\n";
    return kExitOk;
}

inline int run_check(const RunConfig& c, std::ostream& out) {
    const NumberSet s = build(c.spec, {c.segment_size, c.workers});
    CheckOptions opts;
    opts.workers = c.workers;
    opts.slow = c.slow_mode;
    const CheckReport r = check_range(s, c.lo, c.hi, opts, c.spec);
    const Json header = make_header(config_json(c));
    emit(c, out, c.format == Format::json ? serialize_check_json(r, header) : serialize_check_csv(r, header));
    for (Natural f : r.failures)
        if (f >= c.allow_below) return kExitFailures;
    return kExitOk;
}

inline Json distance_json(const DistanceSet& d) {
    Json j;
    j["size"] = d.size();
    if (d.n <= 1000) j["members"] = d.members();
    return j;
}

inline int run_anb(const RunConfig& c, std::ostream& out) {
    const NumberSet s = build(c.spec, {c.segment_size, c.workers});
    const DistanceSet a = a_set(s, c.n);
    const DistanceSet b = b_set(s, c.n);
    std::vector<Natural> common;
    for (Natural d : a.members())
        if (b.has(d)) common.push_back(d);
    Json j;
    j["header"] = make_header(config_json(c));
    j["n"] = c.n;
    j["A"] = distance_json(a);
    j["B"] = distance_json(b);
    j["intersection_size"] = common.size();
    j["disjoint"] = disjoint(a, b);
    const auto rep = find_representation(s, 2 * c.n);
    j["representation"] = rep ? Json::array({rep->q1, rep->q2}) : Json(nullptr);
    emit(c, out, dump(j));
    return kExitOk;
}

inline int run_prob(const RunConfig& c, std::ostream& out) {
    if (c.table_step) {
        if (c.table_from < 3 || c.table_to < c.table_from) throw InputError("prob: bad --table-from/--table-to");
        std::vector<ModelRow> rows;
        for (Natural n = c.table_from; n <= c.table_to; n += c.table_step)
            rows.push_back(model_row(n, c.pmax, c.c_from_pmax));
        emit(c, out, model_table_csv(rows));
        return kExitOk;
    }
    const ModelRow row = model_row(c.n, c.pmax, c.c_from_pmax);
    Json j;
    j["header"] = make_header(config_json(c));
    j["n"] = row.params.n;
    j["k1"] = row.params.k1;
    j["k2"] = row.params.k2;
    j["domain_size"] = row.params.domain_size;
    j["damping_c"] = row.params.damping_c;
    if (const auto p = c.c_from_pmax ? c.c_from_pmax : c.pmax) {
        const auto coef = coefficient_c(*p);
        if (coef.exact) j["damping_c_exact"] = rational_text(*coef.exact);
    }
    j["ln_P_exact"] = nullable(row.ln_P_exact);
    j["log10_P_exact"] = nullable(row.ln_P_exact / std::numbers::ln10);
    j["log10_upper_bound"] = upper_bound_prob(c.n).log10();
    j["log10_f"] = row.log10_f;
    j["log10_tail"] = nullable(row.log10_tail);
    emit(c, out, dump(j));
    return kExitOk;
}

inline int run_tail(const RunConfig& c, std::ostream& out) {
    const TailIntegral t = tail_integral_detailed(c.tail_from, c.tail_c);
    Json j;
    j["header"] = make_header(config_json(c));
    j["from"] = c.tail_from;
    j["c"] = c.tail_c;
    j["log10_tail"] = t.value.log10();
    j["log10_f"] = log_f(c.tail_from, c.tail_c).log10();
    j["log10_correction"] = t.log10_correction;
    emit(c, out, dump(j));
    return kExitOk;
}

inline int run_report(const RunConfig& c, std::ostream& out) {
    if (!c.plot_data) throw InputError("report: only --plot-data is supported");
    if (c.output.empty()) throw InputError("report: --out is required");
    emit_plot_data(c.input, c.output);
    out << "wrote plot data to " << c.output << "\n";
    return kExitOk;
}

}  // namespace detail

// Exit status: 0 success, 1 failures at or above allow_below (check only).
// Input errors propagate as InputError / DomainError.
inline int run(const RunConfig& c, std::ostream& out = std::cout) {
    switch (c.command) {
        case Command::sieve: return detail::run_sieve(c, out);
        case Command::gen_set: return detail::run_gen_set(c, out);
        case Command::check: return detail::run_check(c, out);
        case Command::anb: return detail::run_anb(c, out);
        case Command::prob: return detail::run_prob(c, out);
        case Command::tail: return detail::run_tail(c, out);
        case Command::report: return detail::run_report(c, out);
    }
    return kExitInput;
}

}  // namespace primelike::cli
