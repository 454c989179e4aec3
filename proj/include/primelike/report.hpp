#pragma once

// Report serialization.
//
// Check report JSON (key order fixed):
//   { "header": {tool, version, config}, "schema_version", "spec", "lo", "hi",
//     "failures", "threshold_N0", "buckets": [{lo, hi, sampled, min_reps, mean_reps}],
//     "wall_ms" }
// The report *body* is everything except "header" and "wall_ms"; two runs of
// the same configuration produce identical bodies.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "primelike/checker.hpp"
#include "primelike/error.hpp"
#include "primelike/probmodel.hpp"
#include "primelike/setio.hpp"
#include "primelike/simsets.hpp"
#include "primelike/version.hpp"

namespace primelike {

using Json = nlohmann::ordered_json;

inline Json make_header(Json config) {
    Json h;
    h["tool"] = kToolName;
    h["version"] = kToolVersion;
    h["config"] = std::move(config);
    return h;
}

inline Json spec_to_json(const SetSpec& spec) {
    Json j = Json::object();
    for (const auto& [k, v] : spec.to_pairs()) j[k] = v;
    return j;
}

inline SetSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("report: 'spec' must be an object");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw InputError("report: spec values must be strings");
        pairs.emplace_back(k, v.get<std::string>());
    }
    return SetSpec::from_pairs(pairs);
}

inline Json check_report_json(const CheckReport& r, const Json& header) {
    Json j;
    j["header"] = header;
    j["schema_version"] = kSchemaVersion;
    j["spec"] = spec_to_json(r.spec);
    j["lo"] = r.lo;
    j["hi"] = r.hi;
    j["failures"] = r.failures;
    j["threshold_N0"] = r.threshold_N0;
    Json buckets = Json::array();
    for (const auto& b : r.buckets) {
        Json bj;
        bj["lo"] = b.lo;
        bj["hi"] = b.hi;
        bj["sampled"] = b.sampled;
        bj["min_reps"] = b.min_reps;
        bj["mean_reps"] = b.mean_reps;
        buckets.push_back(std::move(bj));
    }
    j["buckets"] = std::move(buckets);
    j["wall_ms"] = r.wall_ms;
    return j;
}

inline std::string serialize_check_json(const CheckReport& r, const Json& header) {
    return check_report_json(r, header).dump(2) + "\n";
}

struct ParsedCheckReport {
    CheckReport report;
    Json header;
};

inline ParsedCheckReport parse_check_json(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("report: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            throw InputError("report: unsupported schema_version");
        ParsedCheckReport out;
        out.header = j.at("header");
        auto& r = out.report;
        r.spec = spec_from_json(j.at("spec"));
        r.lo = j.at("lo").get<Natural>();
        r.hi = j.at("hi").get<Natural>();
        r.failures = j.at("failures").get<std::vector<Natural>>();
        r.threshold_N0 = j.at("threshold_N0").get<Natural>();
        for (const auto& bj : j.at("buckets")) {
            Bucket b;
            b.lo = bj.at("lo").get<Natural>();
            b.hi = bj.at("hi").get<Natural>();
            b.sampled = bj.at("sampled").get<Natural>();
            b.min_reps = bj.at("min_reps").get<Natural>();
            b.mean_reps = bj.at("mean_reps").get<double>();
            b.sum_reps = static_cast<Natural>(std::llround(b.mean_reps * static_cast<double>(b.sampled)));
            r.buckets.push_back(b);
        }
        r.wall_ms = j.at("wall_ms").get<std::int64_t>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("report: missing or mistyped field: ") + e.what());
    }
}

// Canonical text of the report minus its header and wall time.
inline std::string check_report_body(std::string_view json_text) {
    Json j = Json::parse(json_text);
    j.erase("header");
    j.erase("wall_ms");
    return j.dump(2);
}

namespace detail {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string join_naturals(const std::vector<Natural>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace detail

inline constexpr std::string_view kCheckCsvHeader = "lo,hi,sampled,min_reps,mean_reps";

// One bucket per row; run metadata goes in leading '#' lines.
inline std::string serialize_check_csv(const CheckReport& r, const Json& header) {
    std::string out;
    out += "# header=" + header.dump() + "\n";
    out += "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    for (const auto& [k, v] : r.spec.to_pairs()) out += "# spec." + k + "=" + v + "\n";
    out += "# lo=" + std::to_string(r.lo) + "\n";
    out += "# hi=" + std::to_string(r.hi) + "\n";
    out += "# failures=" + detail::join_naturals(r.failures) + "\n";
    out += "# threshold_N0=" + std::to_string(r.threshold_N0) + "\n";
    out += "# wall_ms=" + std::to_string(r.wall_ms) + "\n";
    out += kCheckCsvHeader;
    out += '\n';
    for (const auto& b : r.buckets) {
        out += std::to_string(b.lo) + "," + std::to_string(b.hi) + "," + std::to_string(b.sampled) + "," +
               std::to_string(b.min_reps) + "," + detail::format_double(b.mean_reps) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model table.

inline constexpr std::string_view kModelTableHeader = "n,k,domain_size,damping_c,ln_P_exact,log10_f,log10_tail";

inline std::string model_table_csv(const std::vector<ModelRow>& rows) {
    std::string out(kModelTableHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.params.n) + "," + std::to_string(r.params.k1) + "," +
               std::to_string(r.params.domain_size) + "," + detail::format_double(r.params.damping_c) + "," +
               detail::format_double(r.ln_P_exact) + "," + detail::format_double(r.log10_f) + "," +
               detail::format_double(r.log10_tail) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plot data: long-format CSV "series,x,y", one point per row.

struct PlotPoint {
    std::string series;
    double x = 0;
    double y = 0;
};

inline std::vector<PlotPoint> plot_points(const CheckReport& r) {
    std::vector<PlotPoint> pts;
    for (const auto& b : r.buckets) {
        pts.push_back({"min_reps", static_cast<double>(b.lo), static_cast<double>(b.min_reps)});
        pts.push_back({"mean_reps", static_cast<double>(b.lo), b.mean_reps});
    }
    for (Natural f : r.failures) pts.push_back({"failure", static_cast<double>(f), 0.0});
    return pts;
}

inline std::vector<PlotPoint> plot_points(const std::vector<ModelRow>& rows) {
    std::vector<PlotPoint> pts;
    for (const auto& r : rows) pts.push_back({"log10_f", static_cast<double>(r.params.n), r.log10_f});
    for (const auto& r : rows)
        if (!std::isnan(r.log10_tail)) pts.push_back({"log10_tail", static_cast<double>(r.params.n), r.log10_tail});
    for (const auto& r : rows)
        if (!std::isinf(r.ln_P_exact))
            pts.push_back({"log10_P_exact", static_cast<double>(r.params.n), r.ln_P_exact / std::numbers::ln10});
    return pts;
}

// |pi_Q(n) - pi(n)| for a stored set against the primes of the same universe.
inline std::vector<PlotPoint> deviation_points(const NumberSet& q, Natural step) {
    std::vector<PlotPoint> pts;
    if (q.limit() < 2) return pts;
    const NumberSet p = primes_up_to(q.limit());
    for (auto [n, d] : deviation_series(q, p, step))
        pts.push_back({"deviation", static_cast<double>(n), static_cast<double>(d)});
    return pts;
}

inline std::string plot_csv(const std::vector<PlotPoint>& pts) {
    std::string out = "series,x,y\n";
    for (const auto& p : pts) out += p.series + "," + detail::format_double(p.x) + "," + detail::format_double(p.y) + "\n";
    return out;
}

// Reads back a model_table_csv() file. Only the plotted columns are recovered exactly.
inline std::vector<ModelRow> parse_model_table_csv(std::string_view text) {
    std::vector<ModelRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kModelTableHeader) throw InputError("model table: unexpected header", line_no);
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (cells.size() != 7) throw InputError("model table: expected 7 columns", line_no);
        ModelRow r;
        try {
            r.params.n = std::stoull(cells[0]);
            r.params.k1 = r.params.k2 = std::stoull(cells[1]);
            r.params.domain_size = std::stoull(cells[2]);
            r.params.damping_c = std::strtod(cells[3].c_str(), nullptr);
            r.ln_P_exact = std::strtod(cells[4].c_str(), nullptr);
            r.log10_f = std::strtod(cells[5].c_str(), nullptr);
            r.log10_tail = std::strtod(cells[6].c_str(), nullptr);
        } catch (const std::exception&) {
            throw InputError("model table: malformed number", line_no);
        }
        rows.push_back(r);
    }
    if (!header_seen) throw InputError("model table: missing header");
    return rows;
}

// Recovers failures and buckets from a serialize_check_csv() summary.
inline std::vector<PlotPoint> plot_points_from_check_csv(std::string_view text) {
    CheckReport r;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool rows = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.starts_with("# failures=")) {
            std::stringstream ss(line.substr(11));
            for (std::string c; std::getline(ss, c, ',');) r.failures.push_back(std::stoull(c));
            continue;
        }
        if (line[0] == '#') continue;
        if (!rows) {
            rows = line == kCheckCsvHeader;
            if (!rows) throw InputError("check csv: unexpected header", line_no);
            continue;
        }
        Bucket b;
        char tail = 0;
        unsigned long long lo = 0, hi = 0, sampled = 0, min_reps = 0;
        if (std::sscanf(line.c_str(), "%llu,%llu,%llu,%llu,%lf%c", &lo, &hi, &sampled, &min_reps, &b.mean_reps,
                        &tail) != 5)
            throw InputError("check csv: malformed row", line_no);
        b.lo = lo, b.hi = hi, b.sampled = sampled, b.min_reps = min_reps;
        r.buckets.push_back(b);
    }
    return plot_points(r);
}

// Dispatches on the input's content: check report JSON, model table CSV, or set file.
inline std::string plot_data_for(std::string_view input) {
    std::size_t i = 0;
    while (i < input.size() && std::isspace(static_cast<unsigned char>(input[i]))) ++i;
    if (i < input.size() && input[i] == '{') return plot_csv(plot_points(parse_check_json(input).report));

    std::istringstream in{std::string(input)};
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    }
    if (line == kModelTableHeader) return plot_csv(plot_points(parse_model_table_csv(input)));
    if (line == kCheckCsvHeader) return plot_csv(plot_points_from_check_csv(input));
    const SetFile f = parse_set_text(input);
    return plot_csv(deviation_points(f.set, default_similarity_step(f.set.limit())));
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InputError("write failed for '" + path + "'");
}

inline void emit_plot_data(const std::string& in_path, const std::string& out_path) {
    write_text_file(out_path, plot_data_for(read_text_file(in_path)));
}

}  // namespace primelike
