#pragma once

// Set persistence format:
//
//   # comment lines (any number, leading)
//   limit=<N>            optional; defaults to the largest element
//   <element>            one decimal per line, strictly ascending
//
// Every line is '\n' terminated. Files produced by write_set_text() parse back
// to the same SetFile, and re-writing that SetFile reproduces the bytes.

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "primelike/error.hpp"
#include "primelike/numset.hpp"

namespace primelike {

struct SetFile {
    std::vector<std::string> comments;  // text after the leading '#'
    NumberSet set;
};

namespace detail {

inline void append_number(std::string& out, Natural v) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

inline bool parse_natural(std::string_view s, Natural& v) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

inline std::string write_set_text(const NumberSet& set, const std::vector<std::string>& comments = {}) {
    std::string out;
    out.reserve(set.size() * 9 + 64);
    for (const auto& c : comments) {
        if (c.find('\n') != std::string::npos)
            throw DomainError("write_set_text: comment contains a newline");
        out += '#';
        out += c;
        out += '\n';
    }
    out += "limit=";
    detail::append_number(out, set.limit());
    out += '\n';
    for (Natural x : set.elements()) {
        detail::append_number(out, x);
        out += '\n';
    }
    return out;
}

// Comments after the first data line are accepted and discarded.
inline SetFile parse_set_text(std::string_view text) {
    SetFile file;
    std::vector<Natural> elems;
    std::optional<Natural> limit;
    bool seen_data = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!line.empty() && line.front() == '#') {
            if (!seen_data) file.comments.emplace_back(line.substr(1));
            continue;
        }
        if (line.empty()) continue;
        if (line.starts_with("limit=")) {
            if (seen_data) throw InputError("limit= header must precede elements", line_no);
            Natural v = 0;
            if (!detail::parse_natural(line.substr(6), v))
                throw InputError("malformed limit header", line_no);
            limit = v;
            seen_data = true;
            continue;
        }
        seen_data = true;
        Natural v = 0;
        if (!detail::parse_natural(line, v))
            throw InputError("malformed element '" + std::string(line) + "'", line_no);
        if (v == 0) throw InputError("element 0 is outside the universe", line_no);
        if (!elems.empty() && v <= elems.back())
            throw InputError("elements must be strictly ascending", line_no);
        if (limit && v > *limit) throw InputError("element exceeds limit", line_no);
        elems.push_back(v);
    }
    const Natural lim = limit ? *limit : (elems.empty() ? 0 : elems.back());
    file.set = NumberSet::from_sorted(std::move(elems), lim);
    return file;
}

inline SetFile load_set_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open set file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_set_text(buf.str());
}

inline void save_set_file(const std::string& path, const NumberSet& set,
                          const std::vector<std::string>& comments = {}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write set file '" + path + "'");
    const auto text = write_set_text(set, comments);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace primelike
