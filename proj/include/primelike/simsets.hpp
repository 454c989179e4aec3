#pragma once

// Construction of prime-similar sets: perturbed primes (each p -> p +/- 1),
// translated sets, and the counting-function deviation between two sets.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "primelike/error.hpp"
#include "primelike/numset.hpp"
#include "primelike/setio.hpp"

namespace primelike {

enum class SetKind { primes, perturbed, shifted, file };

inline std::string_view to_string(SetKind k) {
    switch (k) {
        case SetKind::primes: return "primes";
        case SetKind::perturbed: return "perturbed";
        case SetKind::shifted: return "shifted";
        case SetKind::file: return "file";
    }
    return "?";
}

inline std::optional<SetKind> parse_set_kind(std::string_view s) {
    if (s == "primes") return SetKind::primes;
    if (s == "perturbed") return SetKind::perturbed;
    if (s == "shifted") return SetKind::shifted;
    if (s == "file") return SetKind::file;
    return std::nullopt;
}

// Declarative recipe for a set. For `shifted`, `base` names the set being
// translated; a null base means primes up to `limit`.
struct SetSpec {
    SetKind kind = SetKind::primes;
    Natural limit = 0;
    std::optional<std::uint64_t> seed;
    std::int64_t shift_t = 0;
    std::string path;
    std::shared_ptr<const SetSpec> base;

    static SetSpec primes(Natural limit) {
        SetSpec s;
        s.limit = limit;
        return s;
    }
    static SetSpec perturbed(Natural limit, std::uint64_t seed) {
        SetSpec s;
        s.kind = SetKind::perturbed;
        s.limit = limit;
        s.seed = seed;
        return s;
    }
    static SetSpec shifted(SetSpec base, std::int64_t t) {
        SetSpec s;
        s.kind = SetKind::shifted;
        s.limit = base.limit;
        s.shift_t = t;
        s.base = std::make_shared<const SetSpec>(std::move(base));
        return s;
    }
    static SetSpec from_file(std::string path) {
        SetSpec s;
        s.kind = SetKind::file;
        s.path = std::move(path);
        return s;
    }

    // key=value pairs in a fixed order; nested base keys carry a "base." prefix.
    std::vector<std::pair<std::string, std::string>> to_pairs() const {
        std::vector<std::pair<std::string, std::string>> out;
        out.emplace_back("kind", std::string(to_string(kind)));
        switch (kind) {
            case SetKind::primes:
                out.emplace_back("limit", std::to_string(limit));
                break;
            case SetKind::perturbed:
                out.emplace_back("limit", std::to_string(limit));
                out.emplace_back("seed", std::to_string(seed.value_or(0)));
                break;
            case SetKind::shifted: {
                out.emplace_back("shift", std::to_string(shift_t));
                const SetSpec b = base ? *base : primes(limit);
                for (auto& [k, v] : b.to_pairs()) out.emplace_back("base." + k, v);
                break;
            }
            case SetKind::file:
                out.emplace_back("path", path);
                break;
        }
        return out;
    }

    static SetSpec from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
        auto find = [&](std::string_view key) -> const std::string* {
            for (const auto& [k, v] : pairs)
                if (k == key) return &v;
            return nullptr;
        };
        auto num = [&](std::string_view key) -> Natural {
            const auto* v = find(key);
            Natural out = 0;
            if (!v || !detail::parse_natural(*v, out))
                throw InputError("set spec: missing or malformed '" + std::string(key) + "'");
            return out;
        };
        const auto* kind_text = find("kind");
        if (!kind_text) throw InputError("set spec: missing 'kind'");
        const auto kind = parse_set_kind(*kind_text);
        if (!kind) throw InputError("set spec: unknown kind '" + *kind_text + "'");

        switch (*kind) {
            case SetKind::primes: return primes(num("limit"));
            case SetKind::perturbed: return perturbed(num("limit"), num("seed"));
            case SetKind::file: {
                const auto* p = find("path");
                if (!p) throw InputError("set spec: missing 'path'");
                return from_file(*p);
            }
            case SetKind::shifted: {
                const auto* t = find("shift");
                if (!t) throw InputError("set spec: missing 'shift'");
                char* end = nullptr;
                const long long shift = std::strtoll(t->c_str(), &end, 10);
                if (t->empty() || *end != '\0') throw InputError("set spec: malformed 'shift'");
                std::vector<std::pair<std::string, std::string>> inner;
                for (const auto& [k, v] : pairs)
                    if (k.starts_with("base.")) inner.emplace_back(k.substr(5), v);
                if (inner.empty()) throw InputError("set spec: shifted set needs base.* keys");
                return shifted(from_pairs(inner), shift);
            }
        }
        throw InputError("set spec: unreachable kind");
    }

    friend bool operator==(const SetSpec& a, const SetSpec& b) { return a.to_pairs() == b.to_pairs(); }
};

inline std::string to_text(const SetSpec& spec) {
    std::string out;
    for (const auto& [k, v] : spec.to_pairs()) out += k + "=" + v + "\n";
    return out;
}

// Blank lines and '#' comments are ignored.
inline SetSpec parse_spec_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw InputError("set spec: expected key=value", line_no);
        pairs.emplace_back(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    return SetSpec::from_pairs(pairs);
}

// ---------------------------------------------------------------------------
// Perturbation

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// +1 or -1 for prime p, a pure function of (seed, p).
inline int keyed_sign(std::uint64_t seed, Natural p) {
    return (detail::splitmix64(detail::splitmix64(seed) ^ p) & 1u) ? +1 : -1;
}

struct PerturbOptions {
    // Test hook: replaces keyed_sign when set. Must return +1 or -1.
    std::function<int(Natural)> sign_override;
};

struct PerturbResult {
    NumberSet set;
    std::size_t flips = 0;          // choices reversed to avoid a collision
    std::vector<Natural> dropped;   // primes whose both images were taken
};

// Maps every element p of `primes` to p+1 or p-1. Primes are visited in
// ascending order; an image that is not above the previously emitted element
// is flipped, and if the flipped image is also taken the prime is dropped.
// The result's limit is primes.limit() + 1.
inline PerturbResult perturb_detailed(const NumberSet& primes, std::uint64_t seed,
                                      const PerturbOptions& opts = {}) {
    PerturbResult r;
    std::vector<Natural> out;
    out.reserve(primes.size());
    for (Natural p : primes.elements()) {
        const int s = opts.sign_override ? opts.sign_override(p) : keyed_sign(seed, p);
        if (s != 1 && s != -1) throw DomainError("perturb: sign must be +1 or -1");
        Natural image = s > 0 ? p + 1 : p - 1;
        const Natural prev = out.empty() ? 0 : out.back();
        if (image <= prev) {
            image = s > 0 ? p - 1 : p + 1;
            ++r.flips;
            if (image <= prev) {
                r.dropped.push_back(p);
                continue;
            }
        }
        out.push_back(image);
    }
    r.set = NumberSet::from_sorted(std::move(out), primes.limit() + 1);
    return r;
}

inline NumberSet perturb(const NumberSet& primes, std::uint64_t seed, const PerturbOptions& opts = {}) {
    return perturb_detailed(primes, seed, opts).set;
}

inline NumberSet perturb_primes(Natural limit, std::uint64_t seed, const PerturbOptions& opts = {},
                                SieveOptions sieve = {}) {
    if (limit < 3) throw DomainError("perturb_primes: limit must be >= 3");
    return perturb(primes_up_to(limit, sieve), seed, opts);
}

// ---------------------------------------------------------------------------
// Translation

// {x + t : x in base}; the universe moves with it (new limit = base.limit + t).
inline NumberSet shift_set(const NumberSet& base, std::int64_t t) {
    const auto lo = base.min();
    if (lo && static_cast<std::int64_t>(*lo) + t < 1)
        throw DomainError("shift_set: translation moves an element below 1");
    if (static_cast<std::int64_t>(base.limit()) + t < 0)
        throw DomainError("shift_set: translated universe is empty");
    std::vector<Natural> out;
    out.reserve(base.size());
    for (Natural x : base.elements()) out.push_back(static_cast<Natural>(static_cast<std::int64_t>(x) + t));
    return NumberSet::from_sorted(std::move(out), static_cast<Natural>(static_cast<std::int64_t>(base.limit()) + t));
}

// ---------------------------------------------------------------------------
// Similarity

struct SimilarityReport {
    Natural max_deviation = 0;
    Natural bound_c = 1;  // smallest integer c with |pi_Q(n) - pi_P(n)| < c on the samples
    Natural witness = 1;  // smallest sampled n attaining max_deviation
    Natural samples = 0;
    Natural step = 1;
};

inline Natural default_similarity_step(Natural limit) { return std::max<Natural>(1, limit / 100000); }

// |rank_Q(n) - rank_P(n)| for n = step, 2 step, ..., and the range end.
// step == 1 is exhaustive over [1, min(limits)].
inline SimilarityReport similarity(const NumberSet& q, const NumberSet& p, Natural step) {
    if (step == 0) throw DomainError("similarity: step must be >= 1");
    const Natural end = std::min(q.limit(), p.limit());
    if (end < 1) throw DomainError("similarity: empty evaluable range");

    SimilarityReport r;
    r.step = step;
    auto consider = [&](Natural n, Natural dev) {
        if (dev > r.max_deviation) {
            r.max_deviation = dev;
            r.witness = n;
        }
    };
    auto dev_at = [&](Natural n) {
        const Natural a = q.rank(n), b = p.rank(n);
        return a > b ? a - b : b - a;
    };

    if (step == 1) {
        // The deviation only changes at elements of either set, so visiting
        // every element in merged order covers all n in [1, end].
        consider(1, dev_at(1));
        auto qe = q.elements(), pe = p.elements();
        std::size_t i = 0, j = 0;
        Natural qr = 0, pr = 0;
        while (true) {
            const Natural x = i < qe.size() ? qe[i] : end + 1;
            const Natural y = j < pe.size() ? pe[j] : end + 1;
            const Natural n = std::min(x, y);
            if (n > end) break;
            if (x == n) ++qr, ++i;
            if (y == n) ++pr, ++j;
            consider(n, qr > pr ? qr - pr : pr - qr);
        }
        r.samples = end;
    } else {
        Natural n = step;
        for (; n <= end; n += step) {
            consider(n, dev_at(n));
            ++r.samples;
        }
        if (n - step != end) {
            consider(end, dev_at(end));
            ++r.samples;
        }
    }
    r.bound_c = r.max_deviation + 1;
    return r;
}

// (n, |rank_Q(n) - rank_P(n)|) at n = step, 2 step, ... up to min(limits).
inline std::vector<std::pair<Natural, Natural>> deviation_series(const NumberSet& q, const NumberSet& p,
                                                                 Natural step) {
    if (step == 0) throw DomainError("deviation_series: step must be >= 1");
    const Natural end = std::min(q.limit(), p.limit());
    std::vector<std::pair<Natural, Natural>> out;
    for (Natural n = step; n <= end; n += step) {
        const Natural a = q.rank(n), b = p.rank(n);
        out.emplace_back(n, a > b ? a - b : b - a);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline NumberSet build(const SetSpec& spec, SieveOptions sieve = {}) {
    switch (spec.kind) {
        case SetKind::primes:
            return primes_up_to(spec.limit, sieve);
        case SetKind::perturbed:
            if (!spec.seed) throw DomainError("build: perturbed spec requires a seed");
            return perturb_primes(spec.limit, *spec.seed, {}, sieve);
        case SetKind::shifted: {
            const NumberSet base = spec.base ? build(*spec.base, sieve) : primes_up_to(spec.limit, sieve);
            return shift_set(base, spec.shift_t);
        }
        case SetKind::file:
            return load_set_file(spec.path).set;
    }
    throw DomainError("build: unknown kind");
}

}  // namespace primelike
