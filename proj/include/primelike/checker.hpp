#pragma once

// Goldbach-style verification over an arbitrary NumberSet Q.
//
// For 2n, the distance sets are
//   A_n = { n - q : q in Q, q <= n }
//   B_n = { q - n : q in Q, n <= q < 2n }
// and 2n = q1 + q2 with q1, q2 in Q exactly when A_n and B_n intersect.
// The hot path never builds them: it walks Q upward from its minimum and
// probes 2n - q1 in the bitmap, which terminates after a handful of steps
// on prime-like sets.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "primelike/error.hpp"
#include "primelike/numset.hpp"
#include "primelike/simsets.hpp"

namespace primelike {

enum class Side { A, B };

struct DistanceSet {
    Natural n = 0;
    Side side = Side::A;
    std::vector<std::uint64_t> bits;  // bit d set <=> d is a member, d in [0, n)

    bool has(Natural d) const { return d < n && ((bits[d >> 6] >> (d & 63)) & 1u); }

    std::size_t size() const {
        std::size_t c = 0;
        for (auto w : bits) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    // Ascending.
    std::vector<Natural> members() const {
        std::vector<Natural> out;
        for (std::size_t w = 0; w < bits.size(); ++w)
            for (std::uint64_t b = bits[w]; b; b &= b - 1)
                out.push_back(w * 64 + static_cast<Natural>(std::countr_zero(b)));
        return out;
    }
};

inline DistanceSet a_set(const NumberSet& q, Natural n) {
    if (n > q.limit()) throw DomainError("a_set: n outside the set's universe");
    DistanceSet d{n, Side::A, std::vector<std::uint64_t>(n / 64 + 1, 0)};
    for (Natural x : q.elements()) {
        if (x > n) break;
        const Natural dist = n - x;
        d.bits[dist >> 6] |= std::uint64_t{1} << (dist & 63);
    }
    return d;
}

inline DistanceSet b_set(const NumberSet& q, Natural n) {
    if (n == 0 || 2 * n - 1 > q.limit()) throw DomainError("b_set: [n, 2n) must lie in the set's universe");
    DistanceSet d{n, Side::B, std::vector<std::uint64_t>(n / 64 + 1, 0)};
    const auto elems = q.elements();
    for (auto it = std::lower_bound(elems.begin(), elems.end(), n); it != elems.end() && *it < 2 * n; ++it) {
        const Natural dist = *it - n;
        d.bits[dist >> 6] |= std::uint64_t{1} << (dist & 63);
    }
    return d;
}

inline bool disjoint(const DistanceSet& a, const DistanceSet& b) {
    if (a.n != b.n) throw DomainError("disjoint: distance sets belong to different n");
    if (a.side != Side::A || b.side != Side::B) throw DomainError("disjoint: expected an A set and a B set");
    for (std::size_t w = 0; w < a.bits.size(); ++w)
        if (a.bits[w] & b.bits[w]) return false;
    return true;
}

struct Representation {
    Natural q1 = 0;
    Natural q2 = 0;
    friend bool operator==(const Representation&, const Representation&) = default;
};

namespace detail {

inline void check_even_in_universe(const NumberSet& q, Natural even2n, const char* who) {
    if (even2n % 2 != 0) throw DomainError(std::string(who) + ": argument must be even");
    if (even2n < 2 || even2n > 2 * q.limit())
        throw DomainError(std::string(who) + ": argument outside [2, 2*limit]");
}

inline std::optional<Representation> scan_representation(const NumberSet& q, Natural even2n) {
    const Natural half = even2n / 2;
    const auto elems = q.elements();
    // q2 <= limit forces q1 >= even2n - limit
    std::size_t i = even2n > q.limit() ? q.rank(even2n - q.limit() - 1) : 0;
    for (; i < elems.size(); ++i) {
        const Natural q1 = elems[i];
        if (q1 > half) break;
        if (q.test(even2n - q1)) return Representation{q1, even2n - q1};
    }
    return std::nullopt;
}

// 64 bits of `v` starting at bit `pos`; bits past the end read as zero.
inline std::uint64_t window64(std::span<const std::uint64_t> v, Natural pos) {
    const std::size_t w = pos >> 6;
    const unsigned s = pos & 63;
    if (w >= v.size()) return 0;
    std::uint64_t lo = v[w] >> s;
    if (s && w + 1 < v.size()) lo |= v[w + 1] << (64 - s);
    return lo;
}

}  // namespace detail

// Smallest q1 with q1 <= q2, q1 + q2 = even2n, both in Q. Values of q2 above
// Q's limit are outside the known universe and count as absent.
inline std::optional<Representation> find_representation(const NumberSet& q, Natural even2n) {
    detail::check_even_in_universe(q, even2n, "find_representation");
    return detail::scan_representation(q, even2n);
}

// Counts unordered representations {q1 <= q2} of 2n. Keeps a bit-reversed
// copy of Q so Q[q] & Q[2n - q] is evaluated 64 candidates at a time.
class RepresentationCounter {
public:
    explicit RepresentationCounter(const NumberSet& q) : q_(q), reversed_(q.limit() / 64 + 1, 0) {
        const Natural lim = q.limit();
        for (Natural x : q.elements()) {
            const Natural j = lim - x;
            reversed_[j >> 6] |= std::uint64_t{1} << (j & 63);
        }
    }

    Natural count(Natural even2n) const {
        detail::check_even_in_universe(q_, even2n, "RepresentationCounter::count");
        const Natural lim = q_.limit();
        const Natural half = even2n / 2;
        // reversed_ bit (q + lim - 2n) is Q[2n - q]; valid while 2n - q <= lim.
        const Natural first = even2n > lim ? even2n - lim : 0;
        if (first > half) return 0;
        const Natural offset = lim + first - even2n;  // reversed index of `first`
        Natural total = 0;
        for (Natural pos = first; pos <= half; pos += 64) {
            std::uint64_t both = detail::window64(q_.words(), pos) &
                                 detail::window64(reversed_, pos - first + offset);
            const Natural remaining = half - pos + 1;
            if (remaining < 64) both &= (std::uint64_t{1} << remaining) - 1;
            total += static_cast<Natural>(std::popcount(both));
        }
        return total;
    }

private:
    const NumberSet& q_;
    std::vector<std::uint64_t> reversed_;
};

struct Bucket {
    Natural lo = 0;  // first even examined in the bucket
    Natural hi = 0;  // last even examined in the bucket
    Natural sampled = 0;
    Natural min_reps = 0;
    double mean_reps = 0.0;
    Natural sum_reps = 0;  // not serialized; mean_reps = sum_reps / sampled

    friend bool operator==(const Bucket&, const Bucket&) = default;
};

struct CheckOptions {
    unsigned workers = 1;
    bool slow = false;               // representation counts for every even, not a sample
    Natural bucket_width = 1000000;  // buckets are [k*width, (k+1)*width)
    Natural sample_every = 1000;     // every k-th even within a bucket, starting at its first
};

struct CheckReport {
    SetSpec spec;
    Natural lo = 0;
    Natural hi = 0;
    std::vector<Natural> failures;  // ascending
    Natural threshold_N0 = 0;       // largest failure, or lo - 2 when none
    std::vector<Bucket> buckets;
    std::int64_t wall_ms = 0;
};

namespace detail {

struct ChunkResult {
    std::vector<Natural> failures;
    std::vector<Natural> sampled, min_reps, sum_reps;  // per bucket slot
};

inline Natural bucket_first_even(Natural idx, Natural width, Natural lo) {
    Natural start = std::max(lo, idx * width);
    return start + (start & 1);
}

}  // namespace detail

// Examines every even 2n in [lo, hi]. The result does not depend on
// opts.workers: chunks are contiguous, merged in order, and bucket sums are
// integers.
inline CheckReport check_range(const NumberSet& q, Natural lo, Natural hi, CheckOptions opts = {},
                               SetSpec spec = {}) {
    if (lo % 2 || hi % 2) throw DomainError("check_range: lo and hi must be even");
    if (lo < 4 || lo > hi || hi > 2 * q.limit())
        throw DomainError("check_range: need 4 <= lo <= hi <= 2*limit");
    if (opts.bucket_width < 2 || opts.sample_every == 0) throw DomainError("check_range: bad sampling options");
    const auto t0 = std::chrono::steady_clock::now();

    const Natural width = opts.bucket_width;
    const Natural first_bucket = lo / width;
    const Natural bucket_count = hi / width - first_bucket + 1;
    const RepresentationCounter counter(q);

    const Natural evens = (hi - lo) / 2 + 1;
    const unsigned workers = static_cast<unsigned>(std::clamp<Natural>(opts.workers, 1, evens));
    std::vector<detail::ChunkResult> results(workers);

    auto run_chunk = [&](unsigned k) {
        auto& r = results[k];
        r.sampled.assign(bucket_count, 0);
        r.min_reps.assign(bucket_count, std::numeric_limits<Natural>::max());
        r.sum_reps.assign(bucket_count, 0);
        const Natural begin = lo + 2 * (evens * k / workers);
        const Natural end = lo + 2 * (evens * (k + 1) / workers);  // exclusive
        for (Natural e = begin; e < end; e += 2) {
            if (!detail::scan_representation(q, e)) r.failures.push_back(e);
            const Natural slot = e / width - first_bucket;
            const Natural bstart = detail::bucket_first_even(e / width, width, lo);
            if (opts.slow || ((e - bstart) / 2) % opts.sample_every == 0) {
                const Natural c = counter.count(e);
                ++r.sampled[slot];
                r.min_reps[slot] = std::min(r.min_reps[slot], c);
                r.sum_reps[slot] += c;
            }
        }
    };

    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < workers; ++k) pool.emplace_back(run_chunk, k);
        for (auto& t : pool) t.join();
    }

    CheckReport report;
    report.spec = std::move(spec);
    report.lo = lo;
    report.hi = hi;
    for (auto& r : results) report.failures.insert(report.failures.end(), r.failures.begin(), r.failures.end());
    report.threshold_N0 = report.failures.empty() ? lo - 2 : report.failures.back();

    for (Natural s = 0; s < bucket_count; ++s) {
        const Natural idx = first_bucket + s;
        Bucket b;
        b.lo = detail::bucket_first_even(idx, width, lo);
        const Natural top = (idx + 1) * width - 1;
        b.hi = std::min(hi, top - (top & 1));
        if (b.lo > b.hi) continue;
        b.min_reps = std::numeric_limits<Natural>::max();
        for (const auto& r : results) {
            b.sampled += r.sampled[s];
            b.sum_reps += r.sum_reps[s];
            b.min_reps = std::min(b.min_reps, r.min_reps[s]);
        }
        if (b.sampled == 0) b.min_reps = 0;
        b.mean_reps = b.sampled ? static_cast<double>(b.sum_reps) / static_cast<double>(b.sampled) : 0.0;
        report.buckets.push_back(b);
    }
    report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace primelike
