#pragma once

// NumberSet: an immutable set of naturals over the universe [1, limit].
//
// Layout:
//   bit x of words_      <->  x is an element (bit 0 is always clear)
//   cumulative_[w]       ==   popcount of words_[0 .. w)
//   elements_            ==   the members in ascending order
//
// rank(n) is one table lookup plus one popcount. Memory is about
// limit/4 bytes for the two word tables plus 8 bytes per element.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "primelike/error.hpp"

namespace primelike {

using Natural = std::uint64_t;

class NumberSet {
public:
    NumberSet() : NumberSet(0) {}

    // Empty set over [1, limit].
    explicit NumberSet(Natural limit)
        : limit_(limit), words_(limit / 64 + 1, 0), cumulative_(words_.size() + 1, 0) {}

    // Throws DomainError unless `elements` is strictly increasing within [1, limit].
    static NumberSet from_sorted(std::vector<Natural> elements, Natural limit) {
        NumberSet s(limit);
        Natural prev = 0;
        for (Natural x : elements) {
            if (x == 0 || x > limit)
                throw DomainError("NumberSet: element outside [1, limit]");
            if (x <= prev && prev != 0)
                throw DomainError("NumberSet: elements must be strictly increasing");
            s.words_[x >> 6] |= std::uint64_t{1} << (x & 63);
            prev = x;
        }
        s.elements_ = std::move(elements);
        s.build_ranks();
        return s;
    }

    // Takes ownership of a membership bitmap; bits above `limit` and bit 0 are cleared.
    static NumberSet from_words(std::vector<std::uint64_t> words, Natural limit) {
        NumberSet s;
        s.limit_ = limit;
        words.resize(limit / 64 + 1, 0);
        words[0] &= ~std::uint64_t{1};
        if (const unsigned tail = (limit & 63) + 1; tail < 64)
            words.back() &= (std::uint64_t{1} << tail) - 1;
        s.words_ = std::move(words);
        s.cumulative_.assign(s.words_.size() + 1, 0);
        s.build_ranks();
        s.elements_.reserve(s.cumulative_.back());
        for (std::size_t w = 0; w < s.words_.size(); ++w) {
            for (std::uint64_t bits = s.words_[w]; bits; bits &= bits - 1)
                s.elements_.push_back(w * 64 + static_cast<Natural>(std::countr_zero(bits)));
        }
        return s;
    }

    Natural limit() const noexcept { return limit_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    std::span<const Natural> elements() const noexcept { return elements_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    std::optional<Natural> min() const {
        if (elements_.empty()) return std::nullopt;
        return elements_.front();
    }
    std::optional<Natural> max() const {
        if (elements_.empty()) return std::nullopt;
        return elements_.back();
    }

    bool contains(Natural x) const {
        if (x == 0 || x > limit_) throw DomainError("contains: x outside [1, limit]");
        return test(x);
    }

    // Unchecked membership; any x is allowed, values above limit read as absent.
    bool test(Natural x) const noexcept {
        return x <= limit_ && ((words_[x >> 6] >> (x & 63)) & 1u);
    }

    // |{q in set : q <= n}|, the set's counting function.
    Natural rank(Natural n) const {
        if (n > limit_) throw DomainError("rank: n exceeds limit");
        const std::size_t w = n >> 6;
        const unsigned b = n & 63;
        const std::uint64_t mask = b == 63 ? ~std::uint64_t{0} : (std::uint64_t{2} << b) - 1;
        return cumulative_[w] + static_cast<Natural>(std::popcount(words_[w] & mask));
    }

    friend bool operator==(const NumberSet& a, const NumberSet& b) {
        return a.limit_ == b.limit_ && a.elements_ == b.elements_;
    }

private:
    void build_ranks() {
        Natural acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) {
            cumulative_[w] = acc;
            acc += static_cast<Natural>(std::popcount(words_[w]));
        }
        cumulative_[words_.size()] = acc;
    }

    Natural limit_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<Natural> cumulative_;
    std::vector<Natural> elements_;
};

struct SieveOptions {
    // Numbers per segment; rounded up to a multiple of 128 so segments own whole words.
    Natural segment_size = Natural{1} << 20;
    unsigned workers = 1;
};

namespace detail {

inline Natural isqrt(Natural n) {
    auto r = static_cast<Natural>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Odd primes up to `limit` by a plain sieve; only used for the sieving primes.
inline std::vector<Natural> small_odd_primes(Natural limit) {
    std::vector<char> composite(limit + 1, 0);
    std::vector<Natural> out;
    for (Natural i = 3; i <= limit; i += 2) {
        if (composite[i]) continue;
        out.push_back(i);
        for (Natural j = i * i; j <= limit; j += 2 * i) composite[j] = 1;
    }
    return out;
}

// Marks the primes of [lo, hi) into `words`. lo is a multiple of 128.
inline void sieve_segment(Natural lo, Natural hi, std::span<const Natural> base,
                          std::vector<char>& odd_composite, std::vector<std::uint64_t>& words) {
    const Natural odd_count = (hi - lo) / 2;  // odds lo+1, lo+3, ...
    odd_composite.assign(odd_count, 0);
    for (Natural p : base) {
        Natural start = p * p;
        if (start >= hi) break;
        if (start < lo) {
            start = (lo + p - 1) / p * p;
            if ((start & 1) == 0) start += p;
        }
        for (Natural j = start; j < hi; j += 2 * p) odd_composite[(j - lo) / 2] = 1;
    }
    for (Natural i = 0; i < odd_count; ++i) {
        const Natural x = lo + 1 + 2 * i;
        if (!odd_composite[i] && x >= 3) words[x >> 6] |= std::uint64_t{1} << (x & 63);
    }
}

}  // namespace detail

// Primes in [2, limit] by a segmented odd-only sieve of Eratosthenes.
// Beyond the output bitmap, each worker holds one segment of scratch.
inline NumberSet primes_up_to(Natural limit, SieveOptions opts = {}) {
    if (limit < 2) throw DomainError("primes_up_to: limit must be >= 2");
    if (opts.segment_size == 0) throw DomainError("primes_up_to: segment_size must be positive");
    const Natural seg = (opts.segment_size + 127) / 128 * 128;
    const auto base = detail::small_odd_primes(detail::isqrt(limit));

    std::vector<std::uint64_t> words(limit / 64 + 1, 0);
    words[0] |= std::uint64_t{1} << 2;
    const Natural end = limit + 1;
    const Natural segments = (end + seg - 1) / seg;

    auto work = [&](Natural first, Natural stride) {
        std::vector<char> scratch;
        for (Natural s = first; s < segments; s += stride) {
            const Natural lo = s * seg;
            const Natural hi = std::min(end, lo + seg);
            // odd_count uses (hi-lo)/2; make the range even-length so the last odd is kept.
            detail::sieve_segment(lo, hi + ((hi - lo) & 1), base, scratch, words);
        }
    };

    const unsigned workers = std::max(1u, opts.workers);
    if (workers == 1 || segments == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }
    return NumberSet::from_words(std::move(words), limit);
}

}  // namespace primelike
