#pragma once

// Random-subset model for A_n / B_n disjointness.
//
// With |A| = k1 and |B| = k2 drawn uniformly from an m-slot domain,
//   P(A and B disjoint) = C(m, k1) C(m - k1, k2) / (C(m, k1) C(m, k2))
//                       = C(m - k1, k2) / C(m, k2).
// Everything is carried as a natural log: at n ~ 10^5 the values are far
// below the smallest double.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "primelike/error.hpp"
#include "primelike/numset.hpp"
#include "primelike/simsets.hpp"

namespace primelike {

// A probability held as its natural log; ln == -inf is an exact zero.
class LogProb {
public:
    static LogProb from_ln(double ln) {
        if (std::isnan(ln) || ln > 1e-12) throw DomainError("LogProb: log-probability must be <= 0");
        return LogProb(std::min(ln, 0.0));
    }
    static LogProb zero() { return LogProb(-std::numeric_limits<double>::infinity()); }
    static LogProb one() { return LogProb(0.0); }

    double ln() const noexcept { return ln_; }
    double log10() const noexcept { return ln_ / std::numbers::ln10; }
    double value() const noexcept { return std::exp(ln_); }
    bool is_zero() const noexcept { return std::isinf(ln_); }

    friend auto operator<=>(const LogProb&, const LogProb&) = default;

private:
    explicit LogProb(double ln) : ln_(ln) {}
    double ln_;
};

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr Natural kExactBinomialMax = 64;

namespace detail {

using u128 = unsigned __int128;

// Exact for n <= 67 (C(67, 33) < 2^64).
inline std::uint64_t binomial_u64(Natural n, Natural k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 c = 1;
    for (Natural i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial_u64 overflow");
    return static_cast<std::uint64_t>(c);
}

inline long double ln_binomial(Natural n, Natural k) {
    return std::lgammal(static_cast<long double>(n) + 1) - std::lgammal(static_cast<long double>(k) + 1) -
           std::lgammal(static_cast<long double>(n - k) + 1);
}

inline void check_disjoint_args(Natural m, Natural k1, Natural k2) {
    if (k1 > m || k2 > m) throw DomainError("exact_disjoint_prob: subset size exceeds domain");
}

// The log-gamma route, usable at any m.
inline double ln_disjoint_lgamma(Natural m, Natural k1, Natural k2) {
    check_disjoint_args(m, k1, k2);
    if (k2 > m - k1) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(ln_binomial(m - k1, k2) - ln_binomial(m, k2));
}

}  // namespace detail

// C(m - k1, k2) / C(m, k2) in lowest terms; m <= kExactBinomialMax.
inline Rational exact_disjoint_rational(Natural m, Natural k1, Natural k2) {
    detail::check_disjoint_args(m, k1, k2);
    if (m > kExactBinomialMax) throw DomainError("exact_disjoint_rational: m too large for exact route");
    const std::uint64_t num = detail::binomial_u64(m - k1, k2);
    const std::uint64_t den = detail::binomial_u64(m, k2);
    if (num == 0) return {0, 1};
    const std::uint64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

// Exact rationals up to m = 64, log-gamma beyond.
inline LogProb exact_disjoint_prob(Natural m, Natural k1, Natural k2) {
    detail::check_disjoint_args(m, k1, k2);
    if (k2 > m - k1) return LogProb::zero();
    if (k1 == 0 || k2 == 0) return LogProb::one();
    if (m <= kExactBinomialMax) {
        const Rational r = exact_disjoint_rational(m, k1, k2);
        return LogProb::from_ln(static_cast<double>(std::log(static_cast<long double>(r.num)) -
                                                    std::log(static_cast<long double>(r.den))));
    }
    return LogProb::from_ln(detail::ln_disjoint_lgamma(m, k1, k2));
}

// (1 - 1/ln n)^(n / ln n), the model probability after substituting k1 = k2 = n/ln n.
inline LogProb upper_bound_prob(double n) {
    if (!(n >= 3)) throw DomainError("upper_bound_prob: n must be >= 3");
    const double L = std::log(n);
    return LogProb::from_ln((n / L) * std::log1p(-1.0 / L));
}
inline LogProb upper_bound_prob(Natural n) {
    if (n < 3) throw DomainError("upper_bound_prob: n must be >= 3");
    return upper_bound_prob(static_cast<double>(n));
}

// ln f(n) = -c n / ln^2 n.
inline LogProb log_f(double n, double damping_c) {
    if (!(n >= 3)) throw DomainError("log_f: n must be >= 3");
    if (!(damping_c >= 1)) throw DomainError("log_f: damping_c must be >= 1");
    const double L = std::log(n);
    return LogProb::from_ln(-damping_c * n / (L * L));
}
inline LogProb log_f(Natural n, double damping_c) {
    if (n < 3) throw DomainError("log_f: n must be >= 3");
    return log_f(static_cast<double>(n), damping_c);
}

// ---------------------------------------------------------------------------

using BigRational = boost::multiprecision::cpp_rational;

struct DampingCoefficient {
    double value = 1.0;
    std::optional<BigRational> exact;  // present for p_max <= kExactCoefficientMax
};

inline constexpr Natural kExactCoefficientMax = 10000;

// prod over primes p <= p_max of p / (p - 1).
inline DampingCoefficient coefficient_c(Natural p_max) {
    if (p_max < 2) throw DomainError("coefficient_c: p_max must be >= 2");
    const NumberSet primes = primes_up_to(p_max);
    DampingCoefficient out;
    if (p_max <= kExactCoefficientMax) {
        boost::multiprecision::cpp_int num = 1, den = 1;
        for (Natural p : primes.elements()) {
            num *= p;
            den *= p - 1;
        }
        BigRational r(num, den);
        out.value = r.convert_to<double>();
        out.exact = std::move(r);
    } else {
        long double acc = 0;
        for (Natural p : primes.elements()) acc += std::log1pl(1.0L / static_cast<long double>(p - 1));
        out.value = static_cast<double>(std::exp(acc));
    }
    return out;
}

struct ModelParams {
    Natural n = 0;
    Natural k1 = 0;
    Natural k2 = 0;
    Natural domain_size = 0;
    double damping_c = 1.0;
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// round(n / ln n), the expected count of set elements in (0, n] and in [n, 2n).
inline Natural expected_count(Natural n) {
    return static_cast<Natural>(std::llround(static_cast<double>(n) / std::log(static_cast<double>(n))));
}

// Unfiltered domain {0, ..., n-1}.
inline ModelParams base_params(Natural n) {
    if (n < 3) throw DomainError("base_params: n must be >= 3");
    const Natural k = expected_count(n);
    return {n, k, k, n, 1.0};
}

// Parity filter (p_max = 2): ceil(n/2) slots, c = 2.
// Parity and mod-3 filter (p_max = 3): floor(n/3) slots, c = 3.
inline ModelParams residue_filtered_params(Natural n, Natural p_max) {
    if (n < 6) throw DomainError("residue_filtered_params: n must be >= 6");
    if (p_max != 2 && p_max != 3) throw DomainError("residue_filtered_params: p_max must be 2 or 3");
    const Natural k = expected_count(n);
    const Natural m = p_max == 2 ? (n + 1) / 2 : n / 3;
    return {n, k, k, m, coefficient_c(p_max).value};
}

// Model probability for params; -inf when the subsets cannot fit the domain.
inline LogProb model_disjoint_prob(const ModelParams& p) {
    if (p.k1 > p.domain_size || p.k2 > p.domain_size) return LogProb::zero();
    return exact_disjoint_prob(p.domain_size, p.k1, p.k2);
}

// ---------------------------------------------------------------------------
// Tail integral of f.

namespace detail {

struct SimpsonState {
    int max_depth = 60;
};

template <class F>
double adaptive_simpson(const F& h, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth, const SimpsonState& st) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = h(lm), frm = h(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15 * tol) return left + right + delta / 15;
    if (depth >= st.max_depth) throw std::logic_error("tail_integral: quadrature did not converge");
    return adaptive_simpson(h, a, m, fa, flm, fm, left, tol / 2, depth + 1, st) +
           adaptive_simpson(h, m, b, fm, frm, fb, right, tol / 2, depth + 1, st);
}

}  // namespace detail

struct TailIntegral {
    LogProb value = LogProb::one();  // the integral itself (it is < 1 for N >= 100, c >= 1)
    double log10_correction = 0;     // log10( integral / f(N) )
    int panels = 0;
};

// Integral of exp(-c x / ln^2 x) over [N, inf). Computed as f(N) times the
// integral of exp(g(x) - g(N)) with g = ln f; the shifted integrand is <= 1,
// so nothing underflows. Panels start at the local decay length 1/|g'(N)| and
// double in width until the integrand falls below 1e-30.
inline TailIntegral tail_integral_detailed(Natural N, double damping_c) {
    if (N < 100) throw DomainError("tail_integral: N must be >= 100");
    if (!(damping_c >= 1)) throw DomainError("tail_integral: damping_c must be >= 1");
    constexpr double rel_tol = 1e-6;
    constexpr double cutoff = 1e-30;
    constexpr int max_panels = 400;

    const double x0 = static_cast<double>(N);
    auto g = [&](double x) {
        const double L = std::log(x);
        return -damping_c * x / (L * L);
    };
    const double g0 = g(x0);
    auto h = [&](double x) { return std::exp(g(x) - g0); };

    const double L0 = std::log(x0);
    const double slope = damping_c * (L0 - 2) / (L0 * L0 * L0);
    double width = 1.0 / slope;
    double a = x0, fa = 1.0, total = 0;
    detail::SimpsonState st;
    int panels = 0;
    while (true) {
        if (++panels > max_panels) throw std::logic_error("tail_integral: panel limit reached");
        const double b = a + width;
        const double fb = h(b);
        const double fm = h(0.5 * (a + b));
        const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
        total += detail::adaptive_simpson(h, a, b, fa, fm, fb, whole, rel_tol * std::max(whole, 1e-300), 0, st);
        if (fb < cutoff) break;
        a = b;
        fa = fb;
        width *= 2;
    }
    TailIntegral out;
    out.value = LogProb::from_ln(g0 + std::log(total));
    out.log10_correction = std::log10(total);
    out.panels = panels;
    return out;
}

inline LogProb tail_integral(Natural N, double damping_c) { return tail_integral_detailed(N, damping_c).value; }

// ---------------------------------------------------------------------------
// Monte Carlo oracle.

namespace detail {

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, bound), Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) {
        u128 prod = static_cast<u128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(prod);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                prod = static_cast<u128>(next()) * bound;
                low = static_cast<std::uint64_t>(prod);
            }
        }
        return static_cast<std::uint64_t>(prod >> 64);
    }
};

// Floyd's algorithm: a uniform k-subset of {0, ..., m-1} into `bits`.
inline void sample_subset(SplitMix64& rng, Natural m, Natural k, std::vector<std::uint64_t>& bits) {
    std::fill(bits.begin(), bits.end(), 0);
    for (Natural j = m - k; j < m; ++j) {
        Natural t = rng.below(j + 1);
        if ((bits[t >> 6] >> (t & 63)) & 1u) t = j;
        bits[t >> 6] |= std::uint64_t{1} << (t & 63);
    }
}

}  // namespace detail

struct MonteCarloResult {
    Natural trials = 0;
    Natural disjoint = 0;
    double frequency = 0;
    double std_error = 0;  // sqrt(f (1 - f) / trials)
};

// Trial i draws from a generator seeded by (seed, i), so the outcome is the
// same for any worker count.
inline MonteCarloResult monte_carlo_disjoint(Natural m, Natural k1, Natural k2, Natural trials, std::uint64_t seed,
                                             unsigned workers = 1) {
    if (k1 > m || k2 > m) throw DomainError("monte_carlo_disjoint: subset size exceeds domain");
    if (trials == 0) throw DomainError("monte_carlo_disjoint: trials must be >= 1");
    const std::uint64_t base = detail::splitmix64(seed);
    workers = static_cast<unsigned>(std::clamp<Natural>(workers, 1, trials));
    std::vector<Natural> hits(workers, 0);

    auto run = [&](unsigned w) {
        std::vector<std::uint64_t> a(m / 64 + 1), b(m / 64 + 1);
        const Natural begin = trials * w / workers, end = trials * (w + 1) / workers;
        Natural count = 0;
        for (Natural i = begin; i < end; ++i) {
            detail::SplitMix64 rng{detail::splitmix64(base ^ i)};
            detail::sample_subset(rng, m, k1, a);
            detail::sample_subset(rng, m, k2, b);
            bool meet = false;
            for (std::size_t j = 0; j < a.size() && !meet; ++j) meet = (a[j] & b[j]) != 0;
            count += !meet;
        }
        hits[w] = count;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    MonteCarloResult r;
    r.trials = trials;
    for (Natural h : hits) r.disjoint += h;
    r.frequency = static_cast<double>(r.disjoint) / static_cast<double>(trials);
    r.std_error = std::sqrt(r.frequency * (1 - r.frequency) / static_cast<double>(trials));
    return r;
}

// ---------------------------------------------------------------------------
// One row of the model-evaluation table.

struct ModelRow {
    ModelParams params;
    double ln_P_exact = 0;
    double log10_f = 0;
    double log10_tail = std::numeric_limits<double>::quiet_NaN();  // NaN when n < 100
};

// Unfiltered domain unless p_max is given; c_from_pmax overrides damping_c.
inline ModelRow model_row(Natural n, std::optional<Natural> p_max = std::nullopt,
                          std::optional<Natural> c_from_pmax = std::nullopt) {
    ModelRow row;
    row.params = p_max ? residue_filtered_params(n, *p_max) : base_params(n);
    if (c_from_pmax) row.params.damping_c = coefficient_c(*c_from_pmax).value;
    row.ln_P_exact = model_disjoint_prob(row.params).ln();
    row.log10_f = log_f(n, row.params.damping_c).log10();
    if (n >= 100) row.log10_tail = tail_integral(n, row.params.damping_c).log10();
    return row;
}

}  // namespace primelike
