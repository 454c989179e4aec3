// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
// --long adds the classical check up to 2e8.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"

using namespace primelike;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int g_failed = 0;

void report(int id, bool ok, const std::string& detail, double secs) {
    std::printf("[%s] %2d  %s  (%.2f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Tolerances and budgets.
constexpr double kTailTol = 1.0;
constexpr double kTailBudget = 1.0;
constexpr double kCheck1e7Budget = 60.0;
constexpr double kCheck1e8Budget = 600.0;
constexpr double kPerturbBudget = 300.0;
constexpr Natural kPerturbTight = 40, kPerturbLoose = 200;
constexpr double kShiftBudget = 10.0;
constexpr double kAnbBudget = 30.0;
constexpr Natural kMonteCarloTrials = 100000;
constexpr double kMonteCarloSigmas = 4.0;
constexpr double kMonteCarloPass = 0.99;
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 42, 2024};

void damping_values() {
    const auto t0 = Clock::now();
    const double a = log_f(Natural{10000}, 1.0).log10();
    const double b = log_f(Natural{40000}, 1.0).log10();
    const bool ok = a >= -51.5 && a <= -51.0 && b >= -155.0 && b <= -154.0;
    report(1, ok, fmt("log10 f(1e4)=%.4f in [-51.5,-51.0], log10 f(4e4)=%.4f in [-155,-154]", a, b),
           seconds_since(t0));
}

void tail_integrals() {
    auto t0 = Clock::now();
    const double a = tail_integral(20000, 1.0).log10();
    const double ta = seconds_since(t0);
    t0 = Clock::now();
    const double b = tail_integral(50000, 1.0).log10();
    const double tb = seconds_since(t0);
    const bool ok = std::abs(a + 86) <= kTailTol && std::abs(b + 183) <= kTailTol && ta < kTailBudget &&
                    tb < kTailBudget;
    report(2, ok, fmt("log10 tail(2e4)=%.4f (%.3fs), log10 tail(5e4)=%.4f (%.3fs)", a, ta, b, tb), ta + tb);
}

void coefficients() {
    const auto t0 = Clock::now();
    const auto c2 = coefficient_c(2), c3 = coefficient_c(3), c5 = coefficient_c(5);
    const bool ok = c2.exact && c3.exact && c5.exact && *c2.exact == BigRational(2) && *c3.exact == BigRational(3) &&
                    *c5.exact == BigRational(15, 4);
    report(3, ok, "c(2)=2, c(3)=3, c(5)=15/4 exactly", seconds_since(t0));
}

void classical_check(int id, Natural hi, double budget) {
    const auto t0 = Clock::now();
    const auto p = primes_up_to(hi);
    const auto r = check_range(p, 4, hi);
    const double secs = seconds_since(t0);
    report(id, r.failures.empty() && secs <= budget,
           fmt("primes, 4..%llu: %zu failures, budget %.0f s", static_cast<unsigned long long>(hi), r.failures.size(),
               budget),
           secs);
}

void perturbed_checks() {
    const auto t0 = Clock::now();
    int tight = 0, loose = 0;
    std::string detail = "max failure per seed:";
    for (auto seed : kSeeds) {
        const auto q = perturb_primes(10000000, seed);
        const auto r = check_range(q, 4, 10000000);
        const Natural worst = r.failures.empty() ? 0 : r.failures.back();
        tight += worst <= kPerturbTight;
        loose += worst <= kPerturbLoose;
        detail += fmt(" %llu", static_cast<unsigned long long>(worst));
    }
    const double secs = seconds_since(t0);
    report(5, tight >= 4 && loose == 5 && secs <= kPerturbBudget,
           detail + fmt(" (<=%llu: %d/5, <=%llu: %d/5)", static_cast<unsigned long long>(kPerturbTight), tight,
                        static_cast<unsigned long long>(kPerturbLoose), loose),
           secs);
}

void similarity_bound() {
    const auto t0 = Clock::now();
    const auto p = primes_up_to(1000000);
    Natural worst = 0;
    for (auto seed : kSeeds) {
        const auto q = perturb_primes(1000000, seed);
        for (Natural n = 1; n <= 1000000; ++n) {
            const Natural a = q.rank(n), b = p.rank(n);
            worst = std::max(worst, a > b ? a - b : b - a);
        }
    }
    report(6, worst <= 2, fmt("max |rank_Q(n) - pi(n)| over n <= 1e6, 5 seeds: %llu", static_cast<unsigned long long>(worst)),
           seconds_since(t0));
}

void shift_witnesses() {
    const auto t0 = Clock::now();
    constexpr Natural top = 100000;
    const auto p = primes_up_to(top);
    bool ok = true;
    Natural checked = 0;
    for (std::int64_t t : {1, 2, 10}) {
        const auto pt = shift_set(p, t);
        const auto ut = static_cast<Natural>(t);
        for (Natural e = 2 * ut + 4; e <= top && ok; e += 2) {
            const auto base = find_representation(p, e - 2 * ut);
            if (!base) {
                ok = false;
                break;
            }
            const Natural w1 = base->q1 + ut, w2 = base->q2 + ut;
            ok = w1 + w2 == e && pt.contains(w1) && pt.contains(w2) && find_representation(pt, e).has_value();
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    report(7, ok && secs < kShiftBudget,
           fmt("P_t witnesses for t in {1,2,10}, 2t+2 < 2n <= 1e5: %llu checked", static_cast<unsigned long long>(checked)),
           secs);
}

void anb_equivalence() {
    const auto t0 = Clock::now();
    constexpr Natural top = 4000;
    std::vector<NumberSet> sets{primes_up_to(top), perturb_primes(top, 1), perturb_primes(top, 2)};
    std::mt19937_64 rng(12345);
    for (double density : {0.005, 0.01, 0.02, 0.05, 0.1})
        sets.push_back(NumberSet::from_sorted(oracle::random_sparse_set(top, density, rng()), top));
    Natural mismatches = 0;
    for (const auto& q : sets)
        for (Natural n = 1; n <= 2000; ++n)
            mismatches += disjoint(a_set(q, n), b_set(q, n)) == find_representation(q, 2 * n).has_value();
    const double secs = seconds_since(t0);
    report(8, mismatches == 0 && secs < kAnbBudget,
           fmt("disjoint(A_n,B_n) iff no representation, n <= 2000, 8 sets: %llu mismatches",
               static_cast<unsigned long long>(mismatches)),
           secs);
}

void exact_vs_enumeration() {
    const auto t0 = Clock::now();
    Natural cells = 0, bad = 0;
    for (unsigned m = 1; m <= 12; ++m)
        for (unsigned k1 = 0; k1 <= m; ++k1)
            for (unsigned k2 = 0; k2 <= m; ++k2) {
                const auto r = exact_disjoint_rational(m, k1, k2);
                const oracle::cpp_rational got(oracle::cpp_int(r.num), oracle::cpp_int(r.den));
                bad += got != oracle::disjoint_fraction_by_enumeration(m, k1, k2);
                ++cells;
            }
    report(9, bad == 0, fmt("exact rational vs subset-pair enumeration, m <= 12: %llu/%llu equal",
                            static_cast<unsigned long long>(cells - bad), static_cast<unsigned long long>(cells)),
           seconds_since(t0));
}

void monte_carlo_grid() {
    const auto t0 = Clock::now();
    const Natural ms[] = {1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 30, 40, 50};
    Natural cells = 0, within = 0;
    std::uint64_t seed = 7;
    for (Natural m : ms) {
        const Natural kmax = std::min<Natural>(10, m);
        for (Natural k1 = 0; k1 <= kmax; ++k1)
            for (Natural k2 = 0; k2 <= kmax; ++k2) {
                const double p = exact_disjoint_prob(m, k1, k2).value();
                const auto mc = monte_carlo_disjoint(m, k1, k2, kMonteCarloTrials, seed++);
                const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(kMonteCarloTrials));
                within += std::abs(mc.frequency - p) <= kMonteCarloSigmas * sigma;
                ++cells;
            }
    }
    const double frac = static_cast<double>(within) / static_cast<double>(cells);
    report(10, frac >= kMonteCarloPass,
           fmt("%llu/%llu cells within 4 sigma (%.2f%%), 1e5 trials each", static_cast<unsigned long long>(within),
               static_cast<unsigned long long>(cells), 100 * frac),
           seconds_since(t0));
}

std::string run_cli(cli::RunConfig c) {
    std::ostringstream out;
    cli::run(c, out);
    return out.str();
}

void determinism() {
    const auto t0 = Clock::now();
    bool ok = true;
    cli::RunConfig c;
    c.command = cli::Command::check;
    c.spec = SetSpec::perturbed(2000000, 42);
    c.hi = 2000000;
    std::string ref;
    for (unsigned w : {1u, 1u, 2u, 4u}) {
        c.workers = w;
        const auto body = check_report_body(run_cli(c));
        if (ref.empty()) ref = body;
        ok = ok && body == ref;
    }
    const auto dir = std::filesystem::temp_directory_path();
    std::string ref_set;
    for (unsigned w : {1u, 1u, 3u}) {
        const auto path = (dir / ("primelike_accept_" + std::to_string(w) + ".txt")).string();
        const std::string cmd = std::string(PRIMELIKE_CLI_PATH) +
                                " gen-set --kind perturbed --limit 1000000 --seed 42 --workers " + std::to_string(w) +
                                " --out " + path + " >/dev/null";
        ok = ok && std::system(cmd.c_str()) == 0;
        const auto text = read_text_file(path);
        if (ref_set.empty()) ref_set = text;
        ok = ok && text == ref_set;
        std::filesystem::remove(path);
    }
    report(11, ok, "check bodies and gen-set files identical across runs and --workers 1/2/3/4", seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
    bool long_run = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--long") == 0)
            long_run = true;
        else {
            std::fprintf(stderr, "usage: %s [--long]\n", argv[0]);
            return 2;
        }
    }
    try {
        damping_values();
        tail_integrals();
        coefficients();
        classical_check(4, 10000000, kCheck1e7Budget);
        classical_check(4, 100000000, kCheck1e8Budget);
        perturbed_checks();
        similarity_bound();
        shift_witnesses();
        anb_equivalence();
        exact_vs_enumeration();
        monte_carlo_grid();
        determinism();
        if (long_run) classical_check(4, 200000000, kCheck1e8Budget * 2);
    } catch (const std::exception& e) {
        std::printf("[FAIL] aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d failing\n", g_failed ? "FAILED" : "ALL PASSED", g_failed);
    return g_failed ? 1 : 0;
}
