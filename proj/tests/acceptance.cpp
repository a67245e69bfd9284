// Acceptance gate: one numbered check per shipped guarantee, each printing a
// single PASS/FAIL line (WARN for the soft throughput target).  Run with no
// arguments for the full battery or pass criterion numbers to select.
// Tolerances are pinned here, next to the checks that use them.

#include <omega/omega.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace omega;

namespace {

// pinned tolerances and limits
constexpr double kMertensLow = 0.2595, kMertensHigh = 0.2635;
constexpr double kDobinskiRel = 1e-12;
constexpr double kLemmaAbs = 1e-4;
constexpr double kCharfunAbs = 0.05;
constexpr double kEkAbs = 0.12;
constexpr double kEkGauss = 0.6827;
constexpr double kTelescopeRel = 1e-9;
constexpr double kFloatDeterminism = 1e-12;
constexpr double kThroughputSoftSeconds = 120.0;
constexpr double kTimeLimitSeconds[12] = {0,  30, 10, 60,  1,  300,
                                          300, 600, 60, 120, 120, 0};

struct Outcome {
    bool pass = true;
    bool warn = false;  // soft criteria report WARN instead of FAIL
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

std::pair<int, int> omega_trial(uint64_t n, double y, double z) {
    int full = 0, win = 0;
    auto tally = [&](uint64_t p) {
        ++full;
        if (double(p) > y && double(p) < z) ++win;
    };
    for (uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        tally(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) tally(n);
    return {full, win};
}

std::string fmt(double v) { return format_sig12(v); }

// --- criterion 1: sieve vs trial division ---------------------------------
Outcome run_sieve_oracle() {
    const double y = 100.0, z = 1.0e6;
    auto low = omega_table(1, 100001, WindowBounds{y, z});
    for (uint64_t n = 1; n <= 100000; ++n) {
        auto [full, win] = omega_trial(n, y, z);
        if (int(low.omega(n)) != full || int(low.omega_in_window(n)) != win)
            return {false, false,
                    "mismatch at n=" + std::to_string(n) + " got " +
                        std::to_string(low.omega(n)) + "/" +
                        std::to_string(low.omega_in_window(n)) + " want " +
                        std::to_string(full) + "/" + std::to_string(win)};
    }
    const uint64_t base = 1000000000, span = 1000000;
    auto high = omega_table(base, base + span + 1, WindowBounds{y, z});
    std::mt19937_64 rng(20260814);
    for (int i = 0; i < 10000; ++i) {
        const uint64_t n = base + rng() % span;
        auto [full, win] = omega_trial(n, y, z);
        if (int(high.omega(n)) != full || int(high.omega_in_window(n)) != win)
            return {false, false, "mismatch at n=" + std::to_string(n)};
    }
    return {true, false, "100000 sequential + 10000 random values near 1e9, both counters"};
}

// --- criterion 2: exact first-moment identity ------------------------------
Outcome run_mean_identity() {
    for (uint64_t x : {uint64_t(10000), uint64_t(1000000)}) {
        auto r = mean_omega_identity(x);
        if (r.omega_sum != r.floor_sum || !(r.lhs() == r.rhs()))
            return {false, false,
                    "x=" + std::to_string(x) + ": " + std::to_string(r.omega_sum) +
                        " != " + std::to_string(r.floor_sum)};
    }
    return {true, false, "sum omega(n) == sum floor(x/p) exactly at x=1e4, 1e6"};
}

// --- criterion 3: reciprocal prime sum drift -------------------------------
Outcome run_mertens() {
    const double s = prime_reciprocal_sum(1.0, 1.0e8 + 0.5);
    const double gap = s - std::log(std::log(1.0e8));
    const bool ok = gap >= kMertensLow && gap <= kMertensHigh;
    return {ok, false,
            "sum 1/p over p<=1e8 minus lnln 1e8 = " + fmt(gap) + " (want [" +
                fmt(kMertensLow) + ", " + fmt(kMertensHigh) + "])"};
}

// --- criterion 4: Poisson moment identity ----------------------------------
Outcome run_dobinski() {
    double worst = 0.0;
    for (int m = 1; m <= 10; ++m) {
        for (double lam : {0.5, 1.0, 2.0, 4.0}) {
            auto p = poisson_moment(m, lam);
            const double rel = std::abs(p.via_surjections - p.via_series) /
                               std::max(1.0, std::abs(p.via_series));
            worst = std::max(worst, rel);
        }
    }
    return {worst <= kDobinskiRel, false,
            "max relative gap " + fmt(worst) + " over m<=10, lambda in {0.5,1,2,4} (cap " +
                fmt(kDobinskiRel) + ")"};
}

// --- criterion 5: correlation main term battery ----------------------------
Outcome run_lemma_battery() {
    const std::vector<uint64_t> pool{4, 8, 9, 25, 27};
    std::vector<uint64_t> b{0, 1};
    double worst6 = 0.0;
    std::string trend_fail;
    int pairs = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            if (std::gcd(pool[i], pool[j]) != 1) continue;
            ++pairs;
            std::vector<uint64_t> a{pool[i], pool[j]};
            auto t = make_factored_tuple(a);
            auto main = lemma_one_main_term(t);
            const double err4 =
                (empirical_f_average(10000, t, b) - main).abs().to_double();
            const double err6 =
                (empirical_f_average(1000000, t, b) - main).abs().to_double();
            worst6 = std::max(worst6, err6);
            if (err6 > kLemmaAbs)
                return {false, false,
                        "(" + std::to_string(pool[i]) + "," + std::to_string(pool[j]) +
                            "): err(1e6) = " + fmt(err6) + " > " + fmt(kLemmaAbs)};
            // strict decrease, except when the average is already exact at
            // both scales (a1*a2 divides x: full periods, error identically 0)
            if (!(err6 < err4 || err6 == 0.0) && trend_fail.empty())
                trend_fail = "(" + std::to_string(pool[i]) + "," + std::to_string(pool[j]) +
                             "): err(1e6)=" + fmt(err6) + " !< err(1e4)=" + fmt(err4);
        }
    }
    if (!trend_fail.empty()) return {false, false, trend_fail};
    return {true, false,
            std::to_string(pairs) + " coprime pairs, max err(1e6) = " + fmt(worst6) +
                " (cap " + fmt(kLemmaAbs) + "), error shrinks from x=1e4"};
}

// --- criterion 6: characteristic function vs analytic model ----------------
Outcome run_charfun() {
    const double y = 100.0, z = 1.0e5;
    std::vector<double> T{1.0, 1.0};
    std::vector<uint64_t> b{0, 1};
    auto w = prime_window(y, z);
    auto eval_at = [&](uint64_t x) {
        auto t = omega_table(1, x + 3, WindowBounds{y, z});
        return evaluate_charfun(x, w, T, b, t);
    };
    auto small = eval_at(100000);
    auto big = eval_at(10000000);
    if (big.abs_error > kCharfunAbs)
        return {false, false,
                "|lhs-rhs| at x=1e7 = " + fmt(big.abs_error) + " > " + fmt(kCharfunAbs) +
                    " (trend holds: " + fmt(small.abs_error) +
                    " at 1e5); the product model prices each pair p,q at density "
                    "1/(pq), but window pairs with pq > x cannot divide any n <= x, "
                    "and that deficit (sum 1/pq ~ 0.145 for z=1e5, x=1e7) floors the "
                    "error above the cap; with z=1e3 the same code reaches 0.004 at "
                    "x=1e8"};
    if (big.abs_error > small.abs_error)
        return {false, false,
                "error grew with x: " + fmt(big.abs_error) + " at 1e7 vs " +
                    fmt(small.abs_error) + " at 1e5"};
    return {true, false,
            "|lhs-rhs| = " + fmt(big.abs_error) + " at x=1e7 (cap " + fmt(kCharfunAbs) +
                "), down from " + fmt(small.abs_error) + " at x=1e5"};
}

// --- criterion 7: Erdos-Kac band at 1e8 ------------------------------------
Outcome run_ek() {
    auto t = omega_table(1, 100000001);
    auto big = ek_empirical(100000000, 1.0, t);
    auto small = ek_empirical(100000, 1.0, t);
    const double gap_big = std::abs(big.empirical - kEkGauss);
    const double gap_small = std::abs(small.empirical - kEkGauss);
    if (gap_big > kEkAbs)
        return {false, false,
                "band fraction at 1e8 off by " + fmt(gap_big) + " > " + fmt(kEkAbs) +
                    " (trend holds: " + fmt(gap_small) +
                    " at 1e5); the band at c=1 admits only omega in {2,3,4} and the "
                    "integer spectrum converges at the 1/sqrt(lnln x) ~ 0.59 scale, "
                    "so the gap shrinks (0.299, 0.194, 0.174, 0.150 across 1e5..1e8) "
                    "but has not reached the cap by 1e8"};
    if (gap_big > gap_small)
        return {false, false,
                "gap grew with x: " + fmt(gap_big) + " at 1e8 vs " + fmt(gap_small) +
                    " at 1e5"};
    return {true, false,
            "band fraction " + fmt(big.empirical) + " (|gap| " + fmt(gap_big) + " <= " +
                fmt(kEkAbs) + ", shrinking from " + fmt(gap_small) + " at 1e5)"};
}

// --- criterion 8: moment equalities and spacing structure ------------------
Outcome run_moment_structure() {
    for (double x : {1.0e5, 1.0e6}) {
        auto ctx = NormalityContext::for_scale(x, 0.25);
        const uint64_t cover =
            uint64_t(std::ceil(ctx.enumeration_bound + ctx.rescale)) + 2;
        auto t = omega_table(1, cover + 1);
        auto seq = enumerate_normal(ctx, t, cover);

        auto m1 = window_count_moment(seq, 1, 1.0);
        auto pair = window_pair_count(seq, 1.0);
        if (!(m1.sum == pair.sum))
            return {false, false, "m=1 moment != pair count at x=" + fmt(x)};
        for (int m : {2, 3}) {
            auto a = window_count_moment(seq, m, 1.0);
            auto bb = window_moment_via_surjections(seq, m, 1.0);
            if (!(a.sum == bb.sum))
                return {false, false,
                        "m=" + std::to_string(m) + " moment mismatch at x=" + fmt(x)};
        }

        auto resc = rescale_sequence(seq);
        const std::size_t gaps = resc.size() - 1;
        const std::size_t i_max = std::min<std::size_t>(uint64_t(x), gaps);
        double prev = 1.0;
        for (double lam = 0.25; lam <= 3.01; lam += 0.25) {
            const double s = spacing_survival(resc, lam, i_max);
            if (s > prev + 1e-15)
                return {false, false, "survival not monotone at lambda=" + fmt(lam)};
            prev = s;
        }

        uint64_t int_sum = 0;
        for (std::size_t i = 0; i + 1 < seq.values.size(); ++i)
            int_sum += seq.values[i + 1] - seq.values[i];
        if (int_sum != seq.values.back() - seq.values.front())
            return {false, false, "integer telescoping failed at x=" + fmt(x)};
        NeumaierSum fsum;
        for (std::size_t i = 0; i + 1 < resc.size(); ++i) fsum.add(resc[i + 1] - resc[i]);
        const double direct = resc.back() - resc.front();
        if (std::abs(fsum.value() - direct) > kTelescopeRel * std::max(1.0, std::abs(direct)))
            return {false, false, "rescaled telescoping off at x=" + fmt(x)};
    }
    return {true, false,
            "pair-count identity, surjection route, survival monotonicity, and "
            "telescoping all hold at x=1e5 and 1e6 (delta=0.25)"};
}

// --- criterion 9: order-statistics baseline + survival trend table ---------
Outcome run_baseline() {
    auto b = uniform_baseline(1000, 1.0, 500, 42);
    const double se = std::sqrt(b.exact * (1.0 - b.exact) / double(b.gaps_total));
    if (std::abs(b.empirical - b.exact) > 3.0 * se)
        return {false, false,
                "empirical " + fmt(b.empirical) + " vs exact " + fmt(b.exact) +
                    " exceeds 3 SE (" + fmt(3.0 * se) + ")"};

    // report-only survival trend: delta-normal gaps vs e^{-lambda} and the
    // prime-gap analogue
    std::printf("    survival trend (report only):\n");
    std::printf("    %-10s %-12s %-12s %-12s %-12s\n", "lambda", "normals@1e5",
                "normals@1e6", "primes@1e6", "exp(-lambda)");
    std::vector<std::vector<double>> norm_surv;
    for (double x : {1.0e5, 1.0e6}) {
        auto ctx = NormalityContext::for_scale(x, 0.25);
        const uint64_t cover = uint64_t(std::floor(ctx.enumeration_bound));
        auto t = omega_table(1, cover + 1);
        auto seq = enumerate_normal(ctx, t, cover);
        auto resc = rescale_sequence(seq);
        const std::size_t i_max = std::min<std::size_t>(uint64_t(x), resc.size() - 1);
        std::vector<double> row;
        for (double lam : {0.5, 1.0, 2.0})
            row.push_back(spacing_survival(resc, lam, i_max));
        norm_surv.push_back(row);
    }
    int li = 0;
    for (double lam : {0.5, 1.0, 2.0}) {
        auto p = prime_spacing_survival(1000000, lam);
        std::printf("    %-10s %-12s %-12s %-12s %-12s\n", fmt(lam).c_str(),
                    fmt(norm_surv[0][li]).c_str(), fmt(norm_surv[1][li]).c_str(),
                    fmt(p.fraction).c_str(), fmt(std::exp(-lam)).c_str());
        ++li;
    }
    return {true, false,
            "uniform baseline within 3 SE: |" + fmt(b.empirical) + " - " + fmt(b.exact) +
                "| <= " + fmt(3.0 * se)};
}

// --- criterion 10: thread-count determinism --------------------------------
Outcome run_determinism() {
    SieveOptions one;
    one.threads = 1;
    SieveOptions eight;
    eight.threads = 8;

    auto t1 = omega_table(1, 2000001, WindowBounds{5.0, 10000.0}, one);
    auto t8 = omega_table(1, 2000001, WindowBounds{5.0, 10000.0}, eight);
    if (t1.full != t8.full || t1.windowed != t8.windowed)
        return {false, false, "sieve tables differ between 1 and 8 threads"};

    auto id1 = mean_omega_identity(1000000, one);
    auto id8 = mean_omega_identity(1000000, eight);
    if (id1.omega_sum != id8.omega_sum || id1.floor_sum != id8.floor_sum)
        return {false, false, "mean identity sums differ between 1 and 8 threads"};

    auto w = prime_window(5.0, 10000.0);
    std::vector<double> T{1.0, 0.5};
    std::vector<uint64_t> b{0, 1};
    auto c1 = empirical_charfun(1000000, w, T, b, t1, one);
    auto c8 = empirical_charfun(1000000, w, T, b, t8, eight);
    const double drift = std::abs(c1 - c8);
    if (drift > kFloatDeterminism)
        return {false, false, "characteristic function drift " + fmt(drift)};

    std::ostringstream csv1, csv8;
    auto small1 = omega_table(500, 1500, WindowBounds{2.0, 40.0}, one);
    auto small8 = omega_table(500, 1500, WindowBounds{2.0, 40.0}, eight);
    write_omega_csv(small1, csv1);
    write_omega_csv(small8, csv8);
    if (csv1.str() != csv8.str())
        return {false, false, "CSV artifacts differ between thread counts"};

    return {true, false,
            "tables, identity sums, CSV bytes identical; charfun drift " + fmt(drift) +
                " (cap " + fmt(kFloatDeterminism) + ")"};
}

// --- criterion 11: full-range throughput (soft) ----------------------------
Outcome run_throughput() {
    const auto start = std::chrono::steady_clock::now();
    auto t = omega_table(1, 1000000001);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // spot-check the big table before trusting the timing
    if (t.omega(999999937) != 1 || t.omega(1000000000) != 2 || t.omega(536870912) != 1)
        return {false, false, "spot check failed on the 1e9 table"};
    if (secs > kThroughputSoftSeconds)
        return {true, true,
                "sieved [1,1e9] in " + fmt(secs) + " s, over the soft " +
                    fmt(kThroughputSoftSeconds) + " s target"};
    return {true, false, "sieved [1,1e9] in " + fmt(secs) + " s (soft target " +
                             fmt(kThroughputSoftSeconds) + " s)"};
}

} // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all{
        {1, "sieve counters match trial division", run_sieve_oracle},
        {2, "first-moment identity is exact", run_mean_identity},
        {3, "prime reciprocal drift sits in the Mertens band", run_mertens},
        {4, "Poisson moments via surjections match the series", run_dobinski},
        {5, "correlation main terms within 1e-4 at x=1e6", run_lemma_battery},
        {6, "joint characteristic function tracks the analytic model", run_charfun},
        {7, "Erdos-Kac band fraction at x=1e8", run_ek},
        {8, "moment identities and spacing structure", run_moment_structure},
        {9, "uniform order-statistics baseline", run_baseline},
        {10, "results independent of thread count", run_determinism},
        {11, "single-pass sieve throughput to 1e9 (soft)", run_throughput},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool any_fail = false;
    for (const auto& c : all) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), c.id) == selected.end())
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const double limit = kTimeLimitSeconds[c.id];
        if (o.pass && !o.warn && limit > 0 && secs > limit) {
            o.pass = false;
            o.detail += " [exceeded " + fmt(limit) + " s time limit]";
        }
        const char* verdict = o.pass ? (o.warn ? "WARN" : "PASS") : "FAIL";
        std::printf("[%2d] %s  %8.2fs  %s\n     %s\n", c.id, verdict, secs, c.name,
                    o.detail.c_str());
        if (!o.pass) any_fail = true;
    }
    return any_fail ? 1 : 0;
}
