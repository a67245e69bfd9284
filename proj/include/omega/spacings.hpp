#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "normality.hpp"
#include "sieve.hpp"

namespace omega {

// N_i / s for each sequence value.  uint64 -> double is exact below 2^53.
inline std::vector<double> rescale_sequence(const NormalSequence& seq) {
    std::vector<double> out;
    out.reserve(seq.values.size());
    const double s = seq.context.rescale;
    if (!(s > 0.0)) throw std::invalid_argument("rescale_sequence: rescale must be > 0");
    for (uint64_t n : seq.values) out.push_back(static_cast<double>(n) / s);
    return out;
}

// Fraction of the first i_max nearest-neighbor gaps strictly exceeding
// lambda.  Boundary gaps equal to lambda count as not exceeding.
inline double spacing_survival(std::span<const double> rescaled, double lambda,
                               std::size_t i_max) {
    if (!(lambda > 0.0)) throw std::invalid_argument("spacing_survival: lambda must be > 0");
    if (i_max == 0 || rescaled.size() < i_max + 1)
        throw std::invalid_argument("spacing_survival: need i_max >= 1 gaps available");
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < i_max; ++i)
        if (rescaled[i + 1] - rescaled[i] > lambda) ++exceed;
    return static_cast<double>(exceed) / static_cast<double>(i_max);
}

// ---------------------------------------------------------------------------
// window-count moments

// Window membership predicate shared by every moment path: N' lies in
// (N, N+L] iff 0 < N'-N and N'-N <= L, with the difference formed exactly in
// integers before the single rounding to double.  Keeping one predicate makes
// the cross-implementation equalities exact rather than boundary-lucky.
inline bool in_window(uint64_t n_base, uint64_t n_other, double L) {
    return n_other > n_base && static_cast<double>(n_other - n_base) <= L;
}

struct WindowMoment {
    unsigned __int128 sum = 0;  // integer sum over windows of count^m
    double x = 0.0;
    int m = 1;
    double lambda = 0.0;
    double window_length = 0.0;
    uint64_t windows = 0;  // number of base points N <= x*s

    double value() const { return static_cast<double>(sum) / x; }
};

namespace detail {

inline std::size_t window_base_count(const NormalSequence& seq, double L) {
    const double xs = seq.context.enumeration_bound;
    if (static_cast<double>(seq.covered_to) < xs + L)
        throw coverage_error("window moment: sequence must extend past x*s + L");
    // bases are normal N <= x*s
    std::size_t n_base = 0;
    while (n_base < seq.values.size() &&
           static_cast<double>(seq.values[n_base]) <= xs)
        ++n_base;
    return n_base;
}

inline unsigned __int128 int_pow(uint64_t v, int m) {
    unsigned __int128 r = 1;
    for (int i = 0; i < m; ++i) r *= v;
    return r;
}

} // namespace detail

// (1/x) * sum over delta-normal N <= x*s of (#normals in (N, N+L])^m with
// L = lambda * s, streamed with a two-pointer scan.
inline WindowMoment window_count_moment(const NormalSequence& seq, int m, double lambda) {
    if (m < 1) throw std::invalid_argument("window_count_moment: need m >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("window_count_moment: lambda must be > 0");
    const double L = lambda * seq.context.rescale;
    const std::size_t n_base = detail::window_base_count(seq, L);

    WindowMoment r;
    r.x = seq.context.x;
    r.m = m;
    r.lambda = lambda;
    r.window_length = L;
    r.windows = n_base;

    const auto& v = seq.values;
    std::size_t hi = 0;
    for (std::size_t a = 0; a < n_base; ++a) {
        if (hi < a + 1) hi = a + 1;
        while (hi < v.size() && in_window(v[a], v[hi], L)) ++hi;
        // members of (v[a], v[a]+L] are v[a+1..hi)
        r.sum += detail::int_pow(static_cast<uint64_t>(hi - (a + 1)), m);
    }
    return r;
}

// Independent m=1 evaluation: counts ordered pairs (N, N') with N normal
// <= x*s, N' normal, 0 < N'-N <= L, located by bisection instead of the
// streaming scan.
inline WindowMoment window_pair_count(const NormalSequence& seq, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("window_pair_count: lambda must be > 0");
    const double L = lambda * seq.context.rescale;
    const std::size_t n_base = detail::window_base_count(seq, L);

    WindowMoment r;
    r.x = seq.context.x;
    r.m = 1;
    r.lambda = lambda;
    r.window_length = L;
    r.windows = n_base;

    const auto& v = seq.values;
    for (std::size_t a = 0; a < n_base; ++a) {
        // largest index whose value still lies in the window
        auto it = std::partition_point(v.begin() + static_cast<std::ptrdiff_t>(a) + 1,
                                       v.end(), [&](uint64_t nb) {
                                           return in_window(v[a], nb, L);
                                       });
        r.sum += static_cast<unsigned __int128>(
            std::distance(v.begin() + static_cast<std::ptrdiff_t>(a) + 1, it));
    }
    return r;
}

// ---------------------------------------------------------------------------
// surjections and Poisson moments

inline __int128 surjection_count(int m, int r);

// Independent moment evaluation through the subset expansion
//   count^m = sum_r sigma(m,r) * C(count, r),
// with window members located by linear scan and subsets counted by exact
// binomials.  128-bit equality with window_count_moment cross-checks the
// surjection numbers against brute integer powers.
inline WindowMoment window_moment_via_surjections(const NormalSequence& seq, int m,
                                                  double lambda) {
    if (m < 1) throw std::invalid_argument("window_moment_via_surjections: need m >= 1");
    if (!(lambda > 0.0))
        throw std::invalid_argument("window_moment_via_surjections: lambda must be > 0");
    const double L = lambda * seq.context.rescale;
    const std::size_t n_base = detail::window_base_count(seq, L);

    std::vector<unsigned __int128> sigma(static_cast<std::size_t>(m) + 1, 0);
    for (int r = 1; r <= m; ++r)
        sigma[static_cast<std::size_t>(r)] =
            static_cast<unsigned __int128>(surjection_count(m, r));

    WindowMoment out;
    out.x = seq.context.x;
    out.m = m;
    out.lambda = lambda;
    out.window_length = L;
    out.windows = n_base;

    const auto& v = seq.values;
    for (std::size_t a = 0; a < n_base; ++a) {
        uint64_t c = 0;
        for (std::size_t j = a + 1; j < v.size() && in_window(v[a], v[j], L); ++j) ++c;
        unsigned __int128 binom = 1;  // C(c, r), built incrementally
        for (uint64_t r = 1; r <= c && r <= static_cast<uint64_t>(m); ++r) {
            binom = binom * (c - r + 1) / r;
            out.sum += sigma[static_cast<std::size_t>(r)] * binom;
        }
    }
    return out;
}

// sigma(m, r) = sum_j (-1)^j C(r,j) (r-j)^m, exact over checked 128-bit
// integers; throws std::overflow_error past that (sigma(m,m) = m! caps
// usable m at 33).  Evaluated through the Pascal-style recurrence
// sigma(i,j) = j*(sigma(i-1,j) + sigma(i-1,j-1)) restricted to the cone of
// entries the target depends on, so every intermediate is itself a sigma
// value bounded by the result — the alternating sum's raw powers r^m would
// overflow around m = 26 even when sigma(m,r) fits.
inline __int128 surjection_count(int m, int r) {
    if (m < 0 || r < 0) throw std::invalid_argument("surjection_count: need m, r >= 0");
    if (r > m) return 0;
    if (r == 0) return m == 0 ? 1 : 0;
    std::vector<__int128> prev(static_cast<std::size_t>(r) + 1, 0);
    std::vector<__int128> cur(static_cast<std::size_t>(r) + 1, 0);
    for (int i = 1; i <= m; ++i) {
        const int j_lo = std::max(1, r - m + i);
        const int j_hi = std::min(i, r);
        for (int j = j_lo; j <= j_hi; ++j) {
            // sigma(i-1, j-1); index 0 is kept out of the buffers since the
            // row swap would let sigma(0,0)=1 leak into later rows
            const __int128 diag =
                j == 1 ? (i == 1 ? 1 : 0) : prev[static_cast<std::size_t>(j) - 1];
            __int128 s, v;
            if (__builtin_add_overflow(prev[static_cast<std::size_t>(j)], diag, &s) ||
                __builtin_mul_overflow(s, static_cast<__int128>(j), &v))
                throw std::overflow_error("surjection_count: 128-bit overflow");
            cur[static_cast<std::size_t>(j)] = v;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(r)];
}

// Expected value of count^m under Poisson(lambda), evaluated two independent
// ways: the surjection expansion sum_r sigma(m,r) lambda^r / r!, and the
// defining series sum_j j^m e^{-lambda} lambda^j / j! truncated once terms
// fall below 1e-15 of the partial sum.
struct PoissonMoment {
    double via_surjections = 0.0;
    double via_series = 0.0;
};

inline PoissonMoment poisson_moment(int m, double lambda) {
    if (m < 0) throw std::invalid_argument("poisson_moment: need m >= 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson_moment: lambda must be > 0");
    PoissonMoment r;
    if (m == 0) {
        r.via_surjections = 1.0;
        r.via_series = 1.0;
        return r;
    }
    double fact = 1.0;
    double lam_pow = 1.0;
    NeumaierSum surj;
    for (int k = 1; k <= m; ++k) {
        fact *= k;
        lam_pow *= lambda;
        surj.add(static_cast<double>(surjection_count(m, k)) * lam_pow / fact);
    }
    r.via_surjections = surj.value();

    NeumaierSum series;
    double weight = 1.0;  // lambda^j / j!
    for (int j = 1; j < 10000; ++j) {
        weight *= lambda / j;
        const double term = std::pow(static_cast<double>(j), m) * weight;
        series.add(term);
        if (j > lambda + m && term < 1e-15 * series.value()) break;
    }
    r.via_series = std::exp(-lambda) * series.value();
    return r;
}

// ---------------------------------------------------------------------------
// baselines

// Order-statistics reference: n uniform points on [0, n] with boundary
// sentinels Y_0 = 0, Y_{n+1} = n give n+1 gaps whose survival at lambda is
// exactly ((n - lambda)/n)^n.
struct UniformBaseline {
    double empirical = 0.0;
    double exact = 0.0;
    uint64_t gaps_total = 0;
    uint64_t gaps_exceeding = 0;
};

inline UniformBaseline uniform_baseline(int n, double lambda, int trials, uint64_t seed) {
    if (n < 1 || trials < 1)
        throw std::invalid_argument("uniform_baseline: need n >= 1, trials >= 1");
    if (!(lambda > 0.0 && lambda < static_cast<double>(n)))
        throw std::invalid_argument("uniform_baseline: need 0 < lambda < n");
    UniformBaseline r;
    r.exact = std::pow((n - lambda) / n, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, static_cast<double>(n));
    std::vector<double> pts(static_cast<std::size_t>(n) + 2);
    for (int t = 0; t < trials; ++t) {
        pts[0] = 0.0;
        for (int i = 1; i <= n; ++i) pts[static_cast<std::size_t>(i)] = dist(rng);
        pts[static_cast<std::size_t>(n) + 1] = static_cast<double>(n);
        std::sort(pts.begin() + 1, pts.end() - 1);
        for (int i = 0; i <= n; ++i)
            if (pts[static_cast<std::size_t>(i) + 1] - pts[static_cast<std::size_t>(i)] > lambda)
                ++r.gaps_exceeding;
        r.gaps_total += static_cast<uint64_t>(n) + 1;
    }
    r.empirical = static_cast<double>(r.gaps_exceeding) / static_cast<double>(r.gaps_total);
    return r;
}

// Fraction of normalized prime gaps (p_{i+1} - p_i)/log x exceeding lambda,
// over primes p_i <= x; informational comparison against e^{-lambda}.
struct PrimeSpacingSurvival {
    double fraction = 0.0;
    double expected = 0.0;
    uint64_t gaps = 0;
};

inline PrimeSpacingSurvival prime_spacing_survival(uint64_t x, double lambda,
                                                   const SieveOptions& opt = {}) {
    if (x < 3) throw std::invalid_argument("prime_spacing_survival: need x >= 3");
    if (!(lambda > 0.0))
        throw std::invalid_argument("prime_spacing_survival: lambda must be > 0");
    const double logx = std::log(static_cast<double>(x));
    // Slack past x covers the successor of the last prime <= x; maximal
    // prime gaps below 2^40 stay well under this margin.
    const uint64_t slack = 10000;
    uint64_t prev = 0, exceed = 0, gaps = 0;
    bool done = false;
    for_primes(2, x + slack, [&](uint64_t p) {
        if (done) return;
        if (prev >= 2) {
            if (prev > x) {
                done = true;
                return;
            }
            ++gaps;
            if (static_cast<double>(p - prev) / logx > lambda) ++exceed;
        }
        prev = p;
    }, opt);
    if (prev <= x && !done)
        throw std::logic_error("prime_spacing_survival: successor prime not found in slack");
    PrimeSpacingSurvival r;
    r.gaps = gaps;
    r.fraction = gaps ? static_cast<double>(exceed) / static_cast<double>(gaps) : 0.0;
    r.expected = std::exp(-lambda);
    return r;
}

// ---------------------------------------------------------------------------
// bundled statistics for reporting

struct SurvivalPoint {
    double lambda = 0.0;
    double survival = 0.0;
    double expected = 0.0;  // e^{-lambda}

    double abs_err() const { return std::abs(survival - expected); }
};

struct SpacingStats {
    NormalityContext context;
    std::vector<double> rescaled;
    std::vector<double> spacings;
    std::size_t i_max = 0;
    std::vector<SurvivalPoint> survival;
};

inline SpacingStats make_spacing_stats(const NormalSequence& seq,
                                       std::span<const double> lambdas) {
    SpacingStats st;
    st.context = seq.context;
    st.rescaled = rescale_sequence(seq);
    if (st.rescaled.size() < 2)
        throw std::invalid_argument("make_spacing_stats: need at least 2 sequence values");
    st.spacings.reserve(st.rescaled.size() - 1);
    for (std::size_t i = 0; i + 1 < st.rescaled.size(); ++i)
        st.spacings.push_back(st.rescaled[i + 1] - st.rescaled[i]);
    st.i_max = std::min<std::size_t>(static_cast<std::size_t>(st.context.x),
                                      st.spacings.size());
    for (double lam : lambdas) {
        SurvivalPoint p;
        p.lambda = lam;
        p.survival = spacing_survival(st.rescaled, lam, st.i_max);
        p.expected = std::exp(-lam);
        st.survival.push_back(p);
    }
    return st;
}

} // namespace omega
