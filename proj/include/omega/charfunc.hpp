#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "normality.hpp"
#include "parallel.hpp"
#include "sieve.hpp"
#include "summation.hpp"

namespace omega {

namespace detail {

inline void require_matching_window(const PrimeWindow& w, const OmegaTable& t,
                                    const char* who) {
    if (!t.window || t.window->y != w.y || t.window->z != w.z)
        throw coverage_error(std::string(who) +
                             ": table was not sieved with the requested window");
}

// The windowed counter of any n < 2^40 stays far below 64 (the product of the
// first 14 primes already exceeds 2^40), so a fixed-size phase lookup holds
// every reachable count.
inline constexpr int kMaxWindowOmega = 64;

} // namespace detail

// (1/x) sum_{n<=x} prod_i exp(iT_i (omega(n+b_i; y,z) - S)/sqrt(S)).
// The per-term phase depends only on the small integer counter, so each shift
// gets a precomputed phase table; accumulation is compensated per fixed-size
// chunk and chunk sums are merged in index order, which makes the result
// independent of the thread count.
inline std::complex<double> empirical_charfun(uint64_t x, const PrimeWindow& w,
                                              std::span<const double> T,
                                              std::span<const uint64_t> shifts,
                                              const OmegaTable& t,
                                              const SieveOptions& opt = {}) {
    if (T.size() != shifts.size() || T.empty())
        throw std::invalid_argument("empirical_charfun: need matching nonempty T, shifts");
    validate_shifts(shifts, "empirical_charfun");
    if (x < 1) throw std::invalid_argument("empirical_charfun: need x >= 1");
    const double S = w.reciprocal_sum;
    if (!(S > 0.0)) throw std::invalid_argument("empirical_charfun: S must be > 0");
    detail::require_matching_window(w, t, "empirical_charfun");
    if (t.lo > 1 || !t.covers(1, x + shifts.back() + 1))
        throw coverage_error("empirical_charfun: table must cover [1, x + max shift]");

    const double root_s = std::sqrt(S);
    const std::size_t r = T.size();
    std::vector<std::vector<std::complex<double>>> phase(r);
    for (std::size_t i = 0; i < r; ++i) {
        phase[i].resize(detail::kMaxWindowOmega);
        for (int v = 0; v < detail::kMaxWindowOmega; ++v)
            phase[i][static_cast<std::size_t>(v)] =
                std::polar(1.0, T[i] * (static_cast<double>(v) - S) / root_s);
    }

    const uint64_t chunk = uint64_t(1) << 20;
    const std::size_t n_chunks = static_cast<std::size_t>((x + chunk - 1) / chunk);
    std::vector<std::complex<double>> partial(n_chunks);
    const uint8_t* win = t.windowed.data();
    const uint64_t lo = t.lo;

    parallel_for(n_chunks, opt.threads, [&](std::size_t ci, int) {
        const uint64_t n_lo = 1 + static_cast<uint64_t>(ci) * chunk;
        const uint64_t n_hi = std::min(x, n_lo + chunk - 1);
        NeumaierComplexSum sum;
        for (uint64_t n = n_lo; n <= n_hi; ++n) {
            std::complex<double> term = phase[0][win[n + shifts[0] - lo]];
            for (std::size_t i = 1; i < r; ++i) term *= phase[i][win[n + shifts[i] - lo]];
            sum.add(term);
        }
        partial[ci] = sum.value();
    });

    NeumaierComplexSum total;
    for (const auto& p : partial) total.add(p);
    const std::complex<double> v = total.value();
    return {v.real() / static_cast<double>(x), v.imag() / static_cast<double>(x)};
}

// prod_i exp((e^{it_i} - 1 - it_i) S) with t_i = T_i / sqrt(S).
inline std::complex<double> analytic_charfun(const PrimeWindow& w,
                                             std::span<const double> T) {
    const double S = w.reciprocal_sum;
    if (!(S > 0.0)) throw std::invalid_argument("analytic_charfun: S must be > 0");
    if (T.empty()) throw std::invalid_argument("analytic_charfun: T empty");
    const double root_s = std::sqrt(S);
    std::complex<double> out(1.0, 0.0);
    for (double Ti : T) {
        const double t = Ti / root_s;
        const std::complex<double> expnt(S * (std::cos(t) - 1.0), S * (std::sin(t) - t));
        out *= std::exp(expnt);
    }
    return out;
}

// Both sides of the joint characteristic-function identity plus bookkeeping.
struct CharFunEval {
    double S = 0.0;
    std::vector<double> T;
    std::vector<double> t;  // T_i / sqrt(S)
    std::vector<uint64_t> shifts;
    std::complex<double> lhs;
    std::complex<double> rhs;
    double abs_error = 0.0;
    bool soft_limit_exceeded = false;  // any |T_i| > sqrt(S)/1000
};

inline CharFunEval evaluate_charfun(uint64_t x, const PrimeWindow& w,
                                    std::span<const double> T,
                                    std::span<const uint64_t> shifts, const OmegaTable& t,
                                    const SieveOptions& opt = {}) {
    CharFunEval e;
    e.S = w.reciprocal_sum;
    e.T.assign(T.begin(), T.end());
    e.shifts.assign(shifts.begin(), shifts.end());
    e.lhs = empirical_charfun(x, w, T, shifts, t, opt);
    e.rhs = analytic_charfun(w, T);
    e.abs_error = std::abs(e.lhs - e.rhs);
    const double root_s = std::sqrt(e.S);
    for (double Ti : T) {
        e.t.push_back(Ti / root_s);
        if (std::abs(Ti) > root_s / 1000.0) e.soft_limit_exceeded = true;
    }
    return e;
}

// Gaussian shape of a single factor: exact = exp((e^{it}-1-it)S) at t=T/sqrt(S)
// against exp(-T^2/2), plus the modulus bound exp(-T^2/4) (implicit constant
// taken as 1, soft) meaningful in the T <= sqrt(S) regime.
struct GaussianApproxCheck {
    std::complex<double> exact;
    double gauss = 0.0;
    double ratio_error = 0.0;  // |exact/gauss - 1|
    double t = 0.0;
    bool modulus_bound_holds = false;  // |exact| <= exp(-T^2/4)
};

inline GaussianApproxCheck gaussian_approx_check(double S, double T) {
    if (!(S > 0.0)) throw std::invalid_argument("gaussian_approx_check: S must be > 0");
    GaussianApproxCheck g;
    g.t = T / std::sqrt(S);
    g.exact = std::exp(std::complex<double>(S * (std::cos(g.t) - 1.0),
                                            S * (std::sin(g.t) - g.t)));
    g.gauss = std::exp(-T * T / 2.0);
    g.ratio_error = std::abs(g.exact / g.gauss - 1.0);
    g.modulus_bound_holds = std::abs(g.exact) <= std::exp(-T * T / 4.0);
    return g;
}

// ---------------------------------------------------------------------------
// normal CDF (series + continued fraction, documented accuracy ~1e-15,
// required 1e-10)

namespace detail {

// Maclaurin series for erf, effective for |z| <= 3 where the alternating
// terms stay small enough to keep cancellation below ~1e-13.
inline double erf_series(double z) {
    const double z2 = z * z;
    double term = z;  // z^(2k+1) / (k! (2k+1)) * (2k+1)... built iteratively
    NeumaierSum sum;
    sum.add(z);
    for (int k = 1; k < 200; ++k) {
        term *= -z2 / k;
        const double contrib = term / (2 * k + 1);
        sum.add(contrib);
        if (std::abs(contrib) < 1e-18 * std::abs(sum.value())) break;
    }
    return sum.value() * 2.0 / std::sqrt(std::numbers::pi);
}

// Continued fraction for erfc, z >= 3 (Lentz):
//   erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
inline double erfc_continued_fraction(double z) {
    const double tiny = 1e-300;
    double f = z, c = z, d = 0.0;
    for (int k = 1; k < 400; ++k) {
        const double a = k / 2.0;
        d = z + a * d;
        if (d == 0.0) d = tiny;
        c = z + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-z * z) / (std::sqrt(std::numbers::pi) * f);
}

inline double erfc_positive(double z) {
    return z < 3.0 ? 1.0 - erf_series(z) : erfc_continued_fraction(z);
}

} // namespace detail

inline double standard_normal_cdf(double u) {
    const double a = u / std::numbers::sqrt2;
    if (a >= 0.0) return 1.0 - 0.5 * detail::erfc_positive(a);
    return 0.5 * detail::erfc_positive(-a);
}

// Phi(c) - Phi(-c) = erf(c/sqrt(2)), computed without cancellation.
inline double standard_normal_band(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("standard_normal_band: c must be > 0");
    const double a = c / std::numbers::sqrt2;
    return a < 3.0 ? detail::erf_series(a) : 1.0 - detail::erfc_continued_fraction(a);
}

// ---------------------------------------------------------------------------
// Erdos-Kac band and full-vs-window normalization discrepancy

struct EkBand {
    double empirical = 0.0;
    double gaussian = 0.0;
    uint64_t count = 0;

    double abs_gap() const { return std::abs(empirical - gaussian); }
};

// empirical = (1/x) #{n <= x : -c < (omega(n) - lnln x)/sqrt(lnln x) < c}
// (strict on both sides); gaussian = Phi(c) - Phi(-c).
inline EkBand ek_empirical(uint64_t x, double c, const OmegaTable& t) {
    if (!(c > 0.0)) throw std::invalid_argument("ek_empirical: c must be > 0");
    if (!(static_cast<double>(x) > std::exp(1.0)))
        throw std::invalid_argument("ek_empirical: need ln ln x > 0");
    if (t.lo > 1 || !t.covers(1, x + 1))
        throw coverage_error("ek_empirical: table must cover [1, x]");
    const double center = std::log(std::log(static_cast<double>(x)));
    const double sd = std::sqrt(center);
    EkBand r;
    const uint8_t* w = t.full.data();  // t.lo == 1 guaranteed by the coverage check
    for (uint64_t n = 1; n <= x; ++n) {
        const double dev = (static_cast<double>(w[n - 1]) - center) / sd;
        if (dev > -c && dev < c) ++r.count;
    }
    r.empirical = static_cast<double>(r.count) / static_cast<double>(x);
    r.gaussian = standard_normal_band(c);
    return r;
}

// Sampled distribution of the normalization mismatch
//   |(omega(n)-lnln x)/sqrt(lnln x) - (omega(n;y,z)-S)/sqrt(S)|
// with the fraction exceeding (lnln x)^{-1/2+delta/2}.
struct DiscrepancySummary {
    std::size_t sample_size = 0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    double max = 0.0;
    double exceed_fraction = 0.0;
    double threshold = 0.0;
};

inline DiscrepancySummary truncation_discrepancy(uint64_t x, const PrimeWindow& w,
                                                 double delta, std::size_t sample_size,
                                                 uint64_t seed, const OmegaTable& t) {
    if (!(static_cast<double>(x) > std::exp(1.0)))
        throw std::invalid_argument("truncation_discrepancy: need ln ln x > 0");
    detail::require_matching_window(w, t, "truncation_discrepancy");
    if (t.lo > 1 || !t.covers(1, x + 1))
        throw coverage_error("truncation_discrepancy: table must cover [1, x]");
    const double S = w.reciprocal_sum;
    if (!(S > 0.0)) throw std::invalid_argument("truncation_discrepancy: S must be > 0");

    const double center = std::log(std::log(static_cast<double>(x)));
    DiscrepancySummary out;
    out.sample_size = sample_size;
    out.threshold = std::pow(center, -0.5 + delta / 2.0);
    if (sample_size == 0) return out;

    const double sd_full = std::sqrt(center);
    const double sd_win = std::sqrt(S);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<uint64_t> pick(1, x);
    std::vector<double> d(sample_size);
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < sample_size; ++i) {
        const uint64_t n = pick(rng);
        const double full_dev = (static_cast<double>(t.full[n - t.lo]) - center) / sd_full;
        const double win_dev = (static_cast<double>(t.windowed[n - t.lo]) - S) / sd_win;
        d[i] = std::abs(full_dev - win_dev);
        if (d[i] > out.threshold) ++exceed;
    }
    std::sort(d.begin(), d.end());
    auto quantile = [&](double p) {
        const std::size_t idx = std::min(
            sample_size - 1,
            static_cast<std::size_t>(std::ceil(p * static_cast<double>(sample_size))) -
                (p > 0.0 ? 1 : 0));
        return d[idx];
    };
    out.q50 = quantile(0.50);
    out.q90 = quantile(0.90);
    out.q99 = quantile(0.99);
    out.max = d.back();
    out.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(sample_size);
    return out;
}

// Scale-driven cutoffs y = (log x)^{3r}, z = x^{(lnln x)^{-3r}}.  At desk
// scales these cross (y >= z), which is rejected rather than clamped.
struct PaperCutoffs {
    double y = 0.0;
    double z = 0.0;
};

inline PaperCutoffs paper_cutoffs(double x, int r) {
    if (r < 1) throw std::invalid_argument("paper_cutoffs: need r >= 1");
    if (!(std::log(std::log(x)) > 0.0))
        throw std::invalid_argument("paper_cutoffs: need ln ln x > 0");
    PaperCutoffs c;
    c.y = std::pow(std::log(x), 3.0 * r);
    c.z = std::pow(x, std::pow(std::log(std::log(x)), -3.0 * r));
    if (!(c.y < c.z))
        throw std::invalid_argument(
            "paper_cutoffs: cutoffs degenerate at this scale (y >= z); pass explicit y,z");
    return c;
}

} // namespace omega
