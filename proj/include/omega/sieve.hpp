#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "summation.hpp"

namespace omega {

// Hard ceiling on sieve ranges; counters and double conversions are audited
// for n < 2^40 only.
inline constexpr uint64_t kRangeCeiling = uint64_t(1) << 40;

struct SieveOptions {
    uint64_t segment_size = uint64_t(1) << 22;     // integers per segment
    int threads = 0;                               // 0 = hardware concurrency
    uint64_t max_table_bytes = uint64_t(1) << 31;  // counter budget
};

// Open interval (y, z); prime membership is a strict real comparison.
struct WindowBounds {
    double y = 0.0;
    double z = 0.0;
    bool contains(uint64_t p) const {
        return static_cast<double>(p) > y && static_cast<double>(p) < z;
    }
};

inline uint64_t integer_sqrt(uint64_t n) {
    if (n == 0) return 0;
    auto r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// All primes <= limit, ascending.  Used for base primes (limit <= 2^20).
inline std::vector<uint64_t> simple_primes(uint64_t limit) {
    std::vector<uint64_t> out;
    if (limit < 2) return out;
    std::vector<uint8_t> composite(limit + 1, 0);
    for (uint64_t p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        out.push_back(p);
        for (uint64_t m = p * p; m <= limit; m += p) composite[m] = 1;
    }
    return out;
}

// Visits primes in [lo, hi) in ascending order (segmented, odds-only bitmap).
template <class Fn>
void for_primes(uint64_t lo, uint64_t hi, Fn&& fn, const SieveOptions& opt = {}) {
    if (hi > kRangeCeiling + 1)
        throw budget_error("for_primes: range exceeds 2^40 ceiling");
    if (lo < 2) lo = 2;
    if (lo >= hi) return;
    if (lo == 2) fn(uint64_t(2));

    const std::vector<uint64_t> base = simple_primes(integer_sqrt(hi - 1));
    std::vector<uint8_t> composite;
    for (uint64_t seg_lo = lo; seg_lo < hi; ) {
        const uint64_t seg_hi = std::min(hi, seg_lo + opt.segment_size);
        uint64_t first_odd = seg_lo | 1;
        if (first_odd < 3) first_odd = 3;
        const uint64_t n_odds = first_odd < seg_hi ? (seg_hi - first_odd + 1) / 2 : 0;
        composite.assign(n_odds, 0);
        for (uint64_t p : base) {
            if (p == 2) continue;
            if (p * p >= seg_hi) break;
            uint64_t start = std::max(p * p, (seg_lo + p - 1) / p * p);
            if (start % 2 == 0) start += p;
            for (uint64_t m = start; m < seg_hi; m += 2 * p)
                composite[(m - first_odd) / 2] = 1;
        }
        for (uint64_t i = 0; i < n_odds; ++i)
            if (!composite[i]) fn(first_odd + 2 * i);
        seg_lo = seg_hi;
    }
}

inline std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi,
                                       const SieveOptions& opt = {}) {
    if (lo >= hi) throw std::invalid_argument("primes_in: need lo < hi");
    const double est =
        static_cast<double>(hi - lo) / std::max(2.0, std::log(static_cast<double>(hi)) - 1.0);
    if ((est + 1024.0) * 8.0 > static_cast<double>(opt.max_table_bytes))
        throw budget_error("primes_in: estimated output exceeds memory budget");
    std::vector<uint64_t> out;
    out.reserve(static_cast<std::size_t>(est) + 16);
    for_primes(lo, hi, [&](uint64_t p) { out.push_back(p); }, opt);
    return out;
}

// sum of 1/p over primes y < p < z, accumulated ascending with compensation.
inline double prime_reciprocal_sum(double y, double z, const SieveOptions& opt = {}) {
    if (!(y < z)) throw std::invalid_argument("prime_reciprocal_sum: need y < z");
    if (y < 0.0 || z > static_cast<double>(kRangeCeiling))
        throw std::invalid_argument("prime_reciprocal_sum: bounds outside [0, 2^40]");
    const uint64_t lo = y < 2.0 ? 2 : static_cast<uint64_t>(std::floor(y)) + 1;
    const uint64_t hi = static_cast<uint64_t>(std::ceil(z)) + 1;
    WindowBounds w{y, z};
    NeumaierSum s;
    for_primes(lo, hi, [&](uint64_t p) {
        if (w.contains(p)) s.add(1.0 / static_cast<double>(p));
    }, opt);
    return s.value();
}

// Primes strictly inside (y, z), materialized, with their reciprocal sum.
struct PrimeWindow {
    double y = 0.0;
    double z = 0.0;
    std::vector<uint64_t> primes;
    double reciprocal_sum = 0.0;

    WindowBounds bounds() const { return {y, z}; }
};

inline PrimeWindow prime_window(double y, double z, const SieveOptions& opt = {}) {
    if (!(y < z)) throw std::invalid_argument("prime_window: need y < z");
    if (y < 0.0 || z > static_cast<double>(kRangeCeiling))
        throw std::invalid_argument("prime_window: bounds outside [0, 2^40]");
    PrimeWindow w;
    w.y = y;
    w.z = z;
    const uint64_t lo = y < 2.0 ? 2 : static_cast<uint64_t>(std::floor(y)) + 1;
    const uint64_t hi = static_cast<uint64_t>(std::ceil(z)) + 1;
    WindowBounds bounds{y, z};
    NeumaierSum s;
    for_primes(lo, hi, [&](uint64_t p) {
        if (bounds.contains(p)) {
            w.primes.push_back(p);
            s.add(1.0 / static_cast<double>(p));
        }
    }, opt);
    w.reciprocal_sum = s.value();
    return w;
}

inline double prime_reciprocal_sum(const PrimeWindow& w) {
    NeumaierSum s;
    for (uint64_t p : w.primes) s.add(1.0 / static_cast<double>(p));
    return s.value();
}

// ---------------------------------------------------------------------------
// omega counters

// Base primes for a sieve up to `hi`, with mod-2^64 inverses for exact
// division of segment remainders (odd p only; p=2 divides by shift).
struct BasePrimes {
    std::vector<uint64_t> p;
    std::vector<uint64_t> inv;
    std::vector<uint8_t> in_window;
};

inline uint64_t inverse_mod_pow64(uint64_t p) {
    uint64_t x = p;  // Newton: doubles correct bits each step, 5 steps suffice
    for (int i = 0; i < 5; ++i) x *= 2 - p * x;
    return x;
}

inline BasePrimes make_base_primes(uint64_t hi, const std::optional<WindowBounds>& w) {
    BasePrimes b;
    b.p = simple_primes(integer_sqrt(hi - 1));
    b.inv.resize(b.p.size());
    b.in_window.resize(b.p.size());
    for (std::size_t i = 0; i < b.p.size(); ++i) {
        b.inv[i] = b.p[i] == 2 ? 0 : inverse_mod_pow64(b.p[i]);
        b.in_window[i] = w && w->contains(b.p[i]) ? 1 : 0;
    }
    return b;
}

// Exact distinct-prime-factor counts for [seg_lo, seg_hi).  `full[i]` gets
// omega(seg_lo+i); `win[i]` (when non-null) gets the count restricted to the
// open window.  `rem` is caller scratch of size >= seg_hi-seg_lo.  Each n is
// reduced to its cofactor of primes > sqrt(hi-1); at most one such prime
// remains, detected at the end as rem > 1.
inline void sieve_segment(uint64_t seg_lo, uint64_t seg_hi, const BasePrimes& base,
                          const std::optional<WindowBounds>& w, uint8_t* full,
                          uint8_t* win, uint64_t* rem) {
    const uint64_t len = seg_hi - seg_lo;
    for (uint64_t i = 0; i < len; ++i) rem[i] = seg_lo + i;
    std::memset(full, 0, len);
    if (win) std::memset(win, 0, len);

    for (std::size_t k = 0; k < base.p.size(); ++k) {
        const uint64_t p = base.p[k];
        const uint64_t first = seg_lo <= p ? p : (seg_lo + p - 1) / p * p;
        const bool inw = win && base.in_window[k];
        if (p == 2) {
            for (uint64_t m = first; m < seg_hi; m += 2) {
                const uint64_t i = m - seg_lo;
                ++full[i];
                if (inw) ++win[i];
                rem[i] >>= 1;
            }
            for (uint64_t q = 4; q < seg_hi;) {
                const uint64_t f = seg_lo <= q ? q : (seg_lo + q - 1) / q * q;
                for (uint64_t m = f; m < seg_hi; m += q) rem[m - seg_lo] >>= 1;
                if (q > (seg_hi - 1) / 2) break;
                q *= 2;
            }
        } else {
            const uint64_t inv = base.inv[k];
            for (uint64_t m = first; m < seg_hi; m += p) {
                const uint64_t i = m - seg_lo;
                ++full[i];
                if (inw) ++win[i];
                rem[i] *= inv;  // exact: p | rem[i]
            }
            for (uint64_t q = p * p; q < seg_hi;) {
                const uint64_t f = seg_lo <= q ? q : (seg_lo + q - 1) / q * q;
                for (uint64_t m = f; m < seg_hi; m += q) rem[m - seg_lo] *= inv;
                if (q > (seg_hi - 1) / p) break;
                q *= p;
            }
        }
    }
    for (uint64_t i = 0; i < len; ++i) {
        if (rem[i] > 1) {
            ++full[i];
            if (win && w->contains(rem[i])) ++win[i];
        }
    }
}

// Materialized counter table over [lo, hi).
struct OmegaTable {
    uint64_t lo = 1;
    uint64_t hi = 1;
    std::optional<WindowBounds> window;
    std::vector<uint8_t> full;      // omega(n)
    std::vector<uint8_t> windowed;  // omega(n; y, z); empty without window

    bool covers(uint64_t a, uint64_t b) const { return lo <= a && b <= hi && a <= b; }

    uint8_t omega(uint64_t n) const {
        if (n < lo || n >= hi) throw coverage_error("OmegaTable: n outside covered range");
        return full[n - lo];
    }
    uint8_t omega_in_window(uint64_t n) const {
        if (!window) throw coverage_error("OmegaTable: no window configured");
        if (n < lo || n >= hi) throw coverage_error("OmegaTable: n outside covered range");
        return windowed[n - lo];
    }
};

inline void validate_range(uint64_t lo, uint64_t hi, const char* who) {
    if (lo < 1 || lo >= hi)
        throw std::invalid_argument(std::string(who) + ": need 1 <= lo < hi");
    if (hi > kRangeCeiling)
        throw budget_error(std::string(who) + ": hi exceeds 2^40 ceiling");
}

inline void validate_window(const std::optional<WindowBounds>& w, const char* who) {
    if (w && !(w->y < w->z))
        throw std::invalid_argument(std::string(who) + ": window needs y < z");
}

inline OmegaTable omega_table(uint64_t lo, uint64_t hi,
                              std::optional<WindowBounds> window,
                              const SieveOptions& opt = {}) {
    validate_range(lo, hi, "omega_table");
    validate_window(window, "omega_table");
    const uint64_t n = hi - lo;
    const uint64_t bytes = n * (window ? 2 : 1);
    if (bytes > opt.max_table_bytes)
        throw budget_error("omega_table: counter bytes exceed memory budget");

    OmegaTable t;
    t.lo = lo;
    t.hi = hi;
    t.window = window;
    t.full.resize(n);
    if (window) t.windowed.resize(n);

    const BasePrimes base = make_base_primes(hi, window);
    const uint64_t seg = std::max<uint64_t>(1, opt.segment_size);
    const std::size_t n_seg = static_cast<std::size_t>((n + seg - 1) / seg);
    const int threads = resolve_threads(opt.threads);
    std::vector<std::vector<uint64_t>> scratch(static_cast<std::size_t>(threads));

    parallel_for(n_seg, threads, [&](std::size_t si, int worker) {
        const uint64_t seg_lo = lo + static_cast<uint64_t>(si) * seg;
        const uint64_t seg_hi = std::min(hi, seg_lo + seg);
        auto& rem = scratch[static_cast<std::size_t>(worker)];
        rem.resize(static_cast<std::size_t>(std::min(seg, hi - lo)));
        uint8_t* full = t.full.data() + (seg_lo - lo);
        uint8_t* win = window ? t.windowed.data() + (seg_lo - lo) : nullptr;
        sieve_segment(seg_lo, seg_hi, base, window, full, win, rem.data());
    });
    return t;
}

inline OmegaTable omega_table(uint64_t lo, uint64_t hi, const SieveOptions& opt = {}) {
    return omega_table(lo, hi, std::nullopt, opt);
}

// Streaming scan: runs the same segment kernel without materializing a table.
// fn(seg_lo, full, win) -> T is called once per segment (win empty when no
// window); results are returned in segment order, so reductions over them are
// deterministic for any thread count.
template <class T, class Fn>
std::vector<T> omega_scan(uint64_t lo, uint64_t hi, std::optional<WindowBounds> window,
                          const SieveOptions& opt, Fn&& fn) {
    validate_range(lo, hi, "omega_scan");
    validate_window(window, "omega_scan");

    const BasePrimes base = make_base_primes(hi, window);
    const uint64_t seg = std::max<uint64_t>(1, opt.segment_size);
    const uint64_t n = hi - lo;
    const std::size_t n_seg = static_cast<std::size_t>((n + seg - 1) / seg);
    const int threads = resolve_threads(opt.threads);

    struct Scratch {
        std::vector<uint8_t> full, win;
        std::vector<uint64_t> rem;
    };
    std::vector<Scratch> scratch(static_cast<std::size_t>(threads));
    std::vector<T> results(n_seg);

    parallel_for(n_seg, threads, [&](std::size_t si, int worker) {
        const uint64_t seg_lo = lo + static_cast<uint64_t>(si) * seg;
        const uint64_t seg_hi = std::min(hi, seg_lo + seg);
        const uint64_t len = seg_hi - seg_lo;
        auto& s = scratch[static_cast<std::size_t>(worker)];
        s.full.resize(static_cast<std::size_t>(len));
        s.rem.resize(static_cast<std::size_t>(len));
        uint8_t* win = nullptr;
        if (window) {
            s.win.resize(static_cast<std::size_t>(len));
            win = s.win.data();
        }
        sieve_segment(seg_lo, seg_hi, base, window, s.full.data(), win, s.rem.data());
        results[si] = fn(seg_lo,
                         std::span<const uint8_t>(s.full.data(), static_cast<std::size_t>(len)),
                         std::span<const uint8_t>(win, window ? static_cast<std::size_t>(len) : 0));
    });
    return results;
}

// Both sides of the exact first-moment identity
//   sum_{n<=x} omega(n) == sum_{p<=x} floor(x/p),
// kept as integers so equality can be asserted without rounding.
struct MeanOmegaIdentity {
    uint64_t x = 0;
    uint64_t omega_sum = 0;
    uint64_t floor_sum = 0;

    Rational lhs() const { return Rational(static_cast<__int128>(omega_sum), static_cast<__int128>(x)); }
    Rational rhs() const { return Rational(static_cast<__int128>(floor_sum), static_cast<__int128>(x)); }
};

inline MeanOmegaIdentity mean_omega_identity(uint64_t x, const SieveOptions& opt = {}) {
    if (x < 1) throw std::invalid_argument("mean_omega_identity: need x >= 1");
    MeanOmegaIdentity r;
    r.x = x;
    if (x >= 2) {
        auto partial = omega_scan<uint64_t>(
            1, x + 1, std::nullopt, opt,
            [](uint64_t, std::span<const uint8_t> full, std::span<const uint8_t>) {
                uint64_t s = 0;
                for (uint8_t v : full) s += v;
                return s;
            });
        for (uint64_t s : partial) r.omega_sum += s;
        for_primes(2, x + 1, [&](uint64_t p) { r.floor_sum += x / p; }, opt);
    }
    return r;
}

} // namespace omega
