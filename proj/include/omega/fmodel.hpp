#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rational.hpp"
#include "sieve.hpp"

namespace omega {

// ---------------------------------------------------------------------------
// factorizations

struct PrimePower {
    uint64_t p = 0;
    uint32_t alpha = 0;
};

struct Factored {
    uint64_t value = 1;
    std::vector<PrimePower> factors;  // ascending p

    uint64_t radical() const {  // squarefree part A
        uint64_t r = 1;
        for (const auto& f : factors) r *= f.p;
        return r;
    }
    uint32_t big_omega() const {
        uint32_t s = 0;
        for (const auto& f : factors) s += f.alpha;
        return s;
    }
    uint32_t tau_radical() const {  // tau(A) = 2^{#distinct primes}
        return uint32_t(1) << factors.size();
    }
    bool square_full() const {  // p | value implies p^2 | value; 1 vacuously
        for (const auto& f : factors)
            if (f.alpha < 2) return false;
        return true;
    }
};

inline Factored factorize(uint64_t a) {
    if (a < 1) throw std::invalid_argument("factorize: need a >= 1");
    Factored f;
    f.value = a;
    for (uint64_t p = 2; p * p <= a; p += (p == 2 ? 1 : 2)) {
        if (a % p) continue;
        PrimePower pp{p, 0};
        while (a % p == 0) {
            a /= p;
            ++pp.alpha;
        }
        f.factors.push_back(pp);
    }
    if (a > 1) f.factors.push_back({a, 1});
    return f;
}

inline bool is_prime_u64(uint64_t p) {
    if (p < 2) return false;
    for (uint64_t d = 2; d * d <= p; d += (d == 2 ? 1 : 2))
        if (p % d == 0) return false;
    return true;
}

struct FactoredTuple {
    std::vector<Factored> entries;
    bool pairwise_coprime = true;
};

inline FactoredTuple make_factored_tuple(std::span<const uint64_t> a) {
    if (a.empty()) throw std::invalid_argument("make_factored_tuple: empty tuple");
    FactoredTuple t;
    for (uint64_t v : a) t.entries.push_back(factorize(v));
    for (std::size_t i = 0; i < a.size() && t.pairwise_coprime; ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (std::gcd(a[i], a[j]) != 1) {
                t.pairwise_coprime = false;
                break;
            }
    return t;
}

// ---------------------------------------------------------------------------
// f values

// f_p(n) = 1 - 1/p if p | n, else -1/p.
inline Rational f_p(uint64_t n, uint64_t p) {
    if (!is_prime_u64(p)) throw std::invalid_argument("f_p: p must be prime");
    if (n < 1) throw std::invalid_argument("f_p: need n >= 1");
    const auto ip = static_cast<__int128>(p);
    return n % p == 0 ? Rational(ip - 1, ip) : Rational(-1, ip);
}

// f_m(n) = prod over p^alpha || m of f_p(n)^alpha; f_1 = 1.
inline Rational f_m(uint64_t n, const Factored& m) {
    Rational out(1);
    for (const auto& pp : m.factors) {
        const auto ip = static_cast<__int128>(pp.p);
        const Rational base = n % pp.p == 0 ? Rational(ip - 1, ip) : Rational(-1, ip);
        out *= base.pow(pp.alpha);
    }
    return out;
}

inline Rational f_m(uint64_t n, uint64_t m) { return f_m(n, factorize(m)); }

// ---------------------------------------------------------------------------
// correlation main term and K coefficients

// prod_i prod_{p^alpha || a_i} ( (1/p)(1-1/p)^alpha + (-1/p)^alpha (1-1/p) ).
// Zero whenever some alpha = 1, i.e. unless every a_i is square-full.
inline Rational lemma_one_main_term(const FactoredTuple& t) {
    if (!t.pairwise_coprime)
        throw std::invalid_argument("lemma_one_main_term: tuple must be pairwise coprime");
    Rational out(1);
    for (const auto& e : t.entries) {
        for (const auto& pp : e.factors) {
            const auto ip = static_cast<__int128>(pp.p);
            const Rational inv_p(1, ip);
            const Rational one_minus(ip - 1, ip);
            const Rational term =
                inv_p * one_minus.pow(pp.alpha) + Rational(-1, ip).pow(pp.alpha) * one_minus;
            out *= term;
        }
    }
    return out;
}

// prod_i prod_{p^alpha || a_i} i^alpha / alpha!, exact Gaussian rational.
inline GaussianRational k_coefficient(const FactoredTuple& t) {
    if (!t.pairwise_coprime)
        throw std::invalid_argument("k_coefficient: closed form needs pairwise coprime");
    GaussianRational out{Rational(1), Rational(0)};
    for (const auto& e : t.entries) {
        for (const auto& pp : e.factors) {
            __int128 fact = 1;
            for (uint32_t k = 2; k <= pp.alpha; ++k)
                fact = Rational::checked_mul(fact, k);
            out *= GaussianRational::unit_i_pow(pp.alpha) * Rational(1, fact);
        }
    }
    return out;
}

// Error scale of the correlation lemma: prod_i tau(A_i)^2 / x.
inline double tau_error_bound(const FactoredTuple& t, uint64_t x) {
    double prod = 1.0;
    for (const auto& e : t.entries) {
        const double tau = static_cast<double>(e.tau_radical());
        prod *= tau * tau;
    }
    return prod / static_cast<double>(x);
}

// ---------------------------------------------------------------------------
// empirical averages (exact rationals, two independent paths)

namespace detail {

// Integer numerator of f_a(v) over the fixed denominator a: product over
// p^alpha || a of (p-1)^alpha when p | v, else (-1)^alpha.
inline int64_t f_numerator(uint64_t v, const Factored& a) {
    int64_t num = 1;
    for (const auto& pp : a.factors) {
        if (v % pp.p == 0) {
            for (uint32_t k = 0; k < pp.alpha; ++k)
                num *= static_cast<int64_t>(pp.p - 1);
        } else if (pp.alpha % 2 == 1) {
            num = -num;
        }
    }
    return num;
}

// general CRT merge: r = a (mod m) and r = b (mod n); false if incompatible.
inline bool crt_merge(__int128& a, __int128& m, __int128 b, __int128 n) {
    auto mod = [](__int128 v, __int128 q) {
        __int128 r = v % q;
        return r < 0 ? r + q : r;
    };
    // extended gcd on (m, n)
    __int128 old_r = m, r = n, old_s = 1, s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        __int128 tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    const __int128 g = old_r;  // gcd; old_s * m = g (mod n)
    if ((b - a) % g != 0) return false;
    const __int128 lcm = m / g * n;
    const __int128 step = mod(old_s * ((b - a) / g), n / g);
    a = mod(a + m * step, lcm);
    m = lcm;
    return true;
}

} // namespace detail

// Direct path: (1/x) sum_{n<=x} prod_i f_{a_i}(n+b_i) with per-entry residue
// tables (f_{a}(v) depends on v mod radical(a) only) and a fixed common
// denominator x * prod a_i, accumulated in checked 128-bit integers.
inline Rational empirical_f_average_direct(uint64_t x, const FactoredTuple& t,
                                           std::span<const uint64_t> shifts) {
    if (shifts.size() != t.entries.size())
        throw std::invalid_argument("empirical_f_average: |shifts| must equal |tuple|");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        if (shifts[i] <= shifts[i - 1])
            throw std::invalid_argument("empirical_f_average: shifts distinct ascending");
    if (x < 1) throw std::invalid_argument("empirical_f_average: need x >= 1");

    const std::size_t r = t.entries.size();
    std::vector<std::vector<int64_t>> table(r);
    std::vector<uint64_t> rad(r);
    for (std::size_t i = 0; i < r; ++i) {
        rad[i] = t.entries[i].radical();
        table[i].resize(rad[i]);
        for (uint64_t v = 0; v < rad[i]; ++v)
            table[i][v] = detail::f_numerator(v, t.entries[i]);
    }

    __int128 acc = 0;
    for (uint64_t n = 1; n <= x; ++n) {
        __int128 term = table[0][(n + shifts[0]) % rad[0]];
        for (std::size_t i = 1; i < r; ++i)
            term = Rational::checked_mul(term, table[i][(n + shifts[i]) % rad[i]]);
        acc = Rational::checked_add(acc, term);
    }
    __int128 den = static_cast<__int128>(x);
    for (const auto& e : t.entries)
        den = Rational::checked_mul(den, static_cast<__int128>(e.value));
    return Rational(acc, den);
}

// Divisor-sum path: expand each f_{a_i}(n+b_i) over divisors d_i | A_i with
// Mobius complements e_i | A_i/d_i, reducing the average to exact counts of
// n <= x in merged congruence classes.  Valid for arbitrary tuples (the CRT
// merge handles shared moduli); serves as an independent oracle for the
// direct path.
inline Rational empirical_f_average_divisors(uint64_t x, const FactoredTuple& t,
                                             std::span<const uint64_t> shifts) {
    if (shifts.size() != t.entries.size())
        throw std::invalid_argument("empirical_f_average: |shifts| must equal |tuple|");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        if (shifts[i] <= shifts[i - 1])
            throw std::invalid_argument("empirical_f_average: shifts distinct ascending");
    if (x < 1) throw std::invalid_argument("empirical_f_average: need x >= 1");

    const std::size_t r = t.entries.size();
    // per entry: all (d, e, mu(e)*numerator(f_a(d))) combinations; each prime
    // of A_i goes to d, to e, or to neither.
    struct Combo {
        uint64_t modulus;  // d * e
        int64_t coeff;     // mu(e) * f-numerator of d
    };
    std::vector<std::vector<Combo>> combos(r);
    for (std::size_t i = 0; i < r; ++i) {
        const auto& primes = t.entries[i].factors;
        const std::size_t k = primes.size();
        // iterate 3^k assignments by mixed-radix counter
        std::vector<int> assign(k, 0);
        for (;;) {
            uint64_t d = 1, e = 1;
            for (std::size_t j = 0; j < k; ++j) {
                if (assign[j] == 1) d *= primes[j].p;
                else if (assign[j] == 2) e *= primes[j].p;
            }
            int64_t coeff = detail::f_numerator(d, t.entries[i]);
            int mu = 1;
            for (std::size_t j = 0; j < k; ++j)
                if (assign[j] == 2) mu = -mu;
            combos[i].push_back({d * e, mu * coeff});
            std::size_t pos = 0;
            while (pos < k && ++assign[pos] == 3) assign[pos++] = 0;
            if (pos == k) break;
        }
    }

    __int128 acc = 0;
    std::vector<std::size_t> idx(r, 0);
    for (;;) {
        // merge congruences n = -b_i (mod modulus_i)
        __int128 a = 0, mmod = 1;
        __int128 coeff = 1;
        bool compatible = true;
        for (std::size_t i = 0; i < r; ++i) {
            const Combo& c = combos[i][idx[i]];
            coeff = Rational::checked_mul(coeff, c.coeff);
            const auto m = static_cast<__int128>(c.modulus);
            const __int128 want =
                (m - static_cast<__int128>(shifts[i] % c.modulus)) % m;
            if (!detail::crt_merge(a, mmod, want, m)) {
                compatible = false;
                break;
            }
        }
        if (compatible && coeff != 0) {
            // smallest n >= 1 with n = a (mod mmod)
            __int128 n0 = a == 0 ? mmod : a;
            if (n0 <= static_cast<__int128>(x)) {
                const __int128 count = (static_cast<__int128>(x) - n0) / mmod + 1;
                acc = Rational::checked_add(acc, Rational::checked_mul(count, coeff));
            }
        }
        std::size_t pos = 0;
        while (pos < r && ++idx[pos] == combos[pos].size()) idx[pos++] = 0;
        if (pos == r) break;
    }

    __int128 den = static_cast<__int128>(x);
    for (const auto& e : t.entries)
        den = Rational::checked_mul(den, static_cast<__int128>(e.value));
    return Rational(acc, den);
}

// Dispatch: direct summation up to 10^7, divisor-sum expansion beyond.
inline Rational empirical_f_average(uint64_t x, const FactoredTuple& t,
                                    std::span<const uint64_t> shifts) {
    return x <= 10000000 ? empirical_f_average_direct(x, t, shifts)
                         : empirical_f_average_divisors(x, t, shifts);
}

// ---------------------------------------------------------------------------
// single-shift exponential expansion

// lhs = prod_p exp(it f_p(n)) over window primes; rhs = truncation of
// sum_a K_a t^{Omega(a)} f_a(n) over a supported on the window with
// Omega(a) <= max_order; tail bound sum_{k>max_order} (t #primes)^k / k!.
struct ExpansionCheck {
    std::complex<double> lhs;
    std::complex<double> rhs;
    double tail_bound = 0.0;
    double residual = 0.0;
    bool within_tail = false;
};

inline ExpansionCheck expansion_check(uint64_t n, const PrimeWindow& w, double t,
                                      int max_order) {
    if (w.primes.size() > 8)
        throw std::invalid_argument("expansion_check: window too large (> 8 primes)");
    if (w.primes.empty()) throw std::invalid_argument("expansion_check: empty window");
    if (max_order < 1) throw std::invalid_argument("expansion_check: need max_order >= 1");
    if (n < 1) throw std::invalid_argument("expansion_check: need n >= 1");

    const std::size_t k = w.primes.size();
    std::vector<double> f(k);
    double fsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const auto p = static_cast<double>(w.primes[j]);
        f[j] = n % w.primes[j] == 0 ? (p - 1.0) / p : -1.0 / p;
        fsum += f[j];
    }

    ExpansionCheck out;
    out.lhs = std::polar(1.0, t * fsum);

    // enumerate exponent vectors alpha with |alpha| <= max_order, carrying
    // the partial coefficient so each node costs O(1)
    std::complex<double> rhs(0.0, 0.0);
    auto visit = [&](auto&& self, std::size_t j, int total, double mag) -> void {
        if (j == k) {
            std::complex<double> unit(1.0, 0.0);
            switch (total % 4) {
                case 1: unit = {0.0, 1.0}; break;
                case 2: unit = {-1.0, 0.0}; break;
                case 3: unit = {0.0, -1.0}; break;
                default: break;
            }
            rhs += unit * mag * std::pow(t, total);
            return;
        }
        double m = mag;
        for (int a = 0; total + a <= max_order; ++a) {
            if (a > 0) m *= f[j] / a;  // extends f_j^a / a!
            self(self, j + 1, total + a, m);
        }
    };
    visit(visit, 0, 0, 1.0);
    out.rhs = rhs;

    // tail of exp(|t| #primes): strictly dominates every dropped term
    const double tp = std::abs(t) * static_cast<double>(k);
    double term = 1.0;
    for (int j = 1; j <= max_order; ++j) term *= tp / j;
    NeumaierSum tail;
    for (int j = max_order + 1; j < max_order + 400; ++j) {
        term *= tp / j;
        tail.add(term);
        if (term < 1e-30 * (tail.value() + 1e-300)) break;
    }
    out.tail_bound = tail.value();
    out.residual = std::abs(out.lhs - out.rhs);
    out.within_tail = out.residual <= out.tail_bound;
    return out;
}

} // namespace omega
