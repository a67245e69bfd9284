#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "sieve.hpp"

namespace omega {

// Scale-dependent normality predicate: n counts as delta-normal when omega(n)
// sits within `threshold` of `center`.  The default convention centers at
// ln ln x with threshold sqrt(pi/2)*(ln ln x)^delta; the alternative
// per-n convention (|omega(n) - lnln n| <= (lnln n)^delta) sits behind
// `per_n_centering` and is not used by any acceptance path.
struct NormalityContext {
    double x = 0.0;
    double delta = 0.0;
    double center = 0.0;             // ln ln x
    double threshold = 0.0;          // sqrt(pi/2) * (ln ln x)^delta
    double rescale = 0.0;            // s = (ln ln x)^(1/2 - delta)
    double enumeration_bound = 0.0;  // x * s
    bool per_n_centering = false;

    // Standard construction from the scale parameters; delta open in (0, 1/2).
    static NormalityContext for_scale(double x, double delta) {
        if (!(delta > 0.0 && delta < 0.5))
            throw std::invalid_argument("NormalityContext: delta must lie in (0, 1/2)");
        if (!(x > std::exp(1.0)))
            throw std::invalid_argument("NormalityContext: need x > e so that ln ln x > 0");
        NormalityContext c;
        c.x = x;
        c.delta = delta;
        const double loglog = std::log(std::log(x));
        c.center = loglog;
        c.threshold = std::sqrt(std::numbers::pi / 2.0) * std::pow(loglog, delta);
        c.rescale = std::pow(loglog, 0.5 - delta);
        c.enumeration_bound = x * c.rescale;
        return c;
    }

    // Direct construction for toy/boundary contexts used in tests (bypasses
    // the delta range check; per-n centering unavailable here).
    static NormalityContext from_parts(double x, double center, double threshold,
                                       double rescale) {
        NormalityContext c;
        c.x = x;
        c.center = center;
        c.threshold = threshold;
        c.rescale = rescale;
        c.enumeration_bound = x * rescale;
        return c;
    }
};

// Ties (|omega - center| == threshold) count as normal.
inline bool is_delta_normal(uint64_t n, uint8_t omega_n, const NormalityContext& ctx) {
    if (ctx.per_n_centering) {
        if (n < 3) return false;  // ln ln n undefined/nonpositive
        const double c = std::log(std::log(static_cast<double>(n)));
        if (!(c > 0.0)) return false;
        return std::abs(static_cast<double>(omega_n) - c) <= std::pow(c, ctx.delta);
    }
    return std::abs(static_cast<double>(omega_n) - ctx.center) <= ctx.threshold;
}

// Ascending delta-normal integers up to `covered_to` (defaults to the
// context's enumeration bound; pass a larger bound when windows must extend
// past it).
struct NormalSequence {
    NormalityContext context;
    std::vector<uint64_t> values;
    uint64_t covered_to = 0;
};

inline NormalSequence enumerate_normal(const NormalityContext& ctx, const OmegaTable& t,
                                       std::optional<uint64_t> up_to = {}) {
    const uint64_t bound =
        up_to ? *up_to : static_cast<uint64_t>(std::floor(ctx.enumeration_bound));
    if (t.lo > 1 || !t.covers(1, bound + 1))
        throw coverage_error("enumerate_normal: table must cover [1, bound]");
    NormalSequence seq;
    seq.context = ctx;
    seq.covered_to = bound;
    const uint8_t* w = t.full.data();
    for (uint64_t n = 1; n <= bound; ++n)
        if (is_delta_normal(n, w[n - t.lo], ctx)) seq.values.push_back(n);
    return seq;
}

inline uint64_t count_normal(const NormalityContext& ctx, uint64_t X, const OmegaTable& t) {
    if (t.lo > 1 || !t.covers(1, X + 1))
        throw coverage_error("count_normal: table must cover [1, X]");
    uint64_t c = 0;
    const uint8_t* w = t.full.data();
    for (uint64_t n = 1; n <= X; ++n)
        if (is_delta_normal(n, w[n - t.lo], ctx)) ++c;
    return c;
}

inline void validate_shifts(std::span<const uint64_t> shifts, const char* who) {
    if (shifts.empty()) throw std::invalid_argument(std::string(who) + ": shifts empty");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        if (shifts[i] <= shifts[i - 1])
            throw std::invalid_argument(std::string(who) +
                                        ": shifts must be distinct ascending");
}

// #{n <= X : n + b_i is delta-normal for every shift b_i}.
inline uint64_t correlated_count(const NormalityContext& ctx, uint64_t X,
                                 std::span<const uint64_t> shifts, const OmegaTable& t) {
    validate_shifts(shifts, "correlated_count");
    const uint64_t br = shifts.back();
    if (t.lo > 1 || !t.covers(1, X + br + 1))
        throw coverage_error("correlated_count: table must cover [1, X + max shift]");
    uint64_t c = 0;
    const uint8_t* w = t.full.data();
    for (uint64_t n = 1; n <= X; ++n) {
        bool all = true;
        for (uint64_t b : shifts) {
            if (!is_delta_normal(n + b, w[n + b - t.lo], ctx)) {
                all = false;
                break;
            }
        }
        if (all) ++c;
    }
    return c;
}

// Shift magnitudes beyond lambda*s leave the spacing regime the correlation
// bounds describe; callers warn (not error) on violation.
inline bool shifts_within_bound(const NormalityContext& ctx,
                                std::span<const uint64_t> shifts, double lambda) {
    validate_shifts(shifts, "shifts_within_bound");
    return static_cast<double>(shifts.back()) <= lambda * ctx.rescale;
}

} // namespace omega
