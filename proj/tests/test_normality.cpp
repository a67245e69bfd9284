#include <catch2/catch_amalgamated.hpp>

#include <omega/normality.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace omega;

namespace {
NormalityContext toy_ctx(double x = 10.0) {
    // normal <=> omega(n) in {1, 2}
    return NormalityContext::from_parts(x, 1.5, 0.5, 1.0);
}
} // namespace

TEST_CASE("for_scale fills in the standard convention") {
    auto ctx = NormalityContext::for_scale(1.0e6, 0.25);
    REQUIRE(ctx.center == std::log(std::log(1.0e6)));
    REQUIRE(ctx.threshold == std::sqrt(std::numbers::pi / 2.0) * std::pow(ctx.center, 0.25));
    REQUIRE(ctx.rescale == std::pow(ctx.center, 0.25));
    REQUIRE(ctx.enumeration_bound == 1.0e6 * ctx.rescale);
    // coarse frozen decimals so a convention swap cannot slip by
    REQUIRE(ctx.center == Catch::Approx(2.6258).margin(5e-4));
    REQUIRE(ctx.rescale == Catch::Approx(1.2730).margin(5e-4));
    REQUIRE(ctx.threshold == Catch::Approx(1.5954).margin(1e-3));
    REQUIRE_FALSE(ctx.per_n_centering);
}

TEST_CASE("for_scale validates its arguments") {
    REQUIRE_THROWS_AS(NormalityContext::for_scale(1.0e6, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(NormalityContext::for_scale(1.0e6, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(NormalityContext::for_scale(1.0e6, 0.7), std::invalid_argument);
    REQUIRE_THROWS_AS(NormalityContext::for_scale(1.0e6, -0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(NormalityContext::for_scale(2.0, 0.25), std::invalid_argument);
    REQUIRE_THROWS_AS(NormalityContext::for_scale(std::exp(1.0), 0.25), std::invalid_argument);
}

TEST_CASE("ties count as normal") {
    auto ctx = toy_ctx();
    REQUIRE(is_delta_normal(2, 1, ctx));   // |1 - 1.5| == 0.5 exactly
    REQUIRE(is_delta_normal(4, 2, ctx));   // |2 - 1.5| == 0.5 exactly
    REQUIRE_FALSE(is_delta_normal(1, 0, ctx));
    REQUIRE_FALSE(is_delta_normal(30, 3, ctx));
}

TEST_CASE("toy enumeration yields 2..10") {
    auto ctx = toy_ctx();
    auto t = omega_table(1, 12);
    auto seq = enumerate_normal(ctx, t);
    REQUIRE(seq.values == std::vector<uint64_t>{2, 3, 4, 5, 6, 7, 8, 9, 10});
    REQUIRE(seq.covered_to == 10);
    REQUIRE(count_normal(ctx, 10, t) == 9);
    REQUIRE(count_normal(ctx, 1, t) == 0);

    std::vector<uint64_t> shifts{0, 1};
    REQUIRE(correlated_count(ctx, 9, shifts, t) == 8);  // n = 2..9
}

TEST_CASE("enumeration agrees with a direct filter") {
    for (double delta : {0.1, 0.25, 0.4}) {
        auto ctx = NormalityContext::for_scale(3000.0, delta);
        const uint64_t bound = uint64_t(std::floor(ctx.enumeration_bound));
        auto t = omega_table(1, bound + 1);
        auto seq = enumerate_normal(ctx, t);
        std::vector<uint64_t> brute;
        for (uint64_t n = 1; n <= bound; ++n) {
            int w = oracle::omega_trial(n).first;
            if (std::abs(double(w) - ctx.center) <= ctx.threshold) brute.push_back(n);
        }
        REQUIRE(seq.values == brute);
    }
}

TEST_CASE("counts are monotone and correlation is dominated by single shifts") {
    auto ctx = NormalityContext::for_scale(2000.0, 0.3);
    auto t = omega_table(1, 2200);
    uint64_t prev = 0;
    for (uint64_t X : {10, 100, 500, 1000, 2000}) {
        uint64_t c = count_normal(ctx, X, t);
        REQUIRE(c >= prev);
        REQUIRE(c <= X);
        prev = c;
    }
    std::vector<uint64_t> shifts{0, 3, 7};
    uint64_t corr = correlated_count(ctx, 2000, shifts, t);
    for (uint64_t b : shifts) {
        uint64_t single = 0;
        for (uint64_t n = 1; n <= 2000; ++n)
            if (is_delta_normal(n + b, t.omega(n + b), ctx)) ++single;
        REQUIRE(corr <= single);
    }
}

TEST_CASE("coverage requirements are enforced") {
    auto ctx = toy_ctx();
    auto small = omega_table(1, 9);
    REQUIRE_THROWS_AS(enumerate_normal(ctx, small), coverage_error);
    REQUIRE_THROWS_AS(count_normal(ctx, 20, small), coverage_error);
    auto offset = omega_table(2, 20);
    REQUIRE_THROWS_AS(count_normal(ctx, 10, offset), coverage_error);
    std::vector<uint64_t> shifts{0, 5};
    auto t = omega_table(1, 12);
    REQUIRE_THROWS_AS(correlated_count(ctx, 10, shifts, t), coverage_error);

    // explicit larger bound succeeds when the table reaches it
    auto big = omega_table(1, 30);
    auto seq = enumerate_normal(ctx, big, 20);
    REQUIRE(seq.covered_to == 20);
}

TEST_CASE("shift validation") {
    auto ctx = toy_ctx();
    auto t = omega_table(1, 12);
    std::vector<uint64_t> empty;
    std::vector<uint64_t> dup{1, 1};
    std::vector<uint64_t> desc{2, 1};
    REQUIRE_THROWS_AS(correlated_count(ctx, 5, empty, t), std::invalid_argument);
    REQUIRE_THROWS_AS(correlated_count(ctx, 5, dup, t), std::invalid_argument);
    REQUIRE_THROWS_AS(correlated_count(ctx, 5, desc, t), std::invalid_argument);
}

TEST_CASE("shift magnitude check against lambda * s") {
    auto ctx = NormalityContext::from_parts(10.0, 1.5, 0.5, 2.0);
    std::vector<uint64_t> shifts{0, 3};
    REQUIRE_FALSE(shifts_within_bound(ctx, shifts, 1.0));
    REQUIRE(shifts_within_bound(ctx, shifts, 2.0));
}

TEST_CASE("per-n centering variant") {
    auto ctx = NormalityContext::for_scale(100.0, 0.25);
    ctx.per_n_centering = true;
    REQUIRE_FALSE(is_delta_normal(1, 0, ctx));
    REQUIRE_FALSE(is_delta_normal(2, 1, ctx));  // ln ln 2 < 0
    for (uint64_t n = 3; n <= 100; ++n) {
        int w = oracle::omega_trial(n).first;
        double c = std::log(std::log(double(n)));
        bool want = c > 0.0 && std::abs(double(w) - c) <= std::pow(c, 0.25);
        REQUIRE(is_delta_normal(n, uint8_t(w), ctx) == want);
    }
    // spot values straddling the predicate
    REQUIRE(is_delta_normal(13, 1, ctx));
    REQUIRE_FALSE(is_delta_normal(15, 2, ctx));
}
