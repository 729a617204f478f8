#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "crdf/bounds.hpp"

using namespace crdf;

namespace {
const FrequencyGrid kGrid(4096);
const SpectralModel kAr1 = psd_from_ar(ArModel{{0.9}, 1.0}, kGrid);
const SpectralModel kAr2 = psd_from_ar(ArModel{{1.0, -0.09}, 1.0}, kGrid);
const SpectralModel kWhite = psd_from_ar(ArModel{{}, 1.0}, kGrid);
}  // namespace

TEST_CASE("b1 is nonnegative and vanishes near the variance") {
    for (double frac : {0.1, 0.4, 0.7, 0.95})
        REQUIRE(bound_b1(kAr1, frac * kAr1.variance()) >= 0.0);
    REQUIRE(bound_b1(kAr1, 0.999 * kAr1.variance()) < 0.02);
    REQUIRE_THROWS_AS(bound_b1(kAr1, kAr1.variance()), std::invalid_argument);
    REQUIRE_THROWS_AS(bound_b1(kAr1, 0.0), std::invalid_argument);
}

TEST_CASE("b2 collapses to zero for a white source") {
    for (double D : {0.1, 0.5, 0.9})
        REQUIRE(std::abs(bound_b2(kWhite, D)) < 1e-10);
}

TEST_CASE("b2 dominates b1 on a sampled distortion grid") {
    for (const auto* spec : {&kAr1, &kAr2})
        for (double frac = 0.05; frac < 0.99; frac += 0.07)
            REQUIRE(bound_b1(*spec, frac * spec->variance()) <=
                    bound_b2(*spec, frac * spec->variance()) + 1e-9);
}

TEST_CASE("b3 branch behavior") {
    // white source with epsilon 0: the first branch is exactly zero
    REQUIRE(bound_b3(kWhite, 0.5, 0.0) == Catch::Approx(0.0).margin(1e-12));
    // at D = sigma_x^2 the third branch wins and is zero
    REQUIRE(bound_b3(kAr1, kAr1.variance(), 0.0) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_THROWS_AS(bound_b3(kAr1, 1.0, 2.0), std::invalid_argument);  // epsilon > D
}

TEST_CASE("b3 with a psd zero requires a positive epsilon") {
    FrequencyGrid g(64);
    std::vector<double> table(g.size(), 1.0);
    table[0] = 0.0;  // self-mirrored bin keeps the table symmetric
    SpectralModel spec(g, table);
    REQUIRE_THROWS_WITH(bound_b3(spec, 0.5, 0.0),
                        Catch::Matchers::ContainsSubstring("raise epsilon"));
    REQUIRE_NOTHROW(bound_b3(spec, 0.5, default_b3_epsilon(spec, 0.5)));
}

TEST_CASE("bound values at a reference point match the fine-grid oracle") {
    // frozen from an independent 2^16-grid evaluation at D = 2
    REQUIRE(bound_b1(kAr1, 2.0) == Catch::Approx(0.141598086729).margin(1e-8));
    REQUIRE(bound_b2(kAr1, 2.0) == Catch::Approx(0.178463850603).margin(1e-8));
    REQUIRE(bound_b3(kAr1, 2.0, std::min(2.0, kAr1.min_psd())) ==
            Catch::Approx(0.346573590280).margin(1e-10));
}

TEST_CASE("bound chain holds over fifty log-spaced distortions") {
    const double half_bit = 0.5 * std::log(2.0);
    for (const auto* spec : {&kAr1, &kAr2}) {
        const double var = spec->variance();
        for (int i = 0; i < 50; ++i) {
            const double D =
                0.01 * var * std::pow(99.0, static_cast<double>(i) / 49.0);
            const auto rep = bound_report(*spec, D);
            CAPTURE(D, rep.b1, rep.b2, rep.b3);
            REQUIRE(rep.b1 >= 0.0);
            REQUIRE(rep.b1 <= rep.b2 + 1e-9);
            REQUIRE(rep.b2 < rep.b3);
            REQUIRE(rep.b3 <= half_bit + 1e-12);
        }
    }
}

TEST_CASE("all bounds vanish in the small- and large-distortion limits") {
    for (const auto* spec : {&kAr1, &kAr2}) {
        for (double D : {1e-4 * spec->variance(), 0.999 * spec->variance()}) {
            const auto rep = bound_report(*spec, D);
            REQUIRE(rep.b1 < 0.02);
            REQUIRE(rep.b2 < 0.02);
            REQUIRE(rep.b3 < 0.02);
        }
    }
}
