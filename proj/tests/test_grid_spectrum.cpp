#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "crdf/spectrum.hpp"
#include "oracles.hpp"

using namespace crdf;

TEST_CASE("frequency grid covers [-pi, pi) with exact spacing and mirror symmetry") {
    FrequencyGrid g(64);
    REQUIRE(g.size() == 64);
    REQUIRE(g.omega(0) == Catch::Approx(-std::numbers::pi));
    for (std::size_t i = 1; i < g.size(); ++i)
        REQUIRE(g.omega(i) - g.omega(i - 1) ==
                Catch::Approx(2.0 * std::numbers::pi / 64.0).margin(1e-15));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double neg = -g.omega(i);
        const double wrapped = neg >= std::numbers::pi ? neg - 2.0 * std::numbers::pi : neg;
        REQUIRE(g.omega(g.mirror(i)) == Catch::Approx(wrapped).margin(1e-12));
    }
    REQUIRE_THROWS_AS(FrequencyGrid(63), std::invalid_argument);
    REQUIRE_THROWS_AS(FrequencyGrid(0), std::invalid_argument);
}

TEST_CASE("quad_mean on constants and odd harmonics") {
    FrequencyGrid g(256);
    std::vector<double> c(g.size(), 3.0);
    REQUIRE(quad_mean(c) == Catch::Approx(3.0));
    std::vector<double> cosw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) cosw[i] = std::cos(g.omega(i));
    REQUIRE(std::abs(quad_mean(cosw)) < 1e-12);
}

TEST_CASE("AR psd variances match Yule-Walker closed forms") {
    FrequencyGrid g(4096);
    auto ar1 = psd_from_ar(ArModel{{0.9}, 1.0}, g);
    REQUIRE(ar1.variance() ==
            Catch::Approx(oracle::yule_walker_ar1_variance(0.9, 1.0)).epsilon(1e-10));
    REQUIRE(ar1.variance() == Catch::Approx(5.26).margin(0.01));

    auto ar2 = psd_from_ar(ArModel{{1.0, -0.09}, 1.0}, g);  // poles 0.9 and 0.1
    REQUIRE(ar2.variance() ==
            Catch::Approx(oracle::yule_walker_ar2_variance(1.0, -0.09, 1.0)).epsilon(1e-10));
    REQUIRE(ar2.variance() == Catch::Approx(6.37).margin(0.01));

    auto white = psd_from_ar(ArModel{{}, 1.0}, g);
    for (double s : white.psd()) REQUIRE(s == Catch::Approx(1.0));
    REQUIRE(white.variance() == Catch::Approx(1.0));
}

TEST_CASE("spectral model invariants hold after construction") {
    FrequencyGrid g(1024);
    for (const auto& coeffs : {std::vector<double>{0.9}, std::vector<double>{1.0, -0.09}}) {
        auto spec = psd_from_ar(ArModel{coeffs, 1.3}, g);
        REQUIRE(spec.variance() == Catch::Approx(quad_mean(spec.psd())).epsilon(1e-12));
        for (std::size_t i = 0; i < g.size(); ++i) {
            REQUIRE(spec.omega_x()[i] * spec.omega_x()[i] ==
                    Catch::Approx(spec.psd()[i]).epsilon(1e-12));
            REQUIRE(spec.psd()[i] == Catch::Approx(spec.psd()[g.mirror(i)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("non-stationary AR models are rejected with root diagnostics") {
    FrequencyGrid g(64);
    REQUIRE_THROWS_WITH(psd_from_ar(ArModel{{1.1}, 1.0}, g),
                        Catch::Matchers::ContainsSubstring("1.1"));
    REQUIRE_THROWS_AS(psd_from_ar(ArModel{{0.5}, -1.0}, g), std::invalid_argument);
}

TEST_CASE("quadrature error vs Yule-Walker shrinks at least quadratically as the grid doubles") {
    // near-unit-circle pole keeps the aliasing error visible at small grids
    const double a = 0.995;
    const double exact = oracle::yule_walker_ar1_variance(a, 1.0);
    double prev = 0.0;
    for (std::size_t n : {512u, 1024u, 2048u}) {
        const double err =
            std::abs(psd_from_ar(ArModel{{a}, 1.0}, FrequencyGrid(n)).variance() - exact) / exact;
        if (prev > 0.0) REQUIRE(err <= 0.26 * prev);
        prev = err;
    }
}

TEST_CASE("log-psd mean recovers the innovation variance (Szego identity)") {
    FrequencyGrid g(4096);
    for (double xi : {1.0, 2.5}) {
        auto spec = psd_from_ar(ArModel{{0.9}, xi}, g);
        std::vector<double> logs(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) logs[i] = std::log(spec.psd()[i]);
        REQUIRE(quad_mean(logs) == Catch::Approx(std::log(xi)).margin(1e-6));
    }
    auto ar2 = psd_from_ar(ArModel{{1.0, -0.09}, 1.0}, g);
    std::vector<double> logs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) logs[i] = std::log(ar2.psd()[i]);
    REQUIRE(quad_mean(logs) == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("Paley-Wiener admissibility verdicts") {
    FrequencyGrid g(128);
    std::vector<double> flat(g.size(), 1.0);
    REQUIRE(check_paley_wiener(flat).admissible);

    auto with_zero = flat;
    with_zero[0] = 0.0;  // bin 0 is its own mirror, so the table stays symmetric
    auto rep = check_paley_wiener(with_zero, 0.0);
    REQUIRE_FALSE(rep.admissible);
    REQUIRE(rep.zero_bins == std::vector<std::size_t>{0});

    auto ar1 = psd_from_ar(ArModel{{0.9}, 1.0}, g);
    REQUIRE(check_paley_wiener(ar1.psd()).admissible);
}

TEST_CASE("tabulated psd validation") {
    FrequencyGrid g(8);
    std::vector<double> ok{1.0, 2.0, 3.0, 4.0, 5.0, 4.0, 3.0, 2.0};
    REQUIRE_NOTHROW(SpectralModel(g, ok));

    auto asym = ok;
    asym[1] += 1e-3;
    REQUIRE_THROWS_AS(SpectralModel(g, asym), std::invalid_argument);

    auto neg = ok;
    neg[4] = -0.1;
    REQUIRE_THROWS_AS(SpectralModel(g, neg), std::invalid_argument);
}

TEST_CASE("psd table csv round-trips") {
    FrequencyGrid g(256);
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, g);
    const std::string path = "psd_roundtrip_test.csv";
    {
        std::ofstream out(path);
        save_psd_csv(spec, out);
    }
    auto loaded = load_psd_csv(path);
    REQUIRE(loaded.grid().size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        REQUIRE(loaded.psd()[i] == Catch::Approx(spec.psd()[i]).epsilon(1e-12));
    std::remove(path.c_str());
}
