#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "crdf/realization.hpp"
#include "crdf/serialize.hpp"

using namespace crdf;

namespace {

DesignOutcome ar1_design(double rate_bits, std::size_t order = 8, std::size_t iters = 4,
                         std::size_t n = 4096) {
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, FrequencyGrid(n));
    return design_filters(spec, rate_bits * std::numbers::ln2, order, iters);
}

}  // namespace

TEST_CASE("filter magnitudes satisfy the unit channel-spectrum identity") {
    FrequencyGrid g(1024);
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, g);
    auto out = design_filters(spec, 0.2601 * std::numbers::ln2, 8, 3);
    auto mags = filter_magnitudes(spec, out.state);
    REQUIRE(mags.sigma_n_sq == Catch::Approx(1.0 / out.state.snr_k));
    for (std::size_t i = 0; i < g.size(); ++i) {
        REQUIRE(mags.a_mag_sq[i] * spec.psd()[i] + mags.f_mag_sq[i] * mags.sigma_n_sq ==
                Catch::Approx(1.0).margin(1e-10));
        REQUIRE(mags.a_mag_sq[i] * mags.b_mag_sq[i] == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("white source magnitudes are flat") {
    FrequencyGrid g(512);
    auto white = psd_from_ar(ArModel{{}, 1.0}, g);
    DesignState st;
    st.grid = g;
    st.snr_k = 4.0;
    st.shaping.assign(g.size(), 1.0);
    st.w_taps = {0.75};
    auto mags = filter_magnitudes(white, st);
    for (double a2 : mags.a_mag_sq) REQUIRE(a2 == Catch::Approx((1.0 - 0.25) / 1.0));
}

TEST_CASE("pointwise shaping above the noise budget is rejected") {
    FrequencyGrid g(4);
    std::vector<double> psd(4, 1.0);
    SpectralModel spec(g, psd);
    DesignState st;
    st.grid = g;
    st.snr_k = 5.0;
    const double y = std::pow(3.0, -1.0 / 3.0);
    st.shaping = {3.0, y, y, y};  // log-mean zero, mean square < K, peak above K
    st.w_taps = {1.0};
    REQUIRE_THROWS_WITH(filter_magnitudes(spec, st),
                        Catch::Matchers::ContainsSubstring("noise budget"));
}

TEST_CASE("minimum-phase construction on known factors") {
    FrequencyGrid g(512);
    std::vector<double> flat(g.size(), 2.5);
    auto taps = minimum_phase_fir(flat, 8);
    REQUIRE(taps[0] == Catch::Approx(2.5).epsilon(1e-9));
    for (std::size_t k = 1; k < taps.size(); ++k) REQUIRE(std::abs(taps[k]) < 1e-9);

    std::vector<double> mag(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        mag[i] = std::abs(1.0 - 0.5 * std::polar(1.0, -g.omega(i)));
    taps = minimum_phase_fir(mag, 8);
    REQUIRE(taps[0] == Catch::Approx(1.0).epsilon(1e-9));
    REQUIRE(taps[1] == Catch::Approx(-0.5).epsilon(1e-8));
    for (std::size_t k = 2; k < taps.size(); ++k) REQUIRE(std::abs(taps[k]) < 1e-8);
}

TEST_CASE("log-mean-zero magnitudes produce a unit leading tap") {
    FrequencyGrid g(512);
    std::vector<double> mag(g.size());
    double log_acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mag[i] = std::exp(0.4 * std::cos(g.omega(i)) - 0.1 * std::cos(2.0 * g.omega(i)));
        log_acc += std::log(mag[i]);
    }
    REQUIRE(std::abs(log_acc) < 1e-9);  // construction is log-mean-zero
    auto taps = minimum_phase_fir(mag, 32);
    REQUIRE(taps[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("magnitudes with zeros are rejected with bin diagnostics") {
    FrequencyGrid g(64);
    std::vector<double> mag(g.size(), 1.0);
    mag[0] = 0.0;
    REQUIRE_THROWS_WITH(minimum_phase_fir(mag, 8),
                        Catch::Matchers::ContainsSubstring("log-integrability"));
}

TEST_CASE("realized magnitude tracks the target for smooth spectra") {
    FrequencyGrid g(512);
    auto spec = psd_from_ar(ArModel{{0.8}, 1.0}, g);
    std::vector<double> mag(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) mag[i] = std::sqrt(spec.psd()[i]);
    auto taps = minimum_phase_fir(mag, 64);
    auto resp = fir_response(taps, g);
    for (std::size_t i = 0; i < g.size(); ++i)
        REQUIRE(std::abs(resp[i]) == Catch::Approx(mag[i]).epsilon(1e-3));
}

TEST_CASE("white-source filter set degenerates to scalar gains with no feedback") {
    FrequencyGrid g(512);
    auto white = psd_from_ar(ArModel{{}, 1.0}, g);
    auto out = design_filters(white, 0.5, 2, 3);
    auto fs = build_filter_set(white, out, 16);
    for (std::size_t k = 1; k < fs.a_taps.size(); ++k) {
        REQUIRE(std::abs(fs.a_taps[k]) < 1e-9);
        REQUIRE(std::abs(fs.b_taps[k]) < 1e-9);
        REQUIRE(std::abs(fs.one_minus_f_taps[k]) < 1e-9);  // F vanishes
    }
    REQUIRE(fs.a_taps[0] * fs.b_taps[0] == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ar1 filter set passes its invariants at 64 taps") {
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, FrequencyGrid(4096));
    auto out = ar1_design(0.2601);
    auto fs = build_filter_set(spec, out, 64);

    REQUIRE(fs.one_minus_f_taps[0] == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(fs.sigma_n_sq == Catch::Approx(1.0 / out.state.snr_k));
    REQUIRE(fs.delta == Catch::Approx(std::sqrt(12.0 * fs.sigma_n_sq)));

    const auto a = fir_response(fs.a_taps, spec.grid());
    const auto b = fir_response(fs.b_taps, spec.grid());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] * b[i] - 1.0));
    REQUIRE(worst < 1e-3);

    for (const auto* taps : {&fs.a_taps, &fs.b_taps, &fs.one_minus_f_taps})
        REQUIRE(max_zero_magnitude(*taps) < 1.0 + 1e-6);
}

TEST_CASE("noise spectrum integrates to the design's source-independent power") {
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, FrequencyGrid(4096));
    auto out = ar1_design(0.2601);
    auto mags = filter_magnitudes(spec, out.state);
    const auto w = fir_response(out.state.w_taps, spec.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.grid().size(); ++i)
        acc += std::norm(w[i]) * mags.b_mag_sq[i] * mags.f_mag_sq[i] * mags.sigma_n_sq;
    acc /= static_cast<double>(spec.grid().size());
    REQUIRE(acc == Catch::Approx(out.sigma_u_sq).epsilon(1e-6));
}

TEST_CASE("closed-loop analysis of the realized filters reproduces the design mse") {
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, FrequencyGrid(4096));
    auto out = ar1_design(0.2601);
    auto fs = build_filter_set(spec, out, 64);
    REQUIRE(closed_loop_mse(spec, fs) ==
            Catch::Approx(out.distortion_trace.back()).epsilon(0.02));
}

TEST_CASE("high-rate filters approach the inverse-spectrum asymptotics") {
    auto spec = psd_from_ar(ArModel{{0.9}, 1.0}, FrequencyGrid(4096));
    auto out = ar1_design(8.0);
    auto mags = filter_magnitudes(spec, out.state);

    std::vector<double> logs(spec.grid().size());
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(spec.psd()[i]);
    const double gm = std::exp(quad_mean(logs));  // geometric mean of the psd
    for (std::size_t i = 0; i < logs.size(); ++i) {
        REQUIRE(mags.a_mag_sq[i] * spec.psd()[i] == Catch::Approx(1.0).margin(0.02));
        REQUIRE(mags.f_mag_sq[i] == Catch::Approx(gm / spec.psd()[i]).epsilon(0.05));
    }
}

TEST_CASE("filter set json round-trips") {
    auto spec = psd_from_ar(ArModel{{0.5}, 1.0}, FrequencyGrid(1024));
    auto out = design_filters(spec, 0.3, 4, 3);
    auto fs = build_filter_set(spec, out, 32);
    auto back = filter_set_from_json(to_json(fs));
    REQUIRE(back.a_taps == fs.a_taps);
    REQUIRE(back.b_taps == fs.b_taps);
    REQUIRE(back.one_minus_f_taps == fs.one_minus_f_taps);
    REQUIRE(back.w_taps == fs.w_taps);
    REQUIRE(back.sigma_n_sq == fs.sigma_n_sq);
}
