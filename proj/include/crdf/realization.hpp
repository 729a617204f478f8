#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "crdf/design.hpp"
#include "crdf/spectrum.hpp"

namespace crdf {

/// Squared frequency-response magnitudes realizing a design, under the
/// normalizations S_w = 1 (unit channel-input spectrum) and A B = 1 (perfect
/// reconstruction).  They satisfy |A|^2 S_x + f^2 sigma_n^2 = 1 pointwise.
struct MagnitudeSet {
    std::vector<double> a_mag_sq;
    std::vector<double> b_mag_sq;
    std::vector<double> f_mag_sq;   // |1 - F|^2
    double sigma_n_sq = 0.0;
};

inline MagnitudeSet filter_magnitudes(const SpectralModel& spec, const DesignState& state) {
    validate_design_state(state);
    if (!(spec.grid() == state.grid))
        throw std::invalid_argument("filter_magnitudes: spectrum and state grids differ");
    MagnitudeSet out;
    const std::size_t n = state.grid.size();
    out.sigma_n_sq = 1.0 / state.snr_k;
    out.a_mag_sq.resize(n);
    out.b_mag_sq.resize(n);
    out.f_mag_sq.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = state.shaping[i];
        if (!(f * f < state.snr_k))
            throw std::runtime_error(
                "filter_magnitudes: shaping magnitude reaches the noise budget at bin " +
                std::to_string(i) + "; refine the design grid");
        if (!(spec.psd()[i] > 0.0))
            throw std::runtime_error("filter_magnitudes: psd vanishes at bin " +
                                     std::to_string(i));
        out.f_mag_sq[i] = f * f;
        out.a_mag_sq[i] = (1.0 - f * f / state.snr_k) / spec.psd()[i];
        out.b_mag_sq[i] = 1.0 / out.a_mag_sq[i];
    }
    return out;
}

/// Minimum-phase FIR realization of a sampled magnitude response via the real
/// cepstrum: fold the even cepstrum of ln|magnitude| onto causal quefrencies,
/// exponentiate, and truncate the impulse response.  The cepstral transform
/// runs at oversample * n to keep wrap-around error below truncation error.
inline std::vector<double> minimum_phase_fir(std::span<const double> magnitude,
                                             std::size_t n_taps, std::size_t oversample = 8) {
    const std::size_t n = magnitude.size();
    if (n == 0 || n % 2 != 0)
        throw std::invalid_argument("minimum_phase_fir: need an even, nonempty sample count");
    if (n_taps == 0) throw std::invalid_argument("minimum_phase_fir: need at least one tap");
    if (oversample == 0) oversample = 1;

    std::vector<double> mag_sq(n);
    for (std::size_t i = 0; i < n; ++i) mag_sq[i] = magnitude[i] * magnitude[i];
    const auto pw = check_paley_wiener(mag_sq, 0.0);
    if (!pw.admissible) {
        std::string bins;
        for (std::size_t i = 0; i < std::min<std::size_t>(pw.zero_bins.size(), 8); ++i)
            bins += (i ? ", " : "") + std::to_string(pw.zero_bins[i]);
        throw std::runtime_error(
            "minimum_phase_fir: magnitude fails the log-integrability condition at bins [" +
            bins + "]");
    }

    Eigen::FFT<double> fft;
    // reorder from [-pi, pi) storage to FFT bin order omega = 2 pi k / n
    std::vector<std::complex<double>> logm(n);
    for (std::size_t j = 0; j < n; ++j)
        logm[j] = std::log(magnitude[(j + n / 2) % n]);
    std::vector<std::complex<double>> cep(n);
    fft.inv(cep, logm);

    const std::size_t big = oversample * n;
    std::vector<std::complex<double>> folded(big, {0.0, 0.0});
    folded[0] = cep[0].real();
    for (std::size_t k = 1; k < n / 2; ++k) folded[k] = 2.0 * cep[k].real();
    folded[n / 2] = cep[n / 2].real();  // Nyquist quefrency, counted once

    std::vector<std::complex<double>> log_h(big);
    fft.fwd(log_h, folded);
    for (auto& z : log_h) z = std::exp(z);
    std::vector<std::complex<double>> impulse(big);
    fft.inv(impulse, log_h);

    std::vector<double> taps(std::min(n_taps, big));
    for (std::size_t k = 0; k < taps.size(); ++k) taps[k] = impulse[k].real();
    taps.resize(n_taps, 0.0);
    return taps;
}

/// Largest zero magnitude of H(z) = sum_k taps[k] z^{-k}; minimum phase means
/// this stays inside the unit circle.
inline double max_zero_magnitude(std::span<const double> taps) {
    double peak = 0.0;
    for (double t : taps) peak = std::max(peak, std::abs(t));
    if (peak == 0.0) return 0.0;
    std::size_t degree = taps.size();
    while (degree > 1 && std::abs(taps[degree - 1]) < 1e-14 * peak) --degree;
    if (degree <= 1) return 0.0;
    Eigen::MatrixXd companion =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree - 1),
                              static_cast<Eigen::Index>(degree - 1));
    for (std::size_t k = 1; k < degree; ++k)
        companion(0, static_cast<Eigen::Index>(k - 1)) = -taps[k] / taps[0];
    for (std::size_t k = 1; k + 1 < degree; ++k)
        companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        worst = std::max(worst, std::abs(es.eigenvalues()(i)));
    return worst;
}

/// Realized causal filters around the channel: pre-filter A, post-filter B,
/// noise-shaping loop response 1-F, denoiser W, channel noise variance, and
/// the quantizer step for the dithered variant.
struct FilterSet {
    std::vector<double> a_taps;
    std::vector<double> b_taps;
    std::vector<double> one_minus_f_taps;
    std::vector<double> w_taps;
    double sigma_n_sq = 0.0;
    double delta = 0.0;   // quantizer step sqrt(12 sigma_n_sq)
};

inline void validate_filter_set(const SpectralModel& spec, const FilterSet& fs) {
    if (fs.one_minus_f_taps.empty() || std::abs(fs.one_minus_f_taps[0] - 1.0) > 1e-6)
        throw std::runtime_error(
            "FilterSet: leading tap of 1-F must be 1 (the feedback filter is strictly causal)");
    const auto a = fir_response(fs.a_taps, spec.grid());
    const auto b = fir_response(fs.b_taps, spec.grid());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] * b[i] - 1.0));
    if (worst >= 1e-3)
        throw std::runtime_error("FilterSet: A*B deviates from unity by " + std::to_string(worst) +
                                 "; increase the tap count");
    for (const auto* taps : {&fs.a_taps, &fs.b_taps, &fs.one_minus_f_taps})
        if (max_zero_magnitude(*taps) > 1.0 + 1e-6)
            throw std::runtime_error("FilterSet: realized filter has a zero outside the unit circle");
    if (!(fs.sigma_n_sq > 0.0)) throw std::runtime_error("FilterSet: noise variance must be positive");
}

inline FilterSet build_filter_set(const SpectralModel& spec, const DesignOutcome& outcome,
                                  std::size_t taps = 64, std::size_t oversample = 8) {
    const auto mags = filter_magnitudes(spec, outcome.state);
    const std::size_t n = spec.grid().size();
    std::vector<double> a_mag(n), b_mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        a_mag[i] = std::sqrt(mags.a_mag_sq[i]);
        b_mag[i] = std::sqrt(mags.b_mag_sq[i]);
    }
    FilterSet fs;
    fs.a_taps = minimum_phase_fir(a_mag, taps, oversample);
    fs.b_taps = minimum_phase_fir(b_mag, taps, oversample);
    fs.one_minus_f_taps = minimum_phase_fir(outcome.state.shaping, taps, oversample);
    fs.w_taps = outcome.state.w_taps;
    fs.sigma_n_sq = mags.sigma_n_sq;
    fs.delta = std::sqrt(12.0 * fs.sigma_n_sq);
    validate_filter_set(spec, fs);
    return fs;
}

/// Closed-loop MSE predicted by LTI analysis of the realized filters with
/// white channel noise of variance sigma_n_sq.
inline double closed_loop_mse(const SpectralModel& spec, const FilterSet& fs) {
    const auto a = fir_response(fs.a_taps, spec.grid());
    const auto b = fir_response(fs.b_taps, spec.grid());
    const auto w = fir_response(fs.w_taps, spec.grid());
    const auto omf = fir_response(fs.one_minus_f_taps, spec.grid());
    double lin = 0.0, noise = 0.0;
    const std::size_t n = spec.grid().size();
    for (std::size_t i = 0; i < n; ++i) {
        lin += std::norm(w[i] * a[i] * b[i] - 1.0) * spec.psd()[i];
        noise += std::norm(w[i] * b[i] * omf[i]);
    }
    return lin / static_cast<double>(n) + fs.sigma_n_sq * noise / static_cast<double>(n);
}

}  // namespace crdf
