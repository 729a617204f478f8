#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "crdf/realization.hpp"
#include "crdf/spectrum.hpp"

namespace crdf {

/// Counter-based deterministic random stream: output k is a bit-mix of
/// (stream seed + k * gamma), so one 64-bit seed plus a domain label fully
/// determines every draw.  Gaussian variates come from Box-Muller on explicit
/// 53-bit uniforms; no library distributions are involved, so replays are
/// byte-identical.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string_view label) {
        std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the label
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        state_ = mix(seed ^ mix(h));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(ang);
        have_spare_ = true;
        return r * std::cos(ang);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum class ChannelVariant { awgn, sdusq };

struct SimConfig {
    std::size_t n_samples = std::size_t{1} << 17;
    std::uint64_t seed = 0;
    ChannelVariant variant = ChannelVariant::sdusq;
    std::size_t burn_in = 4096;
};

struct SimReport {
    double empirical_mse = 0.0;
    double predicted_mse = 0.0;            // closed-loop LTI prediction from the filters
    double noise_uniformity_stat = 0.0;    // KS statistic of n' vs Uniform(-delta/2, delta/2)
    double noise_whiteness = 0.0;          // max |autocorrelation| over lags 1..50
    double noise_variance = 0.0;
    double entropy_rate_bits = 0.0;        // estimated H(q | dither), bits/sample
    double rate_bound_bits = 0.0;          // (1/2) log2 K + (1/2) log2(2 pi e / 12)
    std::size_t samples_used = 0;
    ChannelVariant variant = ChannelVariant::sdusq;
};

/// Kolmogorov-Smirnov statistic against Uniform(-half_width, half_width).
inline double ks_statistic_uniform(std::vector<double> samples, double half_width) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic_uniform: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf =
            std::clamp((samples[i] + half_width) / (2.0 * half_width), 0.0, 1.0);
        worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - cdf));
        worst = std::max(worst, std::abs(cdf - static_cast<double>(i) / n));
    }
    return worst;
}

/// Largest normalized autocorrelation magnitude over lags 1..max_lag.
inline double max_autocorrelation(std::span<const double> samples, std::size_t max_lag = 50) {
    if (samples.size() < max_lag + 2)
        throw std::invalid_argument("max_autocorrelation: sample too short");
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    if (var == 0.0) throw std::invalid_argument("max_autocorrelation: degenerate sample");
    double worst = 0.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t k = lag; k < samples.size(); ++k)
            acc += (samples[k] - mean) * (samples[k - lag] - mean);
        worst = std::max(worst, std::abs(acc / var));
    }
    return worst;
}

/// Vasicek m-spacing estimate of differential entropy, nats, m = floor(sqrt(n)).
inline double vasicek_entropy_nats(std::vector<double> samples) {
    const std::size_t n = samples.size();
    if (n < (std::size_t{1} << 14))
        throw std::invalid_argument("vasicek_entropy_nats: need at least 2^14 samples");
    std::sort(samples.begin(), samples.end());
    if (samples.front() == samples.back())
        throw std::invalid_argument("vasicek_entropy_nats: degenerate (zero-variance) sample");
    const std::size_t m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t hi = std::min(i + m, n - 1);
        const std::size_t lo = i >= m ? i - m : 0;
        const double spacing = samples[hi] - samples[lo];
        acc += std::log(std::max(spacing, 1e-300) * static_cast<double>(n) /
                        (2.0 * static_cast<double>(m)));
    }
    return acc / static_cast<double>(n);
}

/// Conditional entropy of the quantizer output given the dither, bits/sample:
/// H(q | nu) = h(w') - log2(delta), with h(w') estimated by m-spacings.
inline double estimate_entropy_rate(std::vector<double> w_prime_samples, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("estimate_entropy_rate: delta must be > 0");
    const double h_bits = vasicek_entropy_nats(std::move(w_prime_samples)) / std::numbers::ln2;
    return h_bits - std::log2(delta);
}

/// Run the feedback coder in the time domain.
///
/// The source is generated by the AR recursion; the pre-filtered signal enters
/// a noise-shaping loop whose feedback path filters the channel noise through
/// F = 1 - (1-F); the channel adds white Gaussian noise (awgn) or passes
/// through a subtractively dithered uniform quantizer (sdusq); the decoder
/// post-filters with B and the denoiser W.  Deterministic given cfg.seed.
inline SimReport simulate(const ArModel& source, const FilterSet& filters, const SimConfig& cfg,
                          std::ostream* trace = nullptr) {
    validate_ar_model(source);
    if (cfg.n_samples < (std::size_t{1} << 14))
        throw std::invalid_argument("simulate: n_samples must be at least 2^14");
    const std::size_t total_taps = filters.a_taps.size() + filters.b_taps.size() +
                                   filters.w_taps.size() + filters.one_minus_f_taps.size();
    if (cfg.burn_in < 10 * total_taps)
        throw std::invalid_argument("simulate: burn_in must cover 10x the total filter length");
    if (cfg.burn_in >= cfg.n_samples ||
        cfg.n_samples - cfg.burn_in < (std::size_t{1} << 14))
        throw std::invalid_argument("simulate: need at least 2^14 samples after burn-in");

    const std::size_t n = cfg.n_samples;
    const std::size_t p = source.coeffs.size();
    RandomStream src_rng(cfg.seed, "source");
    RandomStream chan_rng(cfg.seed, "channel");
    RandomStream dith_rng(cfg.seed, "dither");

    const double xi_sd = std::sqrt(source.innovation_variance);
    const double sigma_n = std::sqrt(filters.sigma_n_sq);
    const double delta = filters.delta > 0.0 ? filters.delta : std::sqrt(12.0 * filters.sigma_n_sq);

    std::vector<double> x(n), v(n), w(n), y(n), nprime(n);
    std::vector<double> filtered_b(n);

    // source variance for the instability guard
    FrequencyGrid guard_grid(256);
    const double source_var = psd_from_ar(source, guard_grid).variance();
    const double blowup = 1e6 * source_var;

    auto fir_at = [](const std::vector<double>& taps, const std::vector<double>& signal,
                     std::size_t k) {
        double acc = 0.0;
        const std::size_t len = std::min(taps.size(), k + 1);
        for (std::size_t i = 0; i < len; ++i) acc += taps[i] * signal[k - i];
        return acc;
    };

    for (std::size_t k = 0; k < n; ++k) {
        double xk = src_rng.gaussian() * xi_sd;
        for (std::size_t m = 0; m < p && m < k; ++m) xk += source.coeffs[m] * x[k - 1 - m];
        x[k] = xk;

        const double pre = fir_at(filters.a_taps, x, k);
        double feedback = 0.0;
        for (std::size_t i = 1; i < filters.one_minus_f_taps.size() && i <= k; ++i)
            feedback += filters.one_minus_f_taps[i] * nprime[k - i];
        v[k] = pre + feedback;
        if (v[k] * v[k] > blowup)
            throw std::runtime_error("simulate: loop signal power exceeds 1e6 * sigma_x^2; "
                                     "filter set is unstable");

        if (cfg.variant == ChannelVariant::awgn) {
            nprime[k] = chan_rng.gaussian() * sigma_n;
            w[k] = v[k] + nprime[k];
        } else {
            const double nu = dith_rng.uniform(-0.5 * delta, 0.5 * delta);
            const double q = delta * std::nearbyint((v[k] + nu) / delta);
            w[k] = q - nu;
            nprime[k] = w[k] - v[k];
        }
        filtered_b[k] = fir_at(filters.b_taps, w, k);
        y[k] = fir_at(filters.w_taps, filtered_b, k);
        if (trace) {
            char line[160];
            std::snprintf(line, sizeof line, "%zu,%.10g,%.10g,%.10g,%.10g,%.10g\n", k, x[k], v[k],
                          w[k], y[k], nprime[k]);
            *trace << line;
        }
    }

    const std::size_t kept = n - cfg.burn_in;
    SimReport rep;
    rep.variant = cfg.variant;
    rep.samples_used = kept;
    double mse = 0.0;
    for (std::size_t k = cfg.burn_in; k < n; ++k)
        mse += (y[k] - x[k]) * (y[k] - x[k]);
    rep.empirical_mse = mse / static_cast<double>(kept);

    std::vector<double> noise_tail(nprime.begin() + static_cast<std::ptrdiff_t>(cfg.burn_in),
                                   nprime.end());
    double nvar = 0.0;
    for (double nv : noise_tail) nvar += nv * nv;
    rep.noise_variance = nvar / static_cast<double>(kept);
    rep.noise_whiteness = max_autocorrelation(noise_tail, 50);
    rep.noise_uniformity_stat =
        cfg.variant == ChannelVariant::sdusq
            ? ks_statistic_uniform(noise_tail, 0.5 * delta)
            : std::numeric_limits<double>::quiet_NaN();

    if (cfg.variant == ChannelVariant::sdusq) {
        std::vector<double> w_tail(w.begin() + static_cast<std::ptrdiff_t>(cfg.burn_in), w.end());
        rep.entropy_rate_bits = estimate_entropy_rate(std::move(w_tail), delta);
    } else {
        rep.entropy_rate_bits = std::numeric_limits<double>::quiet_NaN();
    }
    const double snr_k = 1.0 / filters.sigma_n_sq;
    rep.rate_bound_bits = 0.5 * std::log2(snr_k) +
                          0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e / 12.0);

    FrequencyGrid pred_grid(4096);
    rep.predicted_mse = closed_loop_mse(psd_from_ar(source, pred_grid), filters);
    return rep;
}

}  // namespace crdf
