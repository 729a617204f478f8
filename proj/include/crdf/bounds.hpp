#pragma once

#include <cmath>
#include <stdexcept>

#include "crdf/classic_rdf.hpp"

namespace crdf {

/// Closed-form upper bounds B1 <= B2 < B3 on the additive rate loss of causal
/// coding, as gaps above Shannon's RDF, all in nats/sample.
struct BoundReport {
    double distortion = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double epsilon = 0.0;     // the epsilon used inside b3
    double r_shannon = 0.0;   // reference rate R(D), nats/sample
};

/// Tightest closed-form bound: the source-uncorrelated RDF evaluated at the
/// pre-gain distortion sigma^2 D / (sigma^2 - D), minus R(D).
inline double bound_b1(const SpectralModel& spec, double D) {
    const double var = spec.variance();
    if (!(D > 0.0) || !(D < var))
        throw std::invalid_argument("bound_b1: distortion must lie in (0, sigma_x^2)");
    const double pre_gain = var * D / (var - D);
    return detail::r_perp_any(spec, pre_gain).rate - shannon_rdf(spec, D).rate;
}

/// AWGN-channel relaxation of b1; cheaper, slightly looser.
inline double bound_b2(const SpectralModel& spec, double D) {
    const double var = spec.variance();
    if (!(D > 0.0) || !(D < var))
        throw std::invalid_argument("bound_b2: distortion must lie in (0, sigma_x^2)");
    double acc = 0.0;
    for (double s : spec.psd()) acc += 0.5 * std::log1p((1.0 - D / var) * s / D);
    acc /= static_cast<double>(spec.psd().size());
    return acc - shannon_rdf(spec, D).rate;
}

/// Harmonic-mean-type integral used by bound_b3; diverges if epsilon = 0 and
/// the PSD touches zero.
inline double clipped_inverse_psd_mean(const SpectralModel& spec, double epsilon) {
    double acc = 0.0;
    for (double s : spec.psd()) acc += 1.0 / std::max(epsilon, s);
    return acc / static_cast<double>(spec.psd().size());
}

/// Coarsest bound: min of three closed-form branches, independent of R(D).
/// Never exceeds (1/2) ln 2 nats (= 0.5 bits).
inline double bound_b3(const SpectralModel& spec, double D, double epsilon) {
    const double var = spec.variance();
    if (!(D > 0.0) || D > var)
        throw std::invalid_argument("bound_b3: distortion must lie in (0, sigma_x^2]");
    if (epsilon < 0.0 || epsilon > D)
        throw std::invalid_argument("bound_b3: epsilon must lie in [0, D]");
    const double varsigma = clipped_inverse_psd_mean(spec, epsilon);
    if (!std::isfinite(varsigma))
        throw std::runtime_error(
            "bound_b3: 1/max(epsilon, psd) diverges; raise epsilon above the psd zeros");
    const double branch1 =
        0.5 * std::log((1.0 + epsilon / D) * (1.0 + (varsigma - 1.0 / var) * D));
    const double branch2 = 0.5 * std::log(2.0);
    const double branch3 = 0.5 * std::log(var / D);
    return std::min({branch1, branch2, branch3});
}

/// Default epsilon for bound_b3.  For PSDs bounded away from zero the clipped
/// inverse mean is already finite at epsilon = 0, and since the clipping is
/// inactive for any epsilon <= min(psd) while the (1 + epsilon/D) factor only
/// grows, epsilon = 0 dominates.  PSDs touching zero fall back to 1e-3 * D.
inline double default_b3_epsilon(const SpectralModel& spec, double D) {
    if (spec.min_psd() > 0.0) return 0.0;
    return 1e-3 * D;
}

inline BoundReport bound_report(const SpectralModel& spec, double D) {
    BoundReport rep;
    rep.distortion = D;
    rep.epsilon = default_b3_epsilon(spec, D);
    rep.r_shannon = shannon_rdf(spec, D).rate;
    rep.b1 = bound_b1(spec, D);
    rep.b2 = bound_b2(spec, D);
    rep.b3 = bound_b3(spec, D, rep.epsilon);
    return rep;
}

}  // namespace crdf
