#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crdf/spectrum.hpp"

namespace crdf {

/// A point on (or bounding) a rate-distortion curve.  Rates are nats/sample
/// throughout the library; conversion to bits happens at presentation only.
/// aux carries the solver parameter that produced the point (water level theta
/// for the Shannon curve, alpha for the source-uncorrelated curve, the noise
/// variance d for the AWGN curve).
struct RdPoint {
    double rate = 0.0;
    double distortion = 0.0;
    double aux = 0.0;
};

namespace detail {

/// Distortion of the reverse water-filling solution at water level theta.
inline double waterfill_distortion(const SpectralModel& spec, double theta) {
    double acc = 0.0;
    for (double s : spec.psd()) acc += std::min(theta, s);
    return acc / static_cast<double>(spec.psd().size());
}

inline double waterfill_rate(const SpectralModel& spec, double theta) {
    double acc = 0.0;
    for (double s : spec.psd())
        if (s > theta) acc += 0.5 * std::log(s / theta);
    return acc / static_cast<double>(spec.psd().size());
}

/// Parametric distortion of the source-uncorrelated curve at parameter alpha.
inline double uncorrelated_distortion(const SpectralModel& spec, double alpha) {
    double acc = 0.0;
    for (double s : spec.psd())
        acc += 0.5 * (std::sqrt(s + alpha) - std::sqrt(s)) * std::sqrt(s);
    return acc / static_cast<double>(spec.psd().size());
}

inline double uncorrelated_rate(const SpectralModel& spec, double alpha) {
    double acc = 0.0;
    for (double s : spec.psd())
        acc += std::log((std::sqrt(s + alpha) + std::sqrt(s)) / std::sqrt(alpha));
    return acc / static_cast<double>(spec.psd().size());
}

/// Source-uncorrelated RDF for any distortion D > 0.  The curve extends past
/// sigma_x^2 because the error must stay uncorrelated with the source; the
/// rate tends to zero only as D -> infinity.
inline RdPoint r_perp_any(const SpectralModel& spec, double D) {
    if (!(D > 0.0)) throw std::invalid_argument("r_perp: distortion must be positive");
    const double var = spec.variance();
    double lo = 1e-15 * var;
    double hi = 1e12 * var;
    if (uncorrelated_distortion(spec, lo) > D) lo *= 1e-12;
    if (uncorrelated_distortion(spec, hi) < D) hi *= 1e12;
    double alpha = std::sqrt(lo * hi);
    for (int it = 0; it < 200; ++it) {
        alpha = std::sqrt(lo * hi);
        if (uncorrelated_distortion(spec, alpha) < D)
            lo = alpha;
        else
            hi = alpha;
    }
    alpha = std::sqrt(lo * hi);
    const double achieved = uncorrelated_distortion(spec, alpha);
    if (std::abs(achieved - D) > 1e-10 * D)
        throw std::runtime_error("r_perp: bisection failed to match the distortion target");
    return RdPoint{uncorrelated_rate(spec, alpha), D, alpha};
}

}  // namespace detail

/// Shannon's rate-distortion function by reverse water-filling.
/// For D >= sigma_x^2 the rate is exactly zero (water covers the spectrum);
/// the point is returned rather than rejected so sweeps can span the full axis.
inline RdPoint shannon_rdf(const SpectralModel& spec, double D) {
    if (!(D > 0.0)) throw std::invalid_argument("shannon_rdf: distortion must be positive");
    if (D >= spec.variance()) return RdPoint{0.0, D, spec.max_psd()};
    double lo = std::min(spec.min_psd() * 1e-12, D);
    double hi = spec.max_psd();
    double theta = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        theta = 0.5 * (lo + hi);
        if (detail::waterfill_distortion(spec, theta) < D)
            lo = theta;
        else
            hi = theta;
    }
    theta = 0.5 * (lo + hi);
    if (std::abs(detail::waterfill_distortion(spec, theta) - D) > 1e-10 * D)
        throw std::runtime_error("shannon_rdf: bisection failed to match the distortion target");
    return RdPoint{detail::waterfill_rate(spec, theta), D, theta};
}

/// Mutual information rate across a plain AWGN channel with noise variance d.
inline double awgn_rate(const SpectralModel& spec, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("awgn_rate: noise variance must be positive");
    double acc = 0.0;
    for (double s : spec.psd()) acc += 0.5 * std::log1p(s / d);
    return acc / static_cast<double>(spec.psd().size());
}

/// Quadratic Gaussian RDF for source-uncorrelated distortion.
inline RdPoint r_perp(const SpectralModel& spec, double D) {
    if (!(D > 0.0) || D >= spec.variance())
        throw std::invalid_argument("r_perp: distortion must lie in (0, sigma_x^2)");
    return detail::r_perp_any(spec, D);
}

}  // namespace crdf
