#pragma once

// Test-only oracles.  Each one is an independent implementation (own grid, own
// solver) of a quantity the library computes some other way, so agreement is
// evidence rather than tautology.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline std::vector<double> ar_psd(const std::vector<double>& coeffs, double xi_var,
                                  std::size_t n) {
    std::vector<double> psd(n);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = -pi + 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        std::complex<double> den{1.0, 0.0};
        for (std::size_t m = 0; m < coeffs.size(); ++m)
            den -= coeffs[m] * std::polar(1.0, -w * static_cast<double>(m + 1));
        psd[i] = xi_var / std::norm(den);
    }
    return psd;
}

inline double grid_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

/// Reverse water-filling rate by direct bisection on the water level.
inline double shannon_rate(const std::vector<double>& psd, double D) {
    double sx2 = grid_mean(psd);
    if (D >= sx2) return 0.0;
    double lo = 0.0, hi = 0.0;
    for (double s : psd) hi = std::max(hi, s);
    for (int it = 0; it < 300; ++it) {
        const double th = 0.5 * (lo + hi);
        double dist = 0.0;
        for (double s : psd) dist += std::min(th, s);
        dist /= static_cast<double>(psd.size());
        (dist < D ? lo : hi) = th;
    }
    const double th = 0.5 * (lo + hi);
    double rate = 0.0;
    for (double s : psd)
        if (s > th) rate += 0.5 * std::log(s / th);
    return rate / static_cast<double>(psd.size());
}

inline double awgn_rate(const std::vector<double>& psd, double d) {
    double acc = 0.0;
    for (double s : psd) acc += 0.5 * std::log1p(s / d);
    return acc / static_cast<double>(psd.size());
}

/// Source-uncorrelated RDF by geometric bisection on the curve parameter.
inline double rperp_rate(const std::vector<double>& psd, double D) {
    const double sx2 = grid_mean(psd);
    double lo = 1e-18 * sx2, hi = 1e15 * sx2;
    auto dist_of = [&](double alpha) {
        double acc = 0.0;
        for (double s : psd) acc += 0.5 * (std::sqrt(s + alpha) - std::sqrt(s)) * std::sqrt(s);
        return acc / static_cast<double>(psd.size());
    };
    for (int it = 0; it < 300; ++it) {
        const double mid = std::sqrt(lo * hi);
        (dist_of(mid) < D ? lo : hi) = mid;
    }
    const double alpha = std::sqrt(lo * hi);
    double rate = 0.0;
    for (double s : psd)
        rate += std::log((std::sqrt(s + alpha) + std::sqrt(s)) / std::sqrt(alpha));
    return rate / static_cast<double>(psd.size());
}

inline double yule_walker_ar1_variance(double a, double xi_var) {
    return xi_var / (1.0 - a * a);
}

inline double yule_walker_ar2_variance(double a1, double a2, double xi_var) {
    return xi_var * (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2) * (1.0 - a2) - a1 * a1));
}

inline double log_det_spd(const Eigen::MatrixXd& M) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("oracle::log_det_spd: matrix not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

/// Mutual information I(x; y) in nats of jointly Gaussian vectors from the
/// covariance blocks: 0.5 (ln det K_x + ln det K_y - ln det K_joint).
inline double gaussian_mi_nats(const Eigen::MatrixXd& K_x, const Eigen::MatrixXd& K_y,
                               const Eigen::MatrixXd& K_yx) {
    const Eigen::Index n = K_x.rows();
    Eigen::MatrixXd joint(2 * n, 2 * n);
    joint.topLeftCorner(n, n) = K_x;
    joint.topRightCorner(n, n) = K_yx.transpose();
    joint.bottomLeftCorner(n, n) = K_yx;
    joint.bottomRightCorner(n, n) = K_y;
    return 0.5 * (log_det_spd(K_x) + log_det_spd(K_y) - log_det_spd(joint));
}

}  // namespace oracle
