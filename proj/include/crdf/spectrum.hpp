#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "crdf/grid.hpp"

namespace crdf {

/// Autoregressive source model  x(k) = a_1 x(k-1) + ... + a_p x(k-p) + xi(k),
/// with xi(k) white Gaussian of variance innovation_variance.
struct ArModel {
    std::vector<double> coeffs;          // a_1 .. a_p
    double innovation_variance = 1.0;    // sigma_xi^2 > 0
};

/// Magnitudes of the roots of 1 - sum_m a_m z^{-m}; stationarity requires all < 1.
inline std::vector<double> ar_root_magnitudes(const ArModel& model) {
    const std::size_t p = model.coeffs.size();
    if (p == 0) return {};
    // Roots of z^p - a_1 z^{p-1} - ... - a_p via the companion matrix.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                      static_cast<Eigen::Index>(p));
    for (std::size_t m = 0; m < p; ++m)
        companion(0, static_cast<Eigen::Index>(m)) = model.coeffs[m];
    for (std::size_t m = 1; m < p; ++m)
        companion(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m - 1)) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    std::vector<double> mags(p);
    for (std::size_t m = 0; m < p; ++m)
        mags[m] = std::abs(es.eigenvalues()(static_cast<Eigen::Index>(m)));
    return mags;
}

inline void validate_ar_model(const ArModel& model) {
    if (!(model.innovation_variance > 0.0) || !std::isfinite(model.innovation_variance))
        throw std::invalid_argument("ArModel: innovation variance must be positive and finite");
    for (double a : model.coeffs)
        if (!std::isfinite(a))
            throw std::invalid_argument("ArModel: non-finite regression coefficient");
    const auto mags = ar_root_magnitudes(model);
    std::string offenders;
    for (double m : mags)
        if (m >= 1.0) offenders += (offenders.empty() ? "" : ", ") + std::to_string(m);
    if (!offenders.empty())
        throw std::invalid_argument(
            "ArModel: non-stationary, root magnitude(s) on/outside unit circle: " + offenders);
}

/// A stationary source spectrum sampled on a FrequencyGrid.
///
/// Holds the PSD S_x(e^{j omega}), its pointwise square root Omega_x, and the
/// source variance sigma_x^2 = quad_mean(psd).  Immutable after construction.
class SpectralModel {
public:
    static constexpr double kSymmetryTol = 1e-9;

    /// Build from a tabulated PSD.  Rejects negative or asymmetric tables.
    SpectralModel(FrequencyGrid grid, std::vector<double> psd)
        : grid_(std::move(grid)), psd_(std::move(psd)) {
        if (psd_.size() != grid_.size())
            throw std::invalid_argument("SpectralModel: psd size does not match grid");
        double scale = 0.0;
        for (double s : psd_) {
            if (!std::isfinite(s) || s < 0.0)
                throw std::invalid_argument("SpectralModel: psd must be finite and nonnegative");
            scale = std::max(scale, s);
        }
        for (std::size_t i = 0; i < psd_.size(); ++i) {
            const double dev = std::abs(psd_[i] - psd_[grid_.mirror(i)]);
            if (dev > kSymmetryTol * std::max(1.0, scale))
                throw std::invalid_argument("SpectralModel: psd not symmetric in omega (bin " +
                                            std::to_string(i) + ")");
        }
        omega_x_.resize(psd_.size());
        std::transform(psd_.begin(), psd_.end(), omega_x_.begin(),
                       [](double s) { return std::sqrt(s); });
        variance_ = quad_mean(psd_);
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& psd() const noexcept { return psd_; }
    const std::vector<double>& omega_x() const noexcept { return omega_x_; }
    double variance() const noexcept { return variance_; }
    double min_psd() const { return *std::min_element(psd_.begin(), psd_.end()); }
    double max_psd() const { return *std::max_element(psd_.begin(), psd_.end()); }

private:
    FrequencyGrid grid_;
    std::vector<double> psd_;
    std::vector<double> omega_x_;
    double variance_ = 0.0;
};

/// PSD of an AR model:  S_x(omega) = sigma_xi^2 / |1 - sum_m a_m e^{-j omega m}|^2.
inline SpectralModel psd_from_ar(const ArModel& model, const FrequencyGrid& grid) {
    validate_ar_model(model);
    std::vector<double> psd(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::complex<double> rot = std::polar(1.0, -grid.omega(i));
        std::complex<double> z = rot;
        std::complex<double> den{1.0, 0.0};
        for (double a : model.coeffs) {
            den -= a * z;
            z *= rot;
        }
        psd[i] = model.innovation_variance / std::norm(den);
    }
    return SpectralModel(grid, std::move(psd));
}

struct PaleyWienerReport {
    bool admissible = false;
    double log_mean_abs = std::numeric_limits<double>::infinity();  // quad_mean(|ln max(psd, floor)|)
    std::vector<std::size_t> zero_bins;                             // bins at/below the floor
};

/// Log-integrability check for the existence of a stable, causal, minimum-phase
/// spectral factor.  Verdict only; never throws.
inline PaleyWienerReport check_paley_wiener(std::span<const double> psd, double floor = 0.0) {
    if (floor < 0.0) throw std::invalid_argument("check_paley_wiener: floor must be >= 0");
    PaleyWienerReport rep;
    double acc = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < psd.size(); ++i) {
        const double clipped = std::max(psd[i], floor);
        if (psd[i] < floor || clipped <= 0.0) rep.zero_bins.push_back(i);
        if (clipped <= 0.0 || !std::isfinite(psd[i])) {
            finite = false;
            continue;
        }
        acc += std::abs(std::log(clipped));
    }
    if (finite) rep.log_mean_abs = acc / static_cast<double>(psd.size());
    rep.admissible = finite && rep.zero_bins.empty() && std::isfinite(rep.log_mean_abs);
    return rep;
}

/// Read a PSD table: CSV with header "omega,psd", omega in [-pi, pi), one row
/// per grid point in ascending omega order.
inline SpectralModel load_psd_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_psd_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_psd_csv: empty file " + path);
    std::vector<double> omegas, psd;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        if (!std::getline(row, tok, ',')) break;
        const double om = std::stod(tok);
        if (!std::getline(row, tok, ','))
            throw std::runtime_error("load_psd_csv: malformed row '" + line + "'");
        omegas.push_back(om);
        psd.push_back(std::stod(tok));
    }
    const std::size_t n = omegas.size();
    if (n < 2 || n % 2 != 0)
        throw std::runtime_error("load_psd_csv: need an even number of grid rows");
    FrequencyGrid grid(n);
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(omegas[i] - grid.omega(i)) > 1e-6 * grid.spacing())
            throw std::runtime_error("load_psd_csv: omega column is not the uniform grid over [-pi, pi)");
    return SpectralModel(std::move(grid), std::move(psd));
}

inline void save_psd_csv(const SpectralModel& spec, std::ostream& out) {
    out << "omega,psd\n";
    char buf[64];
    for (std::size_t i = 0; i < spec.grid().size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", spec.grid().omega(i), spec.psd()[i]);
        out << buf;
    }
}

}  // namespace crdf
