#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace crdf {

/// Uniform angular-frequency grid covering [-pi, pi), radians/sample.
///
/// The grid is symmetric under negation modulo 2*pi: for every point omega(i)
/// the point -omega(i) is also on the grid (at index mirror(i)).  Point count
/// must be even so that -pi maps back onto itself.
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::size_t n_points = 4096) : n_(n_points) {
        if (n_points == 0 || n_points % 2 != 0)
            throw std::invalid_argument("FrequencyGrid: n_points must be a positive even integer");
        omegas_.resize(n_);
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i)
            omegas_[i] = -std::numbers::pi + step * static_cast<double>(i);
    }

    std::size_t size() const noexcept { return n_; }
    double omega(std::size_t i) const { return omegas_.at(i); }
    const std::vector<double>& omegas() const noexcept { return omegas_; }
    double spacing() const noexcept { return 2.0 * std::numbers::pi / static_cast<double>(n_); }

    /// Index holding -omega(i) (mod 2*pi).
    std::size_t mirror(std::size_t i) const noexcept { return i == 0 ? 0 : n_ - i; }

    bool operator==(const FrequencyGrid& other) const noexcept { return n_ == other.n_; }

private:
    std::size_t n_;
    std::vector<double> omegas_;
};

/// Grid mean; realizes (1/2pi) * integral_{-pi}^{pi} for periodic integrands.
inline double quad_mean(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("quad_mean: empty input");
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

/// Quadrature inner product <a,b> = mean(a*b) over the grid.
inline double quad_inner(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("quad_inner: size mismatch or empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc / static_cast<double>(a.size());
}

/// Quadrature squared norm ||a||^2 = mean(a^2).
inline double quad_norm_sq(std::span<const double> a) { return quad_inner(a, a); }

/// Frequency response H(e^{j omega}) = sum_m taps[m] e^{-j omega m} on the grid.
inline std::vector<std::complex<double>> fir_response(std::span<const double> taps,
                                                      const FrequencyGrid& grid) {
    std::vector<std::complex<double>> h(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::complex<double> rot = std::polar(1.0, -grid.omega(i));
        std::complex<double> z{1.0, 0.0};
        std::complex<double> acc{0.0, 0.0};
        for (double t : taps) {
            acc += t * z;
            z *= rot;
        }
        h[i] = acc;
    }
    return h;
}

}  // namespace crdf
