#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crdf/spectrum.hpp"

namespace crdf {

/// Decision variables of the causal filter design around a fixed-SNR channel:
/// the channel SNR constant K = sigma_w^2 / sigma_n^2 (> 1), the noise-shaping
/// magnitude f(omega) = |1 - F(e^{j omega})| sampled on the grid, and the
/// causal FIR denoiser W.
///
/// Feasibility: f >= 0 with quad_mean(ln f) = 0 (the strictly-causal feedback
/// filter pins the log-integral of f at zero), and quad_mean(f^2) < K so the
/// channel noise budget stays positive.
struct DesignState {
    double snr_k = 2.0;
    std::vector<double> shaping;   // f on the grid
    std::vector<double> w_taps;    // denoiser impulse response
    FrequencyGrid grid{4096};
};

inline void validate_design_state(const DesignState& state) {
    if (!(state.snr_k > 1.0))
        throw std::invalid_argument("DesignState: snr constant K must exceed 1");
    if (state.shaping.size() != state.grid.size())
        throw std::invalid_argument("DesignState: shaping sample count does not match grid");
    if (state.w_taps.empty())
        throw std::invalid_argument("DesignState: denoiser must have at least one tap");
    double log_acc = 0.0, sq_acc = 0.0;
    for (double f : state.shaping) {
        if (!(f >= 0.0) || !std::isfinite(f))
            throw std::invalid_argument("DesignState: shaping must be finite and nonnegative");
        log_acc += std::log(f);
        sq_acc += f * f;
    }
    const double n = static_cast<double>(state.shaping.size());
    if (std::abs(log_acc / n) > 1e-8)
        throw std::invalid_argument("DesignState: quad_mean(ln f) must vanish");
    if (!(sq_acc / n < state.snr_k))
        throw std::invalid_argument("DesignState: quad_mean(f^2) must stay below K");
}

struct CostBreakdown {
    double distortion = 0.0;       // total MSE D_c
    double sigma_u_sq = 0.0;       // source-independent error power
    double linear_distortion = 0.0;  // ||(W-1) Omega_x||^2
};

/// Reconstruction MSE of the design:
///   D_c = <Omega_x |W|, f>^2 / (K - ||f||^2)  +  ||(W - 1) Omega_x||^2,
/// with quadrature inner products.  The first term is additive noise leaking
/// through the shaped channel; the second is linear distortion from W != 1.
inline CostBreakdown eval_cost(const SpectralModel& spec, const DesignState& state) {
    validate_design_state(state);
    if (!(spec.grid() == state.grid))
        throw std::invalid_argument("eval_cost: spectrum and state live on different grids");
    const auto& omx = spec.omega_x();
    const auto& psd = spec.psd();
    const auto w = fir_response(state.w_taps, state.grid);
    const std::size_t n = state.grid.size();
    double num = 0.0, fsq = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += omx[i] * std::abs(w[i]) * state.shaping[i];
        fsq += state.shaping[i] * state.shaping[i];
        lin += std::norm(w[i] - 1.0) * psd[i];
    }
    num /= static_cast<double>(n);
    fsq /= static_cast<double>(n);
    lin /= static_cast<double>(n);
    const double denom = state.snr_k - fsq;
    if (!(denom > 0.0))
        throw std::invalid_argument("eval_cost: ||f||^2 >= K, infeasible shaping");
    CostBreakdown out;
    out.sigma_u_sq = num * num / denom;
    out.linear_distortion = lin;
    out.distortion = out.sigma_u_sq + out.linear_distortion;
    return out;
}

namespace detail {

/// Stationarity system for the shaping subproblem.  With a = Omega_x |W|,
/// N = <a,f> and Dn = K - ||f||^2, the minimizer over {f >= 0, mean(ln f) = 0}
/// solves pointwise
///     2 N a(w) / Dn + 2 N^2 f(w) / Dn^2 = mu / f(w),
/// i.e. f is the positive root of (N^2/Dn^2) f^2 + (N/Dn) a f - mu/2 = 0.
/// Writing beta = N/Dn the root is f = (sqrt(a^2 + 2 mu) - a) / (2 beta), and
/// the log-mean constraint fixes beta for each mu:
///     2 beta = exp(mean(ln(sqrt(a^2 + 2 mu) - a))).
/// Self-consistency beta = N(f)/Dn(f) becomes a scalar root-find in mu.
struct ShapingSolver {
    const std::vector<double>& a;
    double K;

    struct Eval {
        double residual;
        double beta;
        std::vector<double> f;
    };

    Eval eval(double log_mu) const {
        const std::size_t n = a.size();
        Eval out;
        out.f.resize(n);
        const double mu = std::exp(log_mu);
        double log_acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // stable form of sqrt(a^2 + 2 mu) - a
            const double g = 2.0 * mu / (std::sqrt(a[i] * a[i] + 2.0 * mu) + a[i]);
            out.f[i] = g;
            log_acc += std::log(g);
        }
        const double log_mean = log_acc / static_cast<double>(n);
        out.beta = 0.5 * std::exp(log_mean);
        double num = 0.0, fsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.f[i] *= std::exp(-log_mean);
            num += a[i] * out.f[i];
            fsq += out.f[i] * out.f[i];
        }
        num /= static_cast<double>(n);
        fsq /= static_cast<double>(n);
        const double denom = K - fsq;
        if (!(denom > 0.0)) {
            out.residual = std::numeric_limits<double>::infinity();
            return out;
        }
        out.residual = num / denom - out.beta;
        return out;
    }
};

}  // namespace detail

/// Shaping update: minimize the cost over f for fixed W.  Solved as a
/// constrained convex program; the returned state satisfies the stationarity
/// system above with relative residual below 1e-8.
inline DesignState optimize_shaping(const SpectralModel& spec, const DesignState& state) {
    validate_design_state(state);
    const auto w = fir_response(state.w_taps, state.grid);
    const std::size_t n = state.grid.size();
    std::vector<double> a(n);
    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = spec.omega_x()[i] * std::abs(w[i]);
        amax = std::max(amax, a[i]);
    }
    DesignState next = state;
    if (amax == 0.0) {  // no signal reaches the channel; any feasible f works
        std::fill(next.shaping.begin(), next.shaping.end(), 1.0);
        return next;
    }

    detail::ShapingSolver solver{a, state.snr_k};
    double lo = -60.0, hi = 60.0;
    // residual is positive (or infeasible) for small mu and negative for large mu
    while (solver.eval(hi).residual >= 0.0 && hi < 690.0) hi += 60.0;
    if (solver.eval(hi).residual >= 0.0)
        throw std::runtime_error(
            "optimize_shaping: no stationary point bracketed; refine the grid or lower the rate");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (solver.eval(mid).residual > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double log_mu = 0.5 * (lo + hi);
    auto sol = solver.eval(log_mu);
    next.shaping = std::move(sol.f);

    // stationarity residual contract
    const double mu = std::exp(log_mu);
    double num = 0.0, fsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += a[i] * next.shaping[i];
        fsq += next.shaping[i] * next.shaping[i];
    }
    num /= static_cast<double>(n);
    fsq /= static_cast<double>(n);
    const double denom = state.snr_k - fsq;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lhs = 2.0 * num * a[i] * next.shaping[i] / denom +
                           2.0 * num * num * next.shaping[i] * next.shaping[i] / (denom * denom);
        worst = std::max(worst, std::abs(lhs / mu - 1.0));
    }
    if (worst > 1e-8)
        throw std::runtime_error(
            "optimize_shaping: stationarity residual " + std::to_string(worst) +
            " exceeds 1e-8; refine the grid or lower the rate");
    return next;
}

namespace detail {

/// Denoiser subproblem in FIR coordinates c (W = sum_m c_m e^{-j omega m}):
///   G(c) = <q, |W|>^2 / Dn + mean(|W - 1|^2 psd),  q = Omega_x f,  Dn fixed.
/// Convex in c; |W| contributes d|W|/dc_m = Re(W e^{j omega m}) / |W| with
/// subgradient 0 at |W| = 0 bins.
class DenoiserProblem {
public:
    DenoiserProblem(const SpectralModel& spec, const std::vector<double>& shaping,
                    double snr_k, std::size_t order)
        : psd_(spec.psd()), n_(spec.grid().size()), m_(order + 1) {
        const auto& omx = spec.omega_x();
        q_.resize(n_);
        double fsq = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            q_[i] = omx[i] * shaping[i];
            fsq += shaping[i] * shaping[i];
        }
        denom_ = snr_k - fsq / static_cast<double>(n_);
        if (!(denom_ > 0.0))
            throw std::invalid_argument("optimize_denoiser: infeasible shaping, ||f||^2 >= K");
        cosb_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_));
        sinb_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t m = 0; m < m_; ++m) {
                const double ang = spec.grid().omega(i) * static_cast<double>(m);
                cosb_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = std::cos(ang);
                sinb_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = std::sin(ang);
            }
    }

    std::size_t order_plus_one() const { return m_; }

    double value(const Eigen::VectorXd& c) const {
        const Eigen::VectorXd u = cosb_ * c;           // Re W
        const Eigen::VectorXd v = -(sinb_ * c);        // Im W
        double num = 0.0, lin = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double mag = std::hypot(u(ii), v(ii));
            num += q_[i] * mag;
            lin += psd_[i] * ((u(ii) - 1.0) * (u(ii) - 1.0) + v(ii) * v(ii));
        }
        num /= static_cast<double>(n_);
        lin /= static_cast<double>(n_);
        return num * num / denom_ + lin;
    }

    /// Gradient; throws naming the offending bin if anything non-finite shows up.
    Eigen::VectorXd gradient(const Eigen::VectorXd& c) const {
        const Eigen::VectorXd u = cosb_ * c;
        const Eigen::VectorXd v = -(sinb_ * c);
        Eigen::VectorXd grad_num = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        Eigen::VectorXd grad_lin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        double num = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double mag = std::hypot(u(ii), v(ii));
            num += q_[i] * mag;
            if (mag > kMagFloor) {
                // d|W|/dc_m = (u cos - v sin)/|W|
                grad_num += (q_[i] / mag) * (u(ii) * cosb_.row(ii) - v(ii) * sinb_.row(ii)).transpose();
            }
            grad_lin += 2.0 * psd_[i] *
                        ((u(ii) - 1.0) * cosb_.row(ii) - v(ii) * sinb_.row(ii)).transpose();
        }
        num /= static_cast<double>(n_);
        Eigen::VectorXd g = (2.0 * num / denom_) * grad_num / static_cast<double>(n_) +
                            grad_lin / static_cast<double>(n_);
        for (Eigen::Index m = 0; m < g.size(); ++m)
            if (!std::isfinite(g(m)))
                throw std::runtime_error("optimize_denoiser: non-finite gradient component " +
                                         std::to_string(m));
        return g;
    }

    Eigen::MatrixXd hessian(const Eigen::VectorXd& c) const {
        const auto mm = static_cast<Eigen::Index>(m_);
        const Eigen::VectorXd u = cosb_ * c;
        const Eigen::VectorXd v = -(sinb_ * c);
        Eigen::VectorXd phase_w(static_cast<Eigen::Index>(n_));
        Eigen::VectorXd toe_w(static_cast<Eigen::Index>(n_));
        Eigen::MatrixXd dirs(static_cast<Eigen::Index>(n_), mm);
        double num = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double mag = std::hypot(u(ii), v(ii));
            num += q_[i] * mag;
            if (mag > kMagFloor) {
                dirs.row(ii) = (u(ii) * cosb_.row(ii) - v(ii) * sinb_.row(ii)) / mag;
                toe_w(ii) = q_[i] / mag;
            } else {
                dirs.row(ii).setZero();
                toe_w(ii) = 0.0;
            }
        }
        num /= static_cast<double>(n_);
        const Eigen::VectorXd grad_num =
            (dirs.transpose() * Eigen::Map<const Eigen::VectorXd>(q_.data(), static_cast<Eigen::Index>(n_)))
                / static_cast<double>(n_);

        // curvature of |W|: (cos(omega (m-l)) - dir_m dir_l) * q/|W|
        Eigen::MatrixXd H = (2.0 / denom_) * grad_num * grad_num.transpose();
        const Eigen::MatrixXd cw = cosb_.transpose() * (toe_w.asDiagonal() * cosb_);
        const Eigen::MatrixXd sw = sinb_.transpose() * (toe_w.asDiagonal() * sinb_);
        const Eigen::MatrixXd dd = dirs.transpose() * (toe_w.asDiagonal() * dirs);
        H += (2.0 * num / denom_) * ((cw + sw) - dd) / static_cast<double>(n_);
        const Eigen::Map<const Eigen::VectorXd> pw(psd_.data(), static_cast<Eigen::Index>(n_));
        H += 2.0 *
             (cosb_.transpose() * (pw.asDiagonal() * cosb_) +
              sinb_.transpose() * (pw.asDiagonal() * sinb_)) /
             static_cast<double>(n_);
        return H;
    }

private:
    static constexpr double kMagFloor = 1e-14;
    const std::vector<double>& psd_;
    std::vector<double> q_;
    std::size_t n_;
    std::size_t m_;
    double denom_ = 0.0;
    Eigen::MatrixXd cosb_;
    Eigen::MatrixXd sinb_;
};

}  // namespace detail

/// Denoiser update: minimize the cost over the (order+1)-tap FIR W for fixed f.
/// Damped Newton with backtracking; stops once the gradient sup-norm falls
/// below 1e-9 (relative to the initial cost scale).
inline DesignState optimize_denoiser(const SpectralModel& spec, const DesignState& state,
                                     std::size_t order) {
    validate_design_state(state);
    detail::DenoiserProblem prob(spec, state.shaping, state.snr_k, order);
    const auto mm = static_cast<Eigen::Index>(prob.order_plus_one());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(mm);
    for (std::size_t m = 0; m < std::min(state.w_taps.size(), prob.order_plus_one()); ++m)
        c(static_cast<Eigen::Index>(m)) = state.w_taps[m];

    double value = prob.value(c);
    const double grad_tol = 1e-9;
    double levenberg = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 200 && !converged; ++iter) {
        const Eigen::VectorXd g = prob.gradient(c);
        const double gnorm = g.cwiseAbs().maxCoeff();
        if (gnorm < grad_tol) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd H = prob.hessian(c);
        bool stepped = false;
        for (int tries = 0; tries < 60 && !stepped; ++tries) {
            Eigen::MatrixXd Hd = H;
            if (levenberg > 0.0) Hd.diagonal().array() += levenberg;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(Hd);
            Eigen::VectorXd step = ldlt.solve(-g);
            if (ldlt.info() != Eigen::Success || !step.allFinite() || g.dot(step) >= 0.0) {
                levenberg = std::max(levenberg * 10.0, 1e-10 * std::abs(H.trace()) / static_cast<double>(mm));
                continue;
            }
            double t = 1.0;
            const double slope = g.dot(step);
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd trial_c = c + t * step;
                const double trial = prob.value(trial_c);
                bool accept = trial <= value + 1e-4 * t * slope;
                if (!accept && ls == 0) {
                    // Near the optimum the Armijo decrease falls below double
                    // resolution; the full Newton step still contracts the
                    // gradient quadratically, so accept on that evidence.
                    accept = prob.gradient(trial_c).cwiseAbs().maxCoeff() <= 0.7 * gnorm;
                }
                if (accept) {
                    c = trial_c;
                    value = trial;
                    stepped = true;
                    break;
                }
                t *= 0.5;
            }
            if (!stepped)
                levenberg = std::max(levenberg * 10.0, 1e-10 * std::abs(H.trace()) / static_cast<double>(mm));
            else if (t == 1.0)
                levenberg /= 3.0;
        }
        if (!stepped)
            throw std::runtime_error("optimize_denoiser: damped Newton failed to make progress");
    }
    if (!converged)
        throw std::runtime_error("optimize_denoiser: gradient residual did not reach tolerance");

    DesignState next = state;
    next.w_taps.assign(c.data(), c.data() + c.size());
    return next;
}

/// Analytic gradient of the denoiser objective at the state's taps, exposed so
/// it can be checked against finite differences.
inline std::vector<double> denoiser_gradient(const SpectralModel& spec, const DesignState& state) {
    validate_design_state(state);
    detail::DenoiserProblem prob(spec, state.shaping, state.snr_k,
                                 state.w_taps.size() - 1);
    Eigen::VectorXd c =
        Eigen::Map<const Eigen::VectorXd>(state.w_taps.data(),
                                          static_cast<Eigen::Index>(state.w_taps.size()));
    const Eigen::VectorXd g = prob.gradient(c);
    return std::vector<double>(g.data(), g.data() + g.size());
}

/// Result of the alternating design iteration.
struct DesignOutcome {
    double rate_nats = 0.0;                  // (1/2) ln K
    std::vector<double> distortion_trace;    // D_c after each full round
    DesignState state;
    double sigma_u_sq = 0.0;
};

/// Alternating minimization at a fixed target rate (nats/sample):
/// K = e^{2R}; W starts at unity; each round updates the shaping for the
/// current denoiser and then the denoiser for the new shaping.  Convexity of
/// the joint problem makes the recorded distortion trace nonincreasing.
/// Stops early once the relative distortion change drops below 1e-10.
inline DesignOutcome design_filters(const SpectralModel& spec, double target_rate_nats,
                                    std::size_t order = 8, std::size_t iterations = 4) {
    if (!(target_rate_nats > 0.0))
        throw std::invalid_argument("design_filters: target rate must be positive");
    if (iterations == 0) throw std::invalid_argument("design_filters: need at least one round");
    DesignState state;
    state.grid = spec.grid();
    state.snr_k = std::exp(2.0 * target_rate_nats);
    state.shaping.assign(spec.grid().size(), 1.0);
    state.w_taps.assign(1, 1.0);

    DesignOutcome out;
    out.rate_nats = target_rate_nats;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t round = 0; round < iterations; ++round) {
        state = optimize_shaping(spec, state);
        state = optimize_denoiser(spec, state, order);
        const auto cost = eval_cost(spec, state);
        out.distortion_trace.push_back(cost.distortion);
        if (std::isfinite(prev) &&
            std::abs(prev - cost.distortion) <= 1e-10 * std::max(1.0, cost.distortion))
            break;
        prev = cost.distortion;
    }
    out.state = std::move(state);
    out.sigma_u_sq = eval_cost(spec, out.state).sigma_u_sq;
    return out;
}

/// The joint functional J(f, g) = <f, |g|>^2 / (K - ||f||^2) + ||g - G||^2
/// whose strict convexity underwrites the alternating iteration.  G is the
/// source magnitude Omega_x; g plays the role of Omega_x W.
inline double design_cost_functional(std::span<const double> shaping,
                                     std::span<const std::complex<double>> g,
                                     std::span<const double> target, double snr_k) {
    if (shaping.size() != g.size() || g.size() != target.size() || g.empty())
        throw std::invalid_argument("design_cost_functional: size mismatch");
    const double n = static_cast<double>(g.size());
    double num = 0.0, fsq = 0.0, dist = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += shaping[i] * std::abs(g[i]);
        fsq += shaping[i] * shaping[i];
        dist += std::norm(g[i] - target[i]);
    }
    num /= n;
    fsq /= n;
    dist /= n;
    const double denom = snr_k - fsq;
    if (!(denom > 0.0))
        throw std::invalid_argument("design_cost_functional: ||f||^2 >= K");
    return num * num / denom + dist;
}

struct ConvexityReport {
    std::size_t trials = 0;
    std::size_t violations = 0;       // convexity violations beyond 1e-10
    double max_violation = 0.0;       // max of J(comb) - lambda J1 - (1-lambda) J2
    double min_midpoint_margin = 0.0; // smallest strict-convexity margin at lambda = 1/2
};

/// Sample random feasible pairs and test convexity of the joint functional
/// along the segment between them, at lambda in {0.1, ..., 0.9}.
inline ConvexityReport convexity_probe(const SpectralModel& spec, double snr_k,
                                       std::size_t trials, std::uint64_t seed = 0x5eed) {
    if (trials == 0) throw std::invalid_argument("convexity_probe: need at least one trial");
    if (!(snr_k > 1.0)) throw std::invalid_argument("convexity_probe: K must exceed 1");
    const std::size_t n = spec.grid().size();
    const auto& target = spec.omega_x();

    // splitmix64 stream; uniform doubles in [0,1)
    std::uint64_t s = seed;
    auto next_u64 = [&s]() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    auto uniform = [&]() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; };

    auto random_pair = [&](std::vector<double>& f, std::vector<std::complex<double>>& g) {
        f.resize(n);
        g.resize(n);
        double fsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = -std::log(1.0 - uniform());  // exponential, positive
            fsq += f[i] * f[i];
            g[i] = std::complex<double>(2.0 * uniform() - 1.0, 2.0 * uniform() - 1.0) *
                   (1.0 + target[i]);
        }
        fsq /= static_cast<double>(n);
        const double cap = std::sqrt(0.8 * snr_k / std::max(fsq, 1e-300)) * uniform();
        for (auto& v : f) v *= cap;
    };

    ConvexityReport rep;
    rep.trials = trials;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    rep.min_midpoint_margin = std::numeric_limits<double>::infinity();
    std::vector<double> f1, f2, fc;
    std::vector<std::complex<double>> g1, g2, gc;
    for (std::size_t t = 0; t < trials; ++t) {
        random_pair(f1, g1);
        random_pair(f2, g2);
        const double j1 = design_cost_functional(f1, g1, target, snr_k);
        const double j2 = design_cost_functional(f2, g2, target, snr_k);
        fc.resize(n);
        gc.resize(n);
        for (int lam_i = 1; lam_i <= 9; ++lam_i) {
            const double lam = 0.1 * lam_i;
            for (std::size_t i = 0; i < n; ++i) {
                fc[i] = lam * f1[i] + (1.0 - lam) * f2[i];
                gc[i] = lam * g1[i] + (1.0 - lam) * g2[i];
            }
            const double jc = design_cost_functional(fc, gc, target, snr_k);
            const double gap = jc - (lam * j1 + (1.0 - lam) * j2);
            rep.max_violation = std::max(rep.max_violation, gap);
            if (gap > 1e-10) ++rep.violations;
            if (lam_i == 5) rep.min_midpoint_margin = std::min(rep.min_midpoint_margin, -gap);
        }
    }
    return rep;
}

}  // namespace crdf
