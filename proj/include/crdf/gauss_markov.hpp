#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crdf/grid.hpp"

namespace crdf {

/// Finite-length first-order Gauss-Markov source x(k+1) = a_k x(k) + xi(k)
/// together with a per-sample distortion schedule D_1 .. D_ell.
struct GmSchedule {
    double sigma0_sq = 1.0;          // variance of x(1)
    std::vector<double> a;           // a_1 .. a_{ell-1}
    std::vector<double> xi_var;      // innovation variances, length ell-1
    std::vector<double> D;           // distortion constraints, length ell
};

inline void validate_schedule(const GmSchedule& s) {
    const std::size_t ell = s.D.size();
    if (ell == 0) throw std::invalid_argument("GmSchedule: empty distortion schedule");
    if (s.a.size() != ell - 1 || s.xi_var.size() != ell - 1)
        throw std::invalid_argument("GmSchedule: a and xi_var must have length ell-1");
    if (!(s.sigma0_sq > 0.0)) throw std::invalid_argument("GmSchedule: sigma0_sq must be > 0");
    for (double v : s.xi_var)
        if (!(v > 0.0)) throw std::invalid_argument("GmSchedule: innovation variances must be > 0");
    for (double d : s.D)
        if (!(d > 0.0)) throw std::invalid_argument("GmSchedule: distortion constraints must be > 0");
}

/// Effective distortions: d_1 = min(sigma0^2, D_1),
/// d_k = min(a_{k-1}^2 d_{k-1} + xi_var_{k-1}, D_k).  Each d_k is the MSE the
/// optimal causal realization actually attains at step k.
inline std::vector<double> effective_distortions(const GmSchedule& s) {
    validate_schedule(s);
    std::vector<double> d(s.D.size());
    d[0] = std::min(s.sigma0_sq, s.D[0]);
    for (std::size_t k = 1; k < s.D.size(); ++k)
        d[k] = std::min(s.a[k - 1] * s.a[k - 1] * d[k - 1] + s.xi_var[k - 1], s.D[k]);
    return d;
}

/// Sequential rate-distortion value in nats/sample:
/// (1/2 ell) [ ln(sigma0^2/d_1) + sum_k ln((a_{k-1}^2 d_{k-1} + xi_{k-1}^2)/d_k) ].
/// Every summand is nonnegative because d_k never exceeds the one-step prior
/// variance.
inline double srdf_rate(const GmSchedule& s) {
    const auto d = effective_distortions(s);
    double acc = 0.5 * std::log(s.sigma0_sq / d[0]);
    for (std::size_t k = 1; k < d.size(); ++k)
        acc += 0.5 * std::log((s.a[k - 1] * s.a[k - 1] * d[k - 1] + s.xi_var[k - 1]) / d[k]);
    return acc / static_cast<double>(d.size());
}

/// Closed-form causal RDF for a stationary AR(1) source under an average MSE
/// constraint: max(0, (1/2) ln(a^2 + xi_var / D)) nats/sample.  The guard
/// covers D past the point where the log turns negative.
inline double causal_rdf_ar1(double a, double xi_var, double D) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("causal_rdf_ar1: need |a| < 1");
    if (!(xi_var > 0.0) || !(D > 0.0))
        throw std::invalid_argument("causal_rdf_ar1: xi_var and D must be > 0");
    return std::max(0.0, 0.5 * std::log(a * a + xi_var / D));
}

/// Distortion that makes causal_rdf_ar1 equal rate_nats (> 0).
inline double causal_rdf_ar1_inverse(double a, double xi_var, double rate_nats) {
    if (!(rate_nats > 0.0)) throw std::invalid_argument("causal_rdf_ar1_inverse: rate must be > 0");
    return xi_var / (std::exp(2.0 * rate_nats) - a * a);
}

/// Joint second-order statistics of the unique realization of the sequential
/// RDF: source covariance K_x, output covariance K_y, cross covariance
/// K_yx = E[y x^T], and the attained per-sample distortions.
struct GmRealization {
    Eigen::MatrixXd K_x;
    Eigen::MatrixXd K_y;
    Eigen::MatrixXd K_yx;
    std::vector<double> d;
};

namespace detail {

/// Solve A X = B for symmetric positive definite A with a condition guard.
inline Eigen::MatrixXd guarded_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const std::string& where) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error(where + ": factorization of a covariance block failed");
    const auto dvec = ldlt.vectorD();
    const double dmax = dvec.maxCoeff();
    const double dmin = dvec.minCoeff();
    if (!(dmin > 0.0) || dmax / dmin > 1e12)
        throw std::runtime_error(where + ": covariance block singular or badly conditioned");
    return ldlt.solve(B);
}

}  // namespace detail

/// Source covariance of the Gauss-Markov recursion.
inline Eigen::MatrixXd gm_source_covariance(const GmSchedule& s) {
    validate_schedule(s);
    const auto ell = static_cast<Eigen::Index>(s.D.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ell, ell);
    K(0, 0) = s.sigma0_sq;
    for (Eigen::Index k = 1; k < ell; ++k) {
        const double a = s.a[static_cast<std::size_t>(k - 1)];
        K(k, k) = a * a * K(k - 1, k - 1) + s.xi_var[static_cast<std::size_t>(k - 1)];
        for (Eigen::Index j = 0; j < k; ++j) {
            K(j, k) = a * K(j, k - 1);
            K(k, j) = K(j, k);
        }
    }
    return K;
}

/// Build the realization recursively.  Iteration k extends the covariances by
/// one row/column: the new cross column is the projection of x_k onto the past
/// outputs, the new output column repeats it (MMSE orthogonality), the
/// diagonal entries enforce E[y_k^2] = E[y_k x_k] = E[x_k^2] - d_k, and the
/// below-diagonal cross row comes from conditional independence of y_k and the
/// source past given (x_k, y^{k-1}).
inline GmRealization srdf_realization(const GmSchedule& s) {
    const auto d = effective_distortions(s);
    const auto ell = static_cast<Eigen::Index>(d.size());
    GmRealization out;
    out.d = d;
    out.K_x = gm_source_covariance(s);
    out.K_y = Eigen::MatrixXd::Zero(ell, ell);
    out.K_yx = Eigen::MatrixXd::Zero(ell, ell);

    out.K_y(0, 0) = out.K_x(0, 0) - d[0];
    out.K_yx(0, 0) = out.K_x(0, 0) - d[0];

    for (Eigen::Index k = 1; k < ell; ++k) {
        const std::string step = "srdf_realization[k=" + std::to_string(k) + "]";
        // E[y^{k-1} x_k] through the existing cross statistics.
        const Eigen::VectorXd proj = detail::guarded_solve(
            out.K_x.topLeftCorner(k, k), out.K_x.block(0, k, k, 1), step + " step 2");
        const Eigen::VectorXd v = out.K_yx.topLeftCorner(k, k) * proj;
        out.K_yx.block(0, k, k, 1) = v;
        out.K_y.block(0, k, k, 1) = v;
        out.K_y.block(k, 0, 1, k) = v.transpose();
        out.K_y(k, k) = out.K_x(k, k) - d[static_cast<std::size_t>(k)];
        out.K_yx(k, k) = out.K_x(k, k) - d[static_cast<std::size_t>(k)];

        // E[y_k (x^{k-1})^T] from the conditional covariance of (y^{k-1}, x_k).
        Eigen::MatrixXd joint(k + 1, k + 1);
        joint.topLeftCorner(k, k) = out.K_y.topLeftCorner(k, k);
        joint.block(0, k, k, 1) = v;
        joint.block(k, 0, 1, k) = v.transpose();
        joint(k, k) = out.K_x(k, k);
        Eigen::MatrixXd rhs(k + 1, k);
        rhs.topRows(k) = out.K_yx.topLeftCorner(k, k);
        rhs.bottomRows(1) = out.K_x.block(0, k, k, 1).transpose();
        Eigen::VectorXd lhs(k + 1);
        lhs.head(k) = v;
        lhs(k) = out.K_x(k, k) - d[static_cast<std::size_t>(k)];
        out.K_yx.block(k, 0, 1, k) =
            lhs.transpose() * detail::guarded_solve(joint, rhs, step + " step 6");
    }
    return out;
}

/// Pre/post matrices of the equivalent vector AWGN channel y = B A x + B n
/// with unit-variance i.i.d. n.  B is a lower-triangular factor of the
/// conditional output covariance.
struct VectorChannel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
};

namespace detail {

/// Lower-triangular Cholesky factor tolerating exact positive semidefiniteness:
/// zero pivots produce zero columns.
inline Eigen::MatrixXd psd_lower_cholesky(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    const double tol = 1e-12 * std::max(1.0, M.diagonal().maxCoeff());
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = M(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (diag <= tol) continue;  // semidefinite direction; column stays zero
        L(j, j) = std::sqrt(diag);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double acc = M(i, j);
            for (Eigen::Index k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
            L(i, j) = acc / L(j, j);
        }
    }
    return L;
}

}  // namespace detail

/// Factor a realization into the constructive channel matrices.
/// Throws if the column span of K_yx escapes the span of B beyond 1e-8, which
/// for a bounded-information realization can only signal numerical breakdown.
inline VectorChannel vector_channel(const GmRealization& real) {
    const Eigen::MatrixXd gain =
        detail::guarded_solve(real.K_x, real.K_yx.transpose(), "vector_channel").transpose();
    Eigen::MatrixXd M = real.K_y - gain * real.K_x * gain.transpose();
    M = 0.5 * (M + M.transpose());

    // Clip tiny negative eigenvalues introduced by roundoff; anything below
    // -1e-10 means the realization is not a covariance and is rejected.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, M.diagonal().maxCoeff()))
        throw std::runtime_error("vector_channel: conditional covariance has a negative eigenvalue");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd Mpsd =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();

    VectorChannel ch;
    ch.B = detail::psd_lower_cholesky(Mpsd);
    ch.A = ch.B.completeOrthogonalDecomposition().solve(gain);

    const double scale = std::max(1.0, gain.cwiseAbs().maxCoeff());
    if (((ch.B * ch.A - gain).cwiseAbs().maxCoeff()) > 1e-8 * scale)
        throw std::runtime_error(
            "vector_channel: span condition col(K_yx) within col(B) violated; numerical breakdown");
    return ch;
}

}  // namespace crdf
