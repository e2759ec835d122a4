#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gbsc/classicality.hpp"
#include "gbsc/gaussian_state.hpp"

// Exact, exponential-cost reference computations for small instances:
// the full threshold-detector outcome distribution of a zero-mean
// Gaussian state, total-variation distances, and Fock-basis brute-force
// cross-checks. Everything here is a verification oracle, not a
// scalable simulator.

namespace gbsc {

// Full outcome distribution over 2^M click patterns, indexed
// lexicographically with n_1 as the most significant bit.
struct ExactDistribution {
    int modes = 0;
    Eigen::VectorXd probs;
};

namespace oracle_detail {

// Tr[rho_1 rho_2] = 1 / sqrt(det((V_1 + V_2)/2)) for zero-mean
// Gaussian states in the hbar=2 convention.
inline double gaussian_overlap(const Eigen::MatrixXd& v1,
                               const Eigen::MatrixXd& v2) {
    return 1.0 / std::sqrt(((v1 + v2) / 2.0).determinant());
}

inline Eigen::MatrixXd marginal(const Eigen::MatrixXd& cov,
                                const std::vector<int>& modes_subset) {
    const int m = static_cast<int>(modes_subset.size());
    Eigen::MatrixXd sub(2 * m, 2 * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            sub.block<2, 2>(2 * a, 2 * b) =
                cov.block<2, 2>(2 * modes_subset[a], 2 * modes_subset[b]);
    return sub;
}

}  // namespace oracle_detail

// P0(T): probability that every mode in T registers no click, other
// modes unconstrained. The no-click POVM element is (1 - p_d)/eta_d
// times a thermal Gaussian operator with covariance (2 - eta_d)/eta_d I,
// so P0 reduces to a closed-form Gaussian-Gaussian overlap over the
// marginal covariance of T.
inline double no_click_probability(const GaussianState& state,
                                   const DetectorModel& det,
                                   const std::vector<int>& subset) {
    if (subset.empty()) return 1.0;
    const int m = static_cast<int>(subset.size());
    const Eigen::MatrixXd vt = oracle_detail::marginal(state.cov, subset);
    const double c = (2.0 - det.eta_d) / det.eta_d;
    const Eigen::MatrixXd thermal =
        c * Eigen::MatrixXd::Identity(2 * m, 2 * m);
    return std::pow((1.0 - det.p_d) / det.eta_d, m) *
           oracle_detail::gaussian_overlap(vt, thermal);
}

// Exact threshold-detector distribution by inclusion-exclusion over the
// click set: P(n) = sum_{A subset of clicks} (-1)^|A| P0(zeros + A).
// Cost 2^M Gaussian determinants; refuses M > 14.
inline ExactDistribution exact_distribution(const GaussianState& state,
                                            const DetectorModel& det) {
    det.validate();
    const int m = state.modes;
    if (m > 14)
        throw std::invalid_argument(
            "exact_distribution: M > 14 (cost is 2^M determinants)");
    if (!is_physical(state))
        throw std::invalid_argument("exact_distribution: unphysical state");

    // precompute P0 for every subset, indexed by bitmask (bit i = mode i)
    std::vector<double> p0(std::size_t{1} << m);
    for (std::size_t mask = 0; mask < p0.size(); ++mask) {
        std::vector<int> subset;
        for (int i = 0; i < m; ++i)
            if (mask & (std::size_t{1} << i)) subset.push_back(i);
        p0[mask] = no_click_probability(state, det, subset);
    }

    ExactDistribution dist{m, Eigen::VectorXd::Zero(1 << m)};
    for (std::size_t pat = 0; pat < p0.size(); ++pat) {
        // pattern index is lexicographic with n_1 most significant
        std::size_t clicks = 0, zeros = 0;
        for (int i = 0; i < m; ++i) {
            const bool click = pat & (std::size_t{1} << (m - 1 - i));
            (click ? clicks : zeros) |= std::size_t{1} << i;
        }
        double p = 0.0;
        // iterate over subsets A of the click set
        std::size_t a = clicks;
        while (true) {
            const int parity = __builtin_popcountll(a) & 1;
            p += (parity ? -1.0 : 1.0) * p0[zeros | a];
            if (a == 0) break;
            a = (a - 1) & clicks;
        }
        if (p < -1e-10)
            throw std::runtime_error(
                "exact_distribution: negative probability beyond tolerance");
        dist.probs(static_cast<Eigen::Index>(pat)) = std::max(p, 0.0);
    }
    return dist;
}

inline double total_variation(const ExactDistribution& p,
                              const ExactDistribution& q) {
    if (p.modes != q.modes)
        throw std::invalid_argument("total_variation: dimension mismatch");
    return 0.5 * (p.probs - q.probs).cwiseAbs().sum();
}

// ---- Fock-basis brute force --------------------------------------------

// Truncated density matrix of a squeezed thermal state, built from the
// matrix exponential of the Stoler generator. Throws if the truncated
// trace deviates from 1 by more than tail_tol.
inline Eigen::MatrixXcd fock_density(const SqueezedThermalParams& p,
                                     int cutoff, double tail_tol = 1e-10) {
    Eigen::MatrixXcd create = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    for (int k = 0; k + 1 < cutoff; ++k)
        create(k + 1, k) = std::sqrt(static_cast<double>(k + 1));
    const Eigen::MatrixXcd destroy = create.adjoint();
    const std::complex<double> phase(std::cos(p.phi), std::sin(p.phi));
    const Eigen::MatrixXcd gen = 0.5 * p.s * phase * (create * create) -
                                 0.5 * p.s * std::conj(phase) *
                                     (destroy * destroy);
    const Eigen::MatrixXcd squeezer = gen.exp();

    Eigen::MatrixXcd thermal = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    if (p.n <= 0.0) {
        thermal(0, 0) = 1.0;
    } else {
        const double ratio = p.n / (p.n + 1.0);
        double w = 1.0 / (p.n + 1.0);
        for (int k = 0; k < cutoff; ++k, w *= ratio) thermal(k, k) = w;
    }
    Eigen::MatrixXcd rho = squeezer * thermal * squeezer.adjoint();
    const double tail = std::abs(1.0 - rho.trace().real());
    if (tail > tail_tol)
        throw std::invalid_argument("fock_density: cutoff too small for state");
    return rho;
}

// Uhlmann fidelity (squared convention) of two truncated density
// matrices; the independent cross-check for gaussian_fidelity_1mode.
inline double fock_fidelity(const SqueezedThermalParams& a,
                            const SqueezedThermalParams& b, int cutoff) {
    auto matrix_sqrt = [](const Eigen::MatrixXcd& rho) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
        return Eigen::MatrixXcd(es.eigenvectors() *
                                es.eigenvalues()
                                    .cwiseMax(0.0)
                                    .cwiseSqrt()
                                    .asDiagonal() *
                                es.eigenvectors().adjoint());
    };
    // F = (||sqrt(rho_a) sqrt(rho_b)||_1)^2; singular values avoid the
    // sqrt of noisy near-zero eigenvalues that Tr sqrt(A rho B A) takes
    const Eigen::MatrixXcd prod = matrix_sqrt(fock_density(a, cutoff)) *
                                  matrix_sqrt(fock_density(b, cutoff));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(prod);
    const double root_sum = svd.singularValues().sum();
    return root_sum * root_sum;
}

// ---- Quadrature self-test ----------------------------------------------

namespace oracle_detail {

// Tensor-product Gauss-Legendre over [-L, L]^dim with order doubling
// until two successive orders agree to tol.
template <typename F>
double adaptive_tensor_quadrature(F&& f, int dim, double half_width,
                                  double tol) {
    auto gl_nodes = [&](int order, std::vector<double>& x,
                        std::vector<double>& w) {
        // Golub-Welsch via the symmetric tridiagonal Jacobi matrix
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
        for (int k = 1; k < order; ++k) {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            jac(k, k - 1) = jac(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
        x.resize(order);
        w.resize(order);
        for (int k = 0; k < order; ++k) {
            x[k] = es.eigenvalues()(k) * half_width;
            const double v0 = es.eigenvectors()(0, k);
            w[k] = 2.0 * v0 * v0 * half_width;
        }
    };
    auto evaluate = [&](int order) {
        std::vector<double> x, w;
        gl_nodes(order, x, w);
        std::vector<int> idx(dim, 0);
        std::vector<double> point(dim);
        double total = 0.0;
        while (true) {
            double weight = 1.0;
            for (int d = 0; d < dim; ++d) {
                point[d] = x[idx[d]];
                weight *= w[idx[d]];
            }
            total += weight * f(point);
            int d = 0;
            while (d < dim && ++idx[d] == order) idx[d++] = 0;
            if (d == dim) break;
        }
        return total;
    };
    double prev = evaluate(24);
    for (int order = 48; order <= 96; order *= 2) {
        const double cur = evaluate(order);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace oracle_detail

// Numerical-quadrature evaluation of P0(T) through the phase-space
// overlap of the Husimi function of the state (ordering t = -1, always
// regular) with the dual-ordered no-click detector PQD. Requires
// eta_d < 1 (at eta_d = 1 the dual detector PQD degenerates to a delta)
// and |T| <= 2. This is the independent check on the closed form.
inline double no_click_probability_quadrature(const GaussianState& state,
                                              const DetectorModel& det,
                                              const std::vector<int>& subset,
                                              double tol = 1e-9) {
    if (subset.empty()) return 1.0;
    const int m = static_cast<int>(subset.size());
    if (m > 2)
        throw std::invalid_argument(
            "no_click_probability_quadrature: |T| <= 2 only");
    if (det.eta_d >= 1.0)
        throw std::invalid_argument(
            "no_click_probability_quadrature: needs eta_d < 1");

    const Eigen::MatrixXd vt = oracle_detail::marginal(state.cov, subset);
    const Eigen::MatrixXd husimi_cov =
        vt + Eigen::MatrixXd::Identity(2 * m, 2 * m);
    const Eigen::MatrixXd prec = husimi_cov.inverse();
    const double husimi_norm =
        1.0 / (std::pow(2.0 * std::numbers::pi, m) *
               std::sqrt(husimi_cov.determinant()));

    // detector PQD at order -t = +1: prefactor and Gaussian width
    const double denom = 1.0 - det.eta_d;  // 1 - eta_d (1 - t)/2 at t = -1
    const double det_pref =
        (1.0 - det.p_d) / (2.0 * std::numbers::pi * denom);
    const double det_rate = det.eta_d / (4.0 * denom);

    // fold the per-mode detector Gaussians into one quadratic form so
    // the box half-width tracks the actual decay of the integrand
    Eigen::MatrixXd combined =
        prec + 2.0 * det_rate * Eigen::MatrixXd::Identity(2 * m, 2 * m);
    const double prefactor =
        husimi_norm *
        std::pow(2.0 * std::numbers::pi * det_pref, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(combined,
                                                      Eigen::EigenvaluesOnly);
    const double half_width = 9.0 / std::sqrt(es.eigenvalues().minCoeff());

    auto integrand = [&](const std::vector<double>& pt) {
        double quad = 0.0;
        for (int a = 0; a < 2 * m; ++a)
            for (int b = 0; b < 2 * m; ++b)
                quad += pt[a] * combined(a, b) * pt[b];
        return prefactor * std::exp(-0.5 * quad);
    };
    return oracle_detail::adaptive_tensor_quadrature(integrand, 2 * m,
                                                     half_width, tol);
}

}  // namespace gbsc
