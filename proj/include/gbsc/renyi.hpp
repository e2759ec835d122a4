#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "gbsc/classicality.hpp"
#include "gbsc/gaussian_state.hpp"

// Sandwiched Renyi relative entropy D_alpha between zero-mean
// single-mode Gaussian states, its minimization over (t)-classical
// states, and the alpha-scan that picks out alpha = 1/2 as the order
// giving the tightest simulability bound.

namespace gbsc {

struct RenyiOrder {
    double alpha;
    explicit RenyiOrder(double a) : alpha(a) {
        if (a < 0.5 || a >= 1.0)
            throw std::invalid_argument("RenyiOrder: alpha must be in [1/2, 1)");
    }
    double beta() const { return (1.0 - alpha) / alpha; }
};

struct RenyiScanRow {
    double alpha;
    double d_min;  // minimized divergence D_alpha^min
    double bound;  // (2/alpha) * d_min
};

namespace detail {

using Matrix2cd = Eigen::Matrix2cd;

inline Matrix2cd i_omega() {
    Matrix2cd m;
    m << std::complex<double>(0, 0), std::complex<double>(0, -1),
         std::complex<double>(0, 1), std::complex<double>(0, 0);
    return m;
}

// Principal-branch matrix power of a diagonalizable 2x2 complex matrix.
inline Matrix2cd mat_pow(const Matrix2cd& a, double p) {
    Eigen::ComplexEigenSolver<Matrix2cd> es(a);
    Matrix2cd d = Matrix2cd::Zero();
    d(0, 0) = std::pow(es.eigenvalues()(0), p);
    d(1, 1) = std::pow(es.eigenvalues()(1), p);
    return es.eigenvectors() * d * es.eigenvectors().inverse();
}

// The covariance-power map used by the Gaussian Q_alpha formula:
// V |-> [(I + X^-1)^p + (I - X^-1)^p] [(I + X^-1)^p - (I - X^-1)^p]^-1 iOmega,
// with X = V iOmega. On a thermal state it raises the Gibbs factor to
// the p-th power.
inline Matrix2cd power_map(const Matrix2cd& v, double p) {
    Matrix2cd x_inv = (v * i_omega()).inverse();
    Matrix2cd plus = mat_pow(Matrix2cd::Identity() + x_inv, p);
    Matrix2cd minus = mat_pow(Matrix2cd::Identity() - x_inv, p);
    return (plus + minus) * (plus - minus).inverse() * i_omega();
}

inline std::complex<double> gaussian_partition(const Matrix2cd& v) {
    return std::sqrt(((v + i_omega()) / 2.0).determinant());
}

// Largest imaginary residue tolerated before we refuse to take the
// real part of an intermediate result.
constexpr double kImagTol = 1e-8;

inline double assert_real(std::complex<double> z, const char* what) {
    if (std::abs(z.imag()) > kImagTol * std::max(1.0, std::abs(z.real())))
        throw std::runtime_error(std::string("renyi: complex residue in ") +
                                 what);
    return z.real();
}

}  // namespace detail

// D_alpha(sigma || tau) for single-mode zero-mean Gaussian states, via
// the closed-form Q_alpha of Gaussian states. Both states must be
// mixed (a pure state makes the partition function vanish).
inline double renyi_divergence_1mode(const Eigen::Matrix2d& v_sigma,
                                     const Eigen::Matrix2d& v_tau,
                                     RenyiOrder order) {
    using detail::Matrix2cd;
    const double alpha = order.alpha;
    const Matrix2cd vs = v_sigma.cast<std::complex<double>>();
    const Matrix2cd vt = v_tau.cast<std::complex<double>>();

    const std::complex<double> z_sigma = detail::gaussian_partition(vs);
    const std::complex<double> z_tau = detail::gaussian_partition(vt);
    if (std::abs(z_sigma) < 1e-12 || std::abs(z_tau) < 1e-12)
        throw std::invalid_argument(
            "renyi_divergence_1mode: state too close to pure");

    const Matrix2cd v_tau_beta = detail::power_map(vt, order.beta());

    const Matrix2cd omega = detail::i_omega() / std::complex<double>(0, 1);
    const Matrix2cd vs_omega = vs * omega;
    const Matrix2cd omega_vs = omega * vs;
    const Matrix2cd left =
        detail::mat_pow(Matrix2cd::Identity() + (vs_omega * vs_omega).inverse(),
                        0.5);
    const Matrix2cd right =
        detail::mat_pow(Matrix2cd::Identity() + (omega_vs * omega_vs).inverse(),
                        0.5);
    const Matrix2cd v_xi =
        vs - left * vs * (v_tau_beta + vs).inverse() * vs * right;
    const Matrix2cd v_xi_alpha = detail::power_map(v_xi, alpha);

    const std::complex<double> q =
        detail::gaussian_partition(v_xi_alpha) /
        (std::pow(z_sigma, alpha) * std::pow(z_tau, 1.0 - alpha));
    const double q_real = detail::assert_real(q, "Q_alpha");
    return std::log(q_real) / (alpha - 1.0);
}

inline double renyi_divergence_1mode(const SqueezedThermalParams& sigma,
                                     const SqueezedThermalParams& tau,
                                     RenyiOrder order) {
    return renyi_divergence_1mode(sts_covariance(sigma), sts_covariance(tau),
                                  order);
}

namespace detail {

// Golden-section minimization of a unimodal function on [lo, hi].
template <typename F>
double golden_section_min(F&& f, double lo, double hi, double xtol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// min over (t)-classical tau of D_alpha(sigma || tau), under the
// boundary ansatz: phi_tau = phi_sigma, s_tau pinned to the
// classicality boundary, leaving a 1-D minimization over n_tau.
inline double renyi_min_over_classical(const SqueezedThermalParams& sigma,
                                       double t, RenyiOrder order) {
    if (t <= 0.0 || t > 1.0)
        throw std::invalid_argument("renyi_min_over_classical: t in (0,1]");
    if (is_t_classical(sigma, t, 0.0)) return 0.0;
    // divergence is phase-invariant under a common rotation, so work at phi=0
    const SqueezedThermalParams sig0{sigma.s, sigma.n, 0.0};
    auto objective = [&](double n_tau) {
        n_tau = std::max(n_tau, 1e-9);  // n=0 would be a pure state
        const double s_tau = 0.5 * std::log((2.0 * n_tau + 1.0) / t);
        return renyi_divergence_1mode(sig0, {s_tau, n_tau, 0.0}, order);
    };
    double hi = 10.0 * (sigma.n + 1.0);
    double n_star = detail::golden_section_min(objective, 0.0, hi, 1e-10);
    // expand the bracket if the minimum sits on the upper edge
    while (hi - n_star < 1e-6 * hi && hi < 1e6) {
        hi *= 4.0;
        n_star = detail::golden_section_min(objective, 0.0, hi, 1e-10);
    }
    return std::max(objective(n_star), 0.0);
}

// Scan the simulability bound (2/alpha) D_alpha^min over a grid of
// orders. The inner minimum over t in [1-2q_d, 1] is evaluated on a
// small t-grid rather than assumed to sit at t = 1-2q_d.
inline std::vector<RenyiScanRow> alpha_scan(const SqueezedThermalParams& sigma,
                                            double q_d,
                                            const std::vector<double>& grid) {
    if (q_d < 0.0 || q_d >= 0.5)
        throw std::invalid_argument("alpha_scan: q_d must be in [0, 1/2)");
    const double t_bar = 1.0 - 2.0 * q_d;
    std::vector<RenyiScanRow> rows;
    rows.reserve(grid.size());
    for (double alpha : grid) {
        RenyiOrder order(alpha);
        double d_min = renyi_min_over_classical(sigma, t_bar, order);
        for (int k = 1; k <= 4; ++k) {
            const double t = t_bar + (1.0 - t_bar) * k / 4.0;
            d_min = std::min(d_min, renyi_min_over_classical(sigma, t, order));
        }
        rows.push_back({alpha, d_min, 2.0 / alpha * d_min});
    }
    return rows;
}

inline void write_scan_csv(std::ostream& os,
                           const std::vector<RenyiScanRow>& rows) {
    os << "alpha,d_min,bound\n";
    for (const auto& row : rows)
        os << row.alpha << ',' << row.d_min << ',' << row.bound << '\n';
}

}  // namespace gbsc
