#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

// Covariance-matrix representation of zero-mean Gaussian states.
//
// Conventions used throughout:
//  - hbar = 2, so the vacuum covariance matrix is the identity.
//  - Quadratures are interleaved: x = (q1, p1, ..., qM, pM), with the
//    symplectic form Omega = I_M (x) [[0,-1],[1,0]].
//  - Squeezing phase phi = 0 anti-squeezes q, i.e. the first diagonal
//    entry of a squeezed vacuum covariance is exp(+2s).

namespace gbsc {

struct GaussianState {
    int modes = 0;
    Eigen::MatrixXd cov;  // 2M x 2M, symmetric, zero mean
};

// Single-mode squeezed-thermal-state decomposition: a squeezer (s, phi)
// applied to a thermal state with mean photon number n.
struct SqueezedThermalParams {
    double s = 0.0;    // squeezing magnitude, >= 0
    double n = 0.0;    // mean thermal photon number, >= 0
    double phi = 0.0;  // squeezing phase in [0, 2pi)
};

inline Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = -1.0;
        omega(2 * k + 1, 2 * k) = 1.0;
    }
    return omega;
}

inline GaussianState vacuum(int modes) {
    if (modes < 1) throw std::invalid_argument("vacuum: modes must be >= 1");
    return {modes, Eigen::MatrixXd::Identity(2 * modes, 2 * modes)};
}

// Symplectic eigenvalues, ascending. Vacuum and pure states give 1.
inline std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
    const int m = state.modes;
    Eigen::MatrixXcd iov =
        std::complex<double>(0, 1) * symplectic_form(m) * state.cov;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(iov, false);
    std::vector<double> mags(2 * m);
    for (int k = 0; k < 2 * m; ++k) mags[k] = std::abs(es.eigenvalues()(k));
    std::sort(mags.begin(), mags.end());
    // eigenvalues of i*Omega*V come in +/- pairs of equal magnitude
    std::vector<double> nus(m);
    for (int k = 0; k < m; ++k) nus[k] = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
    return nus;
}

inline bool is_physical(const GaussianState& state, double tol = 1e-9) {
    if (!state.cov.isApprox(state.cov.transpose(), 1e-10) &&
        (state.cov - state.cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        return false;
    auto nus = symplectic_eigenvalues(state);
    return nus.front() >= 1.0 - tol;
}

// (t)-classicality: smallest eigenvalue of V - tI >= -tol, so the
// (t)-ordered quasi-probability distribution is a proper density.
inline bool is_t_classical(const GaussianState& state, double t,
                           double tol = 1e-9) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        state.cov - t * Eigen::MatrixXd::Identity(2 * state.modes,
                                                  2 * state.modes),
        Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

// 2x2 symplectic of the Stoler squeezer S(s, phi); phi = 0 maps the
// q-axis to exp(+s) q.
inline Eigen::Matrix2d squeezing_symplectic(double s, double phi) {
    const double ch = std::cosh(s), sh = std::sinh(s);
    Eigen::Matrix2d sq;
    sq << ch + std::cos(phi) * sh, -std::sin(phi) * sh,
          -std::sin(phi) * sh,     ch - std::cos(phi) * sh;
    return sq;
}

inline GaussianState apply_squeezing(const GaussianState& state, int mode,
                                     double s, double phi) {
    if (mode < 0 || mode >= state.modes)
        throw std::out_of_range("apply_squeezing: bad mode index");
    GaussianState out = state;
    Eigen::Matrix2d sq = squeezing_symplectic(s, phi);
    out.cov.middleRows(2 * mode, 2) = sq * out.cov.middleRows(2 * mode, 2);
    out.cov.middleCols(2 * mode, 2) = out.cov.middleCols(2 * mode, 2) * sq.transpose();
    return out;
}

// Pure-loss channel on one mode: V -> eta V + (1 - eta) I on the
// targeted block, cross-covariances scaled by sqrt(eta).
inline GaussianState apply_loss(const GaussianState& state, int mode,
                                double eta) {
    if (mode < 0 || mode >= state.modes)
        throw std::out_of_range("apply_loss: bad mode index");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("apply_loss: eta must be in [0,1]");
    GaussianState out = state;
    const double root = std::sqrt(eta);
    out.cov.middleRows(2 * mode, 2) *= root;
    out.cov.middleCols(2 * mode, 2) *= root;
    out.cov(2 * mode, 2 * mode) += 1.0 - eta;
    out.cov(2 * mode + 1, 2 * mode + 1) += 1.0 - eta;
    return out;
}

// Orthogonal symplectic of a mode-space unitary U in interleaved
// ordering: each 2x2 block is [[Re U_jk, -Im U_jk], [Im U_jk, Re U_jk]].
inline Eigen::MatrixXd interferometer_symplectic(const Eigen::MatrixXcd& u) {
    const int m = static_cast<int>(u.rows());
    Eigen::MatrixXd o(2 * m, 2 * m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            o(2 * j, 2 * k) = u(j, k).real();
            o(2 * j, 2 * k + 1) = -u(j, k).imag();
            o(2 * j + 1, 2 * k) = u(j, k).imag();
            o(2 * j + 1, 2 * k + 1) = u(j, k).real();
        }
    return o;
}

// Covariance matrix of the squeezed thermal state (s, n, phi).
inline Eigen::Matrix2d sts_covariance(const SqueezedThermalParams& p) {
    Eigen::Matrix2d sq = squeezing_symplectic(p.s, p.phi);
    return (2.0 * p.n + 1.0) * sq * sq.transpose();
}

// Decompose a single-mode covariance into squeezed-thermal parameters.
inline SqueezedThermalParams decompose_sts(const Eigen::Matrix2d& v) {
    const double det = v.determinant();
    if (det < 1.0 - 1e-9)
        throw std::invalid_argument("decompose_sts: unphysical marginal");
    const double nbar = 0.5 * (std::sqrt(std::max(det, 1.0)) - 1.0);
    const double scale = 2.0 * nbar + 1.0;
    const double cosh2s = std::max(v.trace() / (2.0 * scale), 1.0);
    const double s = 0.5 * std::acosh(cosh2s);
    if (s < 1e-12) return {0.0, nbar, 0.0};
    const double sinh2s = std::sinh(2.0 * s);
    const double cphi = (v(0, 0) - v(1, 1)) / (2.0 * scale * sinh2s);
    const double sphi = -v(0, 1) / (scale * sinh2s);
    double phi = std::atan2(sphi, cphi);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    return {s, nbar, phi};
}

inline SqueezedThermalParams to_sts(const GaussianState& state, int mode) {
    if (mode < 0 || mode >= state.modes)
        throw std::out_of_range("to_sts: bad mode index");
    return decompose_sts(state.cov.block<2, 2>(2 * mode, 2 * mode));
}

// (t)-classicality of a squeezed thermal state: s <= (1/2) ln((2n+1)/t).
inline bool is_t_classical(const SqueezedThermalParams& p, double t,
                           double tol = 1e-9) {
    return p.s <= 0.5 * std::log((2.0 * p.n + 1.0) / t) + tol;
}

}  // namespace gbsc
