#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "gbsc/gaussian_state.hpp"

// Classicality test for noisy Gaussian boson sampling: given the input
// squeezing, the overall transmission and the detector quality, decide
// whether the experiment admits an efficient classical simulation with
// total-variation error below a requested epsilon, and construct the
// closest classical surrogate state.

namespace gbsc {

// Noise parameters of the source and circuit: K squeezers with
// squeezing r feeding an M-mode interferometer, all losses folded into
// a single transmission eta = eta_source * eta_interferometer.
struct NoiseParams {
    double r = 0.0;
    double eta = 1.0;
    int squeezers = 0;  // K
    int modes = 0;      // M >= K

    void validate() const {
        if (r < 0.0) throw std::invalid_argument("noise: r must be >= 0");
        if (eta < 0.0 || eta > 1.0)
            throw std::invalid_argument("noise: eta must be in [0,1]");
        if (squeezers < 1 || modes < squeezers)
            throw std::invalid_argument("noise: need 1 <= K <= M");
    }
};

// Threshold detector with quantum efficiency eta_d and dark-count
// probability p_d. quality() = p_d / eta_d must stay below 1/2 so the
// ordering threshold t_bar = 1 - 2 p_d / eta_d is positive.
struct DetectorModel {
    double eta_d = 1.0;
    double p_d = 0.0;

    double quality() const { return p_d / eta_d; }
    double t_bar() const { return 1.0 - 2.0 * quality(); }

    void validate() const {
        if (eta_d <= 0.0 || eta_d > 1.0)
            throw std::invalid_argument("detector: eta_d must be in (0,1]");
        if (p_d < 0.0 || quality() >= 0.5)
            throw std::invalid_argument("detector: need 0 <= p_d/eta_d < 1/2");
    }
};

struct ClassicalityVerdict {
    double f_max = 1.0;
    double eps_min = 0.0;       // smallest guaranteed simulation error
    double eta_infinity = 1.0;  // exact-simulation transmission threshold
    bool simulable = false;     // at the requested epsilon
};

inline void to_json(nlohmann::json& j, const ClassicalityVerdict& v) {
    j = {{"f_max", v.f_max},
         {"eps_min", v.eps_min},
         {"eta_infinity", v.eta_infinity},
         {"simulable", v.simulable}};
}

inline double ramp(double x) { return x > 0.0 ? x : 0.0; }

// STS parameters of a squeezed vacuum after a loss channel:
// V = diag(a+, a-) with a_pm = eta exp(+-2r) + 1 - eta.
inline SqueezedThermalParams lossy_squeezed_params(double r, double eta) {
    const double ap = eta * std::exp(2.0 * r) + 1.0 - eta;
    const double am = eta * std::exp(-2.0 * r) + 1.0 - eta;
    return {0.25 * std::log(ap / am), 0.5 * (std::sqrt(ap * am) - 1.0), 0.0};
}

// Uhlmann fidelity (squared convention) between two single-mode
// zero-mean Gaussian states with aligned squeezing axes:
// F = 1 / (sqrt(Delta + Lambda) - sqrt(Lambda)).
inline double gaussian_fidelity_1mode(const SqueezedThermalParams& a,
                                      const SqueezedThermalParams& b) {
    if (std::abs(std::remainder(a.phi - b.phi, 2.0 * std::numbers::pi)) > 1e-9)
        throw std::invalid_argument(
            "gaussian_fidelity_1mode: squeezing axes must be aligned");
    const double delta = (a.n - b.n) * (a.n - b.n) +
                         (2.0 * a.n + 1.0) * (2.0 * b.n + 1.0) *
                             std::cosh(a.s - b.s) * std::cosh(a.s - b.s);
    const double lambda =
        4.0 * a.n * (a.n + 1.0) * b.n * (b.n + 1.0);
    return 1.0 / (std::sqrt(delta + lambda) - std::sqrt(lambda));
}

struct ClosestClassicalResult {
    SqueezedThermalParams tau;
    double fidelity = 1.0;
};

// The (t)-classical single-mode Gaussian state of maximal fidelity to
// sigma. If sigma is already (t)-classical the optimum is sigma itself;
// otherwise the optimum sits on the classicality boundary
// s_tau = (1/2) ln((2 n_tau + 1)/t) at
// n_tau = -1/2 + (1/2) sqrt(1 + 2 t sinh(2 s_c) exp(2 s_sigma)),
// s_c = (1/2) ln(2 n_sigma + 1), with fidelity
// sech(s_sigma - (1/2) ln((2 n_sigma + 1)/t)).
inline ClosestClassicalResult closest_classical_state(
    const SqueezedThermalParams& sigma, double t) {
    if (t <= 0.0 || t > 1.0)
        throw std::invalid_argument("closest_classical_state: t in (0,1]");
    const double excess = sigma.s - 0.5 * std::log((2.0 * sigma.n + 1.0) / t);
    if (excess <= 0.0) return {sigma, 1.0};
    const double sc = 0.5 * std::log(2.0 * sigma.n + 1.0);
    const double n_tau =
        -0.5 + 0.5 * std::sqrt(1.0 + 2.0 * t * std::sinh(2.0 * sc) *
                                         std::exp(2.0 * sigma.s));
    const double s_tau = 0.5 * std::log((2.0 * n_tau + 1.0) / t);
    return {{s_tau, n_tau, sigma.phi}, 1.0 / std::cosh(excess)};
}

// Maximal fidelity between the lossy squeezed state and any
// (t)-classical state with t in [1 - 2 q_d, 1]:
// F_max = sech[(1/2) ramp(ln((1 - 2 q_d)/(eta exp(-2r) + 1 - eta)))].
inline double f_max(double r, double eta, double q_d) {
    const double am = eta * std::exp(-2.0 * r) + 1.0 - eta;
    return 1.0 / std::cosh(0.5 * ramp(std::log((1.0 - 2.0 * q_d) / am)));
}

// The classicality test: the experiment is simulable with error
// epsilon when F_max > exp(-epsilon^2 / 4K), equivalently
// eps_min = 2 sqrt(K * (-ln F_max)) < epsilon (strict).
inline ClassicalityVerdict classicality_test(const NoiseParams& noise,
                                             const DetectorModel& det,
                                             double epsilon) {
    noise.validate();
    det.validate();
    ClassicalityVerdict v;
    v.f_max = f_max(noise.r, noise.eta, det.quality());
    v.eps_min =
        2.0 * std::sqrt(noise.squeezers * (-std::log(v.f_max)));
    // r = 0 means vacuum inputs: always simulable, threshold reported as 1
    v.eta_infinity = noise.r > 0.0
                         ? det.quality() * (1.0 + 1.0 / std::tanh(noise.r))
                         : 1.0;
    v.simulable = v.eps_min < epsilon;
    return v;
}

// First-order large-K transmission threshold:
// eta_infinity + (1 - 2 q_d)/(1 - exp(-2r)) * epsilon / sqrt(2K).
// Caller clamps to 1 for display.
inline double asymptotic_threshold(double r, double q_d, int squeezers,
                                   double epsilon) {
    if (r <= 0.0)
        throw std::invalid_argument("asymptotic_threshold: r must be > 0");
    const double eta_inf = q_d * (1.0 + 1.0 / std::tanh(r));
    return eta_inf + (1.0 - 2.0 * q_d) / (1.0 - std::exp(-2.0 * r)) *
                         epsilon / std::sqrt(2.0 * squeezers);
}

// Probability of generating S photon pairs from K/2 two-mode squeezers:
// a negative binomial, F(S) = C(K/2+S-1, S) sech^K(r) tanh^(2S)(r).
// The tanh exponent is 2S: that is the exponent under which the
// distribution normalizes and has mean (K/2) sinh^2(r).
inline double pair_distribution(int squeezers, double r, int pairs) {
    if (squeezers < 1 || pairs < 0)
        throw std::invalid_argument("pair_distribution: K >= 1, S >= 0");
    if (r == 0.0) return pairs == 0 ? 1.0 : 0.0;
    const double half_k = 0.5 * squeezers;
    const double log_binom = std::lgamma(half_k + pairs) -
                             std::lgamma(pairs + 1.0) - std::lgamma(half_k);
    return std::exp(log_binom + squeezers * std::log(1.0 / std::cosh(r)) +
                    2.0 * pairs * std::log(std::tanh(r)));
}

// Haar-averaged collision probability bound (32/M) <S^2>, with
// <S^2> = mean^2 + variance of the pair distribution.
inline double collision_bound(int squeezers, double r, int modes) {
    if (modes < 1) throw std::invalid_argument("collision_bound: M >= 1");
    const double sh2 = std::sinh(r) * std::sinh(r);
    const double ch2 = std::cosh(r) * std::cosh(r);
    const double mean = 0.5 * squeezers * sh2;
    const double var = 0.5 * squeezers * sh2 * ch2;
    return 32.0 / modes * (mean * mean + var);
}

}  // namespace gbsc
