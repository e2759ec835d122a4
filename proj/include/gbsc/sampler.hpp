#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gbsc/classicality.hpp"
#include "gbsc/gaussian_state.hpp"
#include "gbsc/interferometer.hpp"

// The efficient approximate sampler: build the closest-classical
// surrogate output covariance, draw phase-space points from its
// (t_bar)-ordered quasi-probability density (a normal density with
// covariance V - t_bar I), then draw per-mode threshold-detector
// outcomes. Setup is O(M^3); each shot is O(M) after setup.

namespace gbsc {

struct ExperimentConfig {
    NoiseParams noise;
    DetectorModel detector;
    InterferometerSpec interferometer;
    double epsilon = 0.0;

    void validate() const {
        noise.validate();
        detector.validate();
        if (interferometer.modes() != noise.modes)
            throw std::invalid_argument(
                "config: interferometer dimension must equal M");
        if (epsilon < 0.0 || epsilon > 1.0)
            throw std::invalid_argument("config: epsilon must be in [0,1]");
    }
};

struct PhaseSpacePoint {
    Eigen::VectorXd x;  // length 2M
};

struct ClickPattern {
    std::vector<std::uint8_t> n;  // entries in {0,1}, 1 = click
};

// Thrown when the classicality test fails and the algorithm aborts
// before producing samples.
class SimulabilityError : public std::runtime_error {
  public:
    SimulabilityError(ClassicalityVerdict verdict, double epsilon)
        : std::runtime_error("classicality test failed: eps_min = " +
                             std::to_string(verdict.eps_min) +
                             " >= epsilon = " + std::to_string(epsilon)),
          verdict_(verdict) {}
    const ClassicalityVerdict& verdict() const { return verdict_; }

  private:
    ClassicalityVerdict verdict_;
};

// Covariance of the surrogate state: the closest (t_bar)-classical
// state on each squeezed input, vacuum elsewhere, pushed through the
// interferometer. Aborts when the classicality test fails unless
// enforce_simulability is false (the surrogate itself is always defined).
inline GaussianState surrogate_output_covariance(
    const ExperimentConfig& config, bool enforce_simulability = true) {
    config.validate();
    if (enforce_simulability) {
        const ClassicalityVerdict verdict = classicality_test(
            config.noise, config.detector, config.epsilon);
        if (!verdict.simulable) throw SimulabilityError(verdict, config.epsilon);
    }

    const double t_bar = config.detector.t_bar();
    const SqueezedThermalParams sigma =
        lossy_squeezed_params(config.noise.r, config.noise.eta);
    const SqueezedThermalParams tau = closest_classical_state(sigma, t_bar).tau;

    GaussianState state = vacuum(config.noise.modes);
    const Eigen::Matrix2d block = sts_covariance(tau);
    for (int k = 0; k < config.noise.squeezers; ++k)
        state.cov.block<2, 2>(2 * k, 2 * k) = block;
    return apply_interferometer(state, config.interferometer);
}

// Samples from N(0, V - t_bar I) via eigendecomposition, drawing only
// along directions with eigenvalue above 1e-12 (boundary states have
// legitimately degenerate directions). Deterministic given the seed.
class PhaseSpaceSampler {
  public:
    PhaseSpaceSampler(const GaussianState& state, double t_bar) {
        const int dim = 2 * state.modes;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            state.cov - t_bar * Eigen::MatrixXd::Identity(dim, dim));
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument(
                "PhaseSpaceSampler: V - t_bar I indefinite beyond tolerance");
        scaled_basis_ = es.eigenvectors() *
                        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        for (int k = 0; k < dim; ++k)
            if (std::sqrt(std::max(es.eigenvalues()(k), 0.0)) < 1e-12)
                scaled_basis_.col(k).setZero();
    }

    template <typename Rng>
    Eigen::VectorXd draw(Rng& rng) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd z(scaled_basis_.cols());
        for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
        return scaled_basis_ * z;
    }

  private:
    Eigen::MatrixXd scaled_basis_;
};

inline std::vector<PhaseSpacePoint> sample_phase_space(
    const GaussianState& state, double t_bar, std::uint64_t seed, int count) {
    PhaseSpaceSampler sampler(state, t_bar);
    std::mt19937_64 rng(seed);
    std::vector<PhaseSpacePoint> points;
    points.reserve(count);
    for (int k = 0; k < count; ++k) points.push_back({sampler.draw(rng)});
    return points;
}

// No-click probability of a threshold detector given the phase-space
// point of its mode, from the dual-ordered detector PQD at t = t_bar:
// p0 = (1-p_d)/(1 - eta_d (1-t_bar)/2) exp[-eta_d |x|^2 / (4 (1 - eta_d (1-t_bar)/2))],
// clamped to [0,1].
inline double detector_no_click_prob(const Eigen::Vector2d& x_mode,
                                     const DetectorModel& det, double t_bar) {
    const double denom = 1.0 - det.eta_d * (1.0 - t_bar) / 2.0;
    if (denom <= 0.0)
        throw std::invalid_argument("detector_no_click_prob: denominator <= 0");
    const double p0 = (1.0 - det.p_d) / denom *
                      std::exp(-det.eta_d * x_mode.squaredNorm() / (4.0 * denom));
    return std::clamp(p0, 0.0, 1.0);
}

namespace detail {

// splitmix64, used to derive independent per-batch stream seeds
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Shots are generated in fixed-size batches, each from its own seeded
// stream, so the output is identical for any thread count.
inline std::vector<ClickPattern> sample(const ExperimentConfig& config,
                                        int shots, std::uint64_t seed,
                                        int threads = 1) {
    const GaussianState surrogate = surrogate_output_covariance(config);
    const double t_bar = config.detector.t_bar();
    const PhaseSpaceSampler phase_sampler(surrogate, t_bar);
    const int m = config.noise.modes;

    constexpr int kBatch = 1024;
    std::vector<ClickPattern> out(shots);
    const int batches = (shots + kBatch - 1) / kBatch;

    auto run_batch = [&](int batch) {
        std::mt19937_64 rng(detail::mix_seed(seed + 0x51ed2700ULL * batch));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const int begin = batch * kBatch;
        const int end = std::min(begin + kBatch, shots);
        for (int shot = begin; shot < end; ++shot) {
            const Eigen::VectorXd x = phase_sampler.draw(rng);
            ClickPattern pattern;
            pattern.n.resize(m);
            for (int i = 0; i < m; ++i) {
                const double p0 = detector_no_click_prob(
                    x.segment<2>(2 * i), config.detector, t_bar);
                pattern.n[i] = uniform(rng) < p0 ? 0 : 1;
            }
            out[shot] = std::move(pattern);
        }
    };

    if (threads <= 1 || batches <= 1) {
        for (int batch = 0; batch < batches; ++batch) run_batch(batch);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int workers = std::min(threads, batches);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < batches;
                     b = next.fetch_add(1))
                    run_batch(b);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace gbsc
