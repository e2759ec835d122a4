// Acceptance battery: one pass/fail line per criterion, nonzero exit if
// any criterion fails. Tolerances are pinned in the assertions below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "gbsc/classicality.hpp"
#include "gbsc/interferometer.hpp"
#include "gbsc/oracle.hpp"
#include "gbsc/renyi.hpp"
#include "gbsc/sampler.hpp"

using namespace gbsc;

namespace {

int failures = 0;

void report(const char* name, bool pass, double elapsed_s,
            const std::string& detail) {
    std::printf("[%s] %-28s (%.2fs) %s\n", pass ? "PASS" : "FAIL", name,
                elapsed_s, detail.c_str());
    if (!pass) ++failures;
}

template <typename F>
void criterion(const char* name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report(name, pass, elapsed, detail);
}

double chi_square_p_value(const Eigen::VectorXd& expected,
                          const Eigen::VectorXd& counts, double shots) {
    // pool bins with expected count below 5 into one remainder bin
    double stat = 0.0, pooled_e = 0.0, pooled_c = 0.0;
    int dof = -1;
    for (Eigen::Index k = 0; k < expected.size(); ++k) {
        const double e = expected(k) * shots;
        if (e < 5.0) {
            pooled_e += e;
            pooled_c += counts(k);
            continue;
        }
        const double d = counts(k) - e;
        stat += d * d / e;
        ++dof;
    }
    if (pooled_e >= 5.0) {
        const double d = pooled_c - pooled_e;
        stat += d * d / pooled_e;
        ++dof;
    }
    if (dof < 1) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

GaussianState product_input(const NoiseParams& noise) {
    auto state = vacuum(noise.modes);
    const Eigen::Matrix2d block =
        sts_covariance(lossy_squeezed_params(noise.r, noise.eta));
    for (int k = 0; k < noise.squeezers; ++k)
        state.cov.block<2, 2>(2 * k, 2 * k) = block;
    return state;
}

}  // namespace

int main() {
    criterion("1 Paesani case study", [](std::string& detail) {
        const auto verdict =
            classicality_test({0.1, 0.088, 4, 12}, {0.78, 1e-4}, 0.03);
        detail = "eps_min = " + std::to_string(verdict.eps_min);
        return std::abs(verdict.eps_min - 0.0224) <= 5e-4 && verdict.simulable;
    });

    criterion("2 Zhong case study", [](std::string& detail) {
        const auto verdict =
            classicality_test({0.38, 0.89, 6, 12}, {0.82, 1e-4}, 1.0);
        detail = "eps_min = " + std::to_string(verdict.eps_min);
        return std::abs(verdict.eps_min - 1.102) <= 3e-3 && !verdict.simulable &&
               verdict.eps_min > 1.0;
    });

    criterion("3 analytic vs numeric F_max", [](std::string& detail) {
        std::mt19937_64 rng(1001);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const double r = 1.5 * uni(rng);
            const double eta = uni(rng);
            const double q_d = 0.1 * uni(rng);
            const double t = 1.0 - 2.0 * q_d;
            const auto sigma = lossy_squeezed_params(r, eta);
            auto neg_fid = [&](double n_tau) {
                n_tau = std::max(n_tau, 0.0);
                const double s_bound =
                    0.5 * std::log((2.0 * n_tau + 1.0) / t);
                return -gaussian_fidelity_1mode(
                    sigma, {std::min(sigma.s, s_bound), n_tau, 0.0});
            };
            const double n_star = detail::golden_section_min(
                neg_fid, 0.0, 10.0 * (sigma.n + 1.0), 1e-12);
            worst = std::max(worst,
                             std::abs(f_max(r, eta, q_d) + neg_fid(n_star)));
        }
        detail = "max |analytic - numeric| = " + std::to_string(worst);
        return worst < 1e-8;
    });

    criterion("4 fidelity vs Fock oracle", [](std::string& detail) {
        std::mt19937_64 rng(1002);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            SqueezedThermalParams a{uni(rng), 0.02 + 1.98 * uni(rng), 0.0};
            SqueezedThermalParams b{uni(rng), 0.02 + 1.98 * uni(rng), 0.0};
            worst = std::max(worst, std::abs(gaussian_fidelity_1mode(a, b) -
                                             fock_fidelity(a, b, 120)));
        }
        detail = "max error = " + std::to_string(worst);
        return worst < 1e-6;
    });

    criterion("5 Renyi consistency", [](std::string& detail) {
        std::mt19937_64 rng(1003);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst_half = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            SqueezedThermalParams a{uni(rng), 0.05 + 1.95 * uni(rng), 0.0};
            SqueezedThermalParams b{uni(rng), 0.05 + 1.95 * uni(rng), 0.0};
            const double d = renyi_divergence_1mode(a, b, RenyiOrder(0.5));
            worst_half = std::max(
                worst_half,
                std::abs(d + std::log(gaussian_fidelity_1mode(a, b))));
        }
        if (worst_half >= 1e-8) {
            detail = "D_1/2 vs -ln F error " + std::to_string(worst_half);
            return false;
        }

        const std::vector<double> grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999};
        for (int trial = 0; trial < 20; ++trial) {
            SqueezedThermalParams a{uni(rng), 0.05 + uni(rng), 0.0};
            SqueezedThermalParams b{uni(rng), 0.05 + uni(rng), 0.0};
            double prev = -1.0;
            for (double alpha : grid) {
                const double d =
                    renyi_divergence_1mode(a, b, RenyiOrder(alpha));
                if (d < prev - 1e-10) {
                    detail = "monotonicity violated";
                    return false;
                }
                prev = d;
            }
        }

        // 1 dB of squeezing across a transmission sweep, both detector grades
        const double r_1db = std::log(10.0) / 20.0;
        for (double q_d : {1e-2, 0.0}) {
            for (double eta = 0.1; eta <= 0.9; eta += 0.1) {
                const auto rows =
                    alpha_scan(lossy_squeezed_params(r_1db, eta), q_d, grid);
                if (rows[0].bound == 0.0) continue;
                for (std::size_t k = 1; k < rows.size(); ++k)
                    if (rows[0].bound > rows[k].bound + 1e-12) {
                        detail = "bound not minimized at alpha=0.5";
                        return false;
                    }
            }
        }
        detail = "D_1/2 error " + std::to_string(worst_half);
        return true;
    });

    criterion("6 sampler vs exact oracle", [](std::string& detail) {
        double worst_tv = 0.0, worst_p = 1.0;
        int tested = 0;
        std::mt19937_64 rng(1004);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int trial = 0; tested < 10 && trial < 200; ++trial) {
            const int modes = 2 + trial % 3;  // M in {2,3,4}
            ExperimentConfig config;
            config.noise = {0.1 + 0.25 * uni(rng), 0.05 + 0.4 * uni(rng),
                            1 + trial % 2, modes};
            config.detector = {0.6 + 0.35 * uni(rng), 1e-3};
            config.interferometer = InterferometerSpec::haar(modes, rng());
            config.epsilon = 1.0;
            if (!classicality_test(config.noise, config.detector, 1.0)
                     .simulable)
                continue;
            ++tested;

            const int shots = 100000;
            const auto patterns = sample(config, shots, 9000 + trial);
            Eigen::VectorXd counts = Eigen::VectorXd::Zero(1 << modes);
            for (const auto& pattern : patterns) {
                int index = 0;
                for (int i = 0; i < modes; ++i)
                    index = (index << 1) | pattern.n[i];
                counts(index) += 1.0;
            }
            const auto exact = exact_distribution(
                surrogate_output_covariance(config), config.detector);
            const double tv =
                0.5 * (counts / shots - exact.probs).cwiseAbs().sum();
            const double p_value =
                chi_square_p_value(exact.probs, counts, shots);
            worst_tv = std::max(worst_tv, tv);
            worst_p = std::min(worst_p, p_value);
        }
        detail = "configs = " + std::to_string(tested) +
                 ", max TV = " + std::to_string(worst_tv) +
                 ", min p = " + std::to_string(worst_p);
        return tested == 10 && worst_tv < 0.01 && worst_p > 0.001;
    });

    criterion("7 end-to-end TV bound", [](std::string& detail) {
        std::mt19937_64 rng(1005);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int tested = 0;
        double worst_margin = -1e300;
        for (int trial = 0; tested < 10 && trial < 300; ++trial) {
            const int modes = 2 + trial % 5;  // M in {2..6}
            ExperimentConfig config;
            config.noise = {0.05 + 0.3 * uni(rng), 0.02 + 0.12 * uni(rng),
                            std::max(1, modes / 2), modes};
            config.detector = {0.6 + 0.35 * uni(rng), 1e-4};
            config.interferometer = InterferometerSpec::haar(modes, rng());
            const auto verdict =
                classicality_test(config.noise, config.detector, 1.0);
            if (!verdict.simulable) continue;
            config.epsilon = 1.0;
            ++tested;

            const auto p_true = exact_distribution(
                apply_interferometer(product_input(config.noise),
                                     config.interferometer),
                config.detector);
            const auto p_surrogate = exact_distribution(
                surrogate_output_covariance(config), config.detector);
            worst_margin = std::max(worst_margin,
                                    total_variation(p_true, p_surrogate) -
                                        verdict.eps_min);
        }
        detail = "configs = " + std::to_string(tested) +
                 ", max TV - eps_min = " + std::to_string(worst_margin);
        return tested == 10 && worst_margin <= 1e-12;
    });

    criterion("8 pair distribution", [](std::string& detail) {
        for (int k : {2, 4, 8}) {
            for (double r : {0.1, 0.5, 1.0}) {
                double sum = 0.0, mean = 0.0;
                for (int s = 0; s < 4000; ++s) {
                    const double f = pair_distribution(k, r, s);
                    sum += f;
                    mean += s * f;
                    if (s > 10 && f < 1e-13) break;
                }
                if (std::abs(sum - 1.0) > 1e-10 ||
                    std::abs(mean - 0.5 * k * std::sinh(r) * std::sinh(r)) >
                        1e-8) {
                    detail = "normalization/mean failed at K=" +
                             std::to_string(k) + ", r=" + std::to_string(r);
                    return false;
                }
            }
        }
        const double bound = collision_bound(4, 0.5, 100);
        detail = "collision bound = " + std::to_string(bound);
        return std::abs(bound - 0.3154) <= 1e-4;
    });

    criterion("9 oracle quadrature self-test", [](std::string& detail) {
        std::mt19937_64 rng(1006);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const int modes = 1 + trial % 2;
            auto state = vacuum(modes);
            for (int m = 0; m < modes; ++m) {
                state = apply_squeezing(state, m, 0.8 * uni(rng),
                                        2 * std::numbers::pi * uni(rng));
                state = apply_loss(state, m, uni(rng));
            }
            if (modes == 2)
                state = apply_interferometer(
                    state, InterferometerSpec::haar(2, rng()));
            DetectorModel det{0.5 + 0.45 * uni(rng), 2e-3 * uni(rng)};
            for (int mask = 1; mask < (1 << modes); ++mask) {
                std::vector<int> subset;
                for (int i = 0; i < modes; ++i)
                    if (mask & (1 << i)) subset.push_back(i);
                worst = std::max(
                    worst,
                    std::abs(no_click_probability(state, det, subset) -
                             no_click_probability_quadrature(state, det,
                                                             subset)));
            }
        }
        detail = "max |closed - quadrature| = " + std::to_string(worst);
        return worst < 1e-7;
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
