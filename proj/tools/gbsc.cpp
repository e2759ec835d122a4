// gbsc: classicality testing and approximate classical sampling for
// noisy Gaussian boson sampling experiments.
//
// Exit codes: 0 success/simulable, 2 classicality test failed,
// 1 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include "gbsc/classicality.hpp"
#include "gbsc/config.hpp"
#include "gbsc/oracle.hpp"
#include "gbsc/renyi.hpp"
#include "gbsc/sampler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitTestFailed = 2;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("GBSC_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

nlohmann::json error_record(const std::string& message) {
    return {{"error", message}};
}

int cmd_test(const std::string& config_path, double epsilon_override) {
    auto config = gbsc::load_experiment_config(config_path);
    if (epsilon_override >= 0.0) config.epsilon = epsilon_override;
    const auto verdict = gbsc::classicality_test(config.noise, config.detector,
                                                 config.epsilon);
    std::cout << nlohmann::json(verdict).dump(2) << '\n';
    return verdict.simulable ? kExitOk : kExitTestFailed;
}

int cmd_sample(const std::string& config_path, int shots, std::uint64_t seed,
               const std::string& out_path, int threads) {
    const auto config = gbsc::load_experiment_config(config_path);
    std::vector<gbsc::ClickPattern> patterns;
    gbsc::ClassicalityVerdict verdict;
    try {
        verdict = gbsc::classicality_test(config.noise, config.detector,
                                          config.epsilon);
        patterns = gbsc::sample(config, shots, seed, threads);
    } catch (const gbsc::SimulabilityError& e) {
        std::cerr << error_record(e.what()).dump() << '\n';
        return kExitTestFailed;
    }

    std::ofstream out(out_path);
    if (!out) {
        std::cerr << error_record("cannot open output file " + out_path).dump()
                  << '\n';
        return kExitInputError;
    }
    for (const auto& pattern : patterns) {
        nlohmann::json line = {{"n", pattern.n}};
        out << line.dump() << '\n';
    }

    nlohmann::json meta = {{"config_hash", gbsc::config_hash(config)},
                           {"seed", seed},
                           {"shots", shots},
                           {"eps_min", verdict.eps_min},
                           {"f_max", verdict.f_max}};
    std::ofstream meta_out(out_path + ".meta.json");
    meta_out << meta.dump(2) << '\n';
    return kExitOk;
}

int cmd_scan_alpha(double r, double eta, double q_d,
                   const std::vector<double>& grid) {
    for (double alpha : grid)
        if (alpha < 0.5 || alpha >= 1.0)
            throw gbsc::ConfigError("scan-alpha: grid values must be in [0.5, 1)");
    const auto sigma = gbsc::lossy_squeezed_params(r, eta);
    const auto rows = gbsc::alpha_scan(sigma, q_d, grid);
    gbsc::write_scan_csv(std::cout, rows);
    return kExitOk;
}

int cmd_exact(const std::string& config_path) {
    const auto config = gbsc::load_experiment_config(config_path);
    if (config.noise.modes > 14)
        throw gbsc::ConfigError(
            "exact: M > 14 not supported (cost is 2^M determinants)");

    auto input = gbsc::vacuum(config.noise.modes);
    const auto sigma =
        gbsc::lossy_squeezed_params(config.noise.r, config.noise.eta);
    const Eigen::Matrix2d block = gbsc::sts_covariance(sigma);
    for (int k = 0; k < config.noise.squeezers; ++k)
        input.cov.block<2, 2>(2 * k, 2 * k) = block;
    const auto rho_out =
        gbsc::apply_interferometer(input, config.interferometer);
    const auto p_true = gbsc::exact_distribution(rho_out, config.detector);

    nlohmann::json result = {
        {"M", config.noise.modes},
        {"probs", std::vector<double>(p_true.probs.begin(),
                                      p_true.probs.end())}};

    // the surrogate is always defined, even when the test fails
    result["verdict"] = gbsc::classicality_test(config.noise, config.detector,
                                                config.epsilon);
    const auto surrogate = gbsc::surrogate_output_covariance(
        config, /*enforce_simulability=*/false);
    const auto p_sur = gbsc::exact_distribution(surrogate, config.detector);
    result["surrogate_probs"] =
        std::vector<double>(p_sur.probs.begin(), p_sur.probs.end());
    result["total_variation"] = gbsc::total_variation(p_true, p_sur);
    std::cout << result.dump(2) << '\n';
    return kExitOk;
}

double chi_square_p_value(const Eigen::VectorXd& expected,
                          const Eigen::VectorXd& counts, double shots) {
    double stat = 0.0;
    int dof = -1;
    for (Eigen::Index k = 0; k < expected.size(); ++k) {
        const double e = expected(k) * shots;
        if (e < 1e-9) continue;
        const double d = counts(k) - e;
        stat += d * d / e;
        ++dof;
    }
    if (dof < 1) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

// Randomized sampler-vs-oracle battery at desk scale: for a handful of
// seeded configs, check TV(empirical, exact surrogate), the chi-square
// fit, and the central bound TV(P, P_tilde) <= eps_min.
int cmd_validate(int modes, std::uint64_t seed, int shots, int threads) {
    if (modes < 1 || modes > 6)
        throw gbsc::ConfigError("validate: modes must be in [1, 6]");
    nlohmann::json report;
    report["instances"] = nlohmann::json::array();
    bool all_pass = true;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int inst = 0; inst < 5; ++inst) {
        gbsc::ExperimentConfig config;
        config.noise.modes = modes;
        config.noise.squeezers = std::max(1, modes / 2);
        config.noise.r = 0.1 + 0.3 * uni(rng);
        config.noise.eta = 0.02 + 0.1 * uni(rng);
        config.detector.eta_d = 0.6 + 0.35 * uni(rng);
        config.detector.p_d = 1e-4;
        config.interferometer = gbsc::InterferometerSpec::haar(modes, rng());
        const auto verdict = gbsc::classicality_test(
            config.noise, config.detector, 1.0);
        config.epsilon = std::min(1.0, 2.0 * verdict.eps_min + 1e-3);

        const auto surrogate = gbsc::surrogate_output_covariance(config);
        const auto p_surrogate =
            gbsc::exact_distribution(surrogate, config.detector);

        auto rho_in = gbsc::vacuum(modes);
        const Eigen::Matrix2d block = gbsc::sts_covariance(
            gbsc::lossy_squeezed_params(config.noise.r, config.noise.eta));
        for (int k = 0; k < config.noise.squeezers; ++k)
            rho_in.cov.block<2, 2>(2 * k, 2 * k) = block;
        const auto p_true = gbsc::exact_distribution(
            gbsc::apply_interferometer(rho_in, config.interferometer),
            config.detector);

        const auto patterns = gbsc::sample(config, shots, rng(), threads);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(1 << modes);
        for (const auto& pattern : patterns) {
            int index = 0;
            for (int i = 0; i < modes; ++i)
                index = (index << 1) | pattern.n[i];
            counts(index) += 1.0;
        }
        const gbsc::ExactDistribution empirical{modes, counts / shots};

        const double tv_emp = gbsc::total_variation(empirical, p_surrogate);
        const double tv_bound = gbsc::total_variation(p_true, p_surrogate);
        const double p_value =
            chi_square_p_value(p_surrogate.probs, counts, shots);

        const bool pass = tv_emp < 0.02 && p_value > 0.001 &&
                          tv_bound <= verdict.eps_min + 1e-12;
        all_pass = all_pass && pass;
        report["instances"].push_back(
            {{"K", config.noise.squeezers},
             {"r", config.noise.r},
             {"eta", config.noise.eta},
             {"eps_min", verdict.eps_min},
             {"tv_empirical_vs_surrogate", tv_emp},
             {"tv_true_vs_surrogate", tv_bound},
             {"bound_satisfied", tv_bound <= verdict.eps_min + 1e-12},
             {"chi_square_p_value", p_value},
             {"pass", pass}});
    }
    report["all_pass"] = all_pass;
    std::cout << report.dump(2) << '\n';
    return all_pass ? kExitOk : kExitTestFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classicality testing and approximate classical sampling "
                 "for noisy Gaussian boson sampling"};
    app.require_subcommand(1);
    int threads_flag = 0;
    app.add_option("--threads", threads_flag,
                   "worker threads (fallback: GBSC_THREADS env, default 1)");

    std::string config_path;
    double epsilon_override = -1.0;
    auto* test = app.add_subcommand("test", "run the classicality test");
    test->add_option("config", config_path, "experiment config JSON")
        ->required();
    test->add_option("--epsilon", epsilon_override,
                     "override the config's target error");

    std::string sample_config, sample_out;
    int shots = 1000;
    std::uint64_t seed = 0;
    auto* sample = app.add_subcommand("sample", "draw click patterns (JSONL)");
    sample->add_option("config", sample_config)->required();
    sample->add_option("--shots", shots)->required();
    sample->add_option("--seed", seed)->required();
    sample->add_option("--out", sample_out)->required();

    double scan_r = 0.0, scan_eta = 0.0, scan_qd = 0.0;
    std::vector<double> scan_grid;
    auto* scan = app.add_subcommand("scan-alpha",
                                    "Renyi-order scan of the error bound (CSV)");
    scan->add_option("--r", scan_r)->required();
    scan->add_option("--eta", scan_eta)->required();
    scan->add_option("--q-d", scan_qd)->required();
    scan->add_option("--grid", scan_grid, "alpha grid in [0.5, 1)")
        ->required()
        ->delimiter(',');

    int validate_modes = 4, validate_shots = 100000;
    std::uint64_t validate_seed = 1;
    auto* validate =
        app.add_subcommand("validate", "sampler-vs-oracle battery (M <= 6)");
    validate->add_option("--modes", validate_modes);
    validate->add_option("--seed", validate_seed);
    validate->add_option("--shots", validate_shots);

    std::string exact_config;
    auto* exact = app.add_subcommand(
        "exact", "exact distribution of the true and surrogate states");
    exact->add_option("config", exact_config)->required();

    CLI11_PARSE(app, argc, argv);
    const int threads = resolve_threads(threads_flag);

    try {
        if (test->parsed()) return cmd_test(config_path, epsilon_override);
        if (sample->parsed())
            return cmd_sample(sample_config, shots, seed, sample_out, threads);
        if (scan->parsed())
            return cmd_scan_alpha(scan_r, scan_eta, scan_qd, scan_grid);
        if (validate->parsed())
            return cmd_validate(validate_modes, validate_seed, validate_shots,
                                threads);
        if (exact->parsed()) return cmd_exact(exact_config);
    } catch (const std::exception& e) {
        std::cerr << error_record(e.what()).dump() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
