#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gbsc/sampler.hpp"

// Experiment-config JSON: top-level keys K, M, r, eta,
// detector{eta_d, p_d}, unitary (matrix or haar seed), epsilon.
// Parse failures carry field-level diagnostics.

namespace gbsc {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key))
            throw ConfigError(std::string("config: missing key '") + key + "'");
        return j.at(key);
    };
    ExperimentConfig config;
    try {
        config.noise.squeezers = require("K").get<int>();
        config.noise.modes = require("M").get<int>();
        config.noise.r = require("r").get<double>();
        config.noise.eta = require("eta").get<double>();
        const auto& det = require("detector");
        if (!det.contains("eta_d") || !det.contains("p_d"))
            throw ConfigError("config: detector needs 'eta_d' and 'p_d'");
        config.detector.eta_d = det.at("eta_d").get<double>();
        config.detector.p_d = det.at("p_d").get<double>();
        config.epsilon = require("epsilon").get<double>();

        nlohmann::json unitary = require("unitary");
        if (unitary.contains("haar_seed") && !unitary.contains("modes"))
            unitary["modes"] = config.noise.modes;
        config.interferometer = unitary.get<InterferometerSpec>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
    return {{"K", c.noise.squeezers},
            {"M", c.noise.modes},
            {"r", c.noise.r},
            {"eta", c.noise.eta},
            {"detector", {{"eta_d", c.detector.eta_d}, {"p_d", c.detector.p_d}}},
            {"unitary", c.interferometer},
            {"epsilon", c.epsilon}};
}

// FNV-1a over the canonical JSON dump; recorded in sample metadata so
// runs are attributable to an exact configuration.
inline std::string config_hash(const ExperimentConfig& c) {
    const std::string dump = experiment_config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace gbsc
