#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "urnsim/dynamics.hpp"

namespace urnsim {

// Raised on any configuration problem; the message carries "path:line:".
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
    ModelParams model;
    InitSpec init;
    long horizon = 0;
    long replications = 1;
    std::uint64_t seed = 0;
    long record_every = 0;  // 0 -> max(1, horizon/1000)
    int threads = 0;        // 0 -> hardware concurrency
    int grid_resolution = 101;
    bool include_unstable_middle = false;
    int zero_index = 0;     // clt-check: which strictly stable sync zero
    std::vector<std::string> outputs; // empty -> subcommand defaults

    explicit ExperimentConfig(ModelParams m) : model(std::move(m)) {}
};

// Schema-validated load; unknown keys are rejected with the line they sit on.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& label);

ModelParams model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelParams& p);

} // namespace urnsim
