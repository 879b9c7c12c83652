#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "esr/bell.hpp"
#include "esr/protocol.hpp"

// Scenario configuration: a single versioned JSON document naming states,
// observables, detection models, protocols, the Bell scenario and sweep
// grid. Everything is resolved and validated up front; runs never touch
// the raw document again.

namespace esr {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConditionalDensityTask {
    std::string state_name;
    std::string observable_name;
    std::vector<OutcomeSet> sets;
};

struct ApparatusCheckTask {
    std::string state_name;
    std::string observable_name;
};

struct ScenarioConfig {
    nlohmann::json canonical;
    std::string config_hash; // fnv1a-64 of the canonical dump, hex

    std::uint64_t seed = 0;
    std::string seed_source = "config"; // config | env:ESR_SEED | cli
    std::uint64_t samples = 10000;
    std::uint64_t mc_batch_size = 8192;
    double max_z_fraction = 0.01;

    std::map<std::string, StateValue> states;
    std::map<std::string, GeneralizedObservable> observables;
    std::vector<Protocol> protocols;
    std::optional<BellScenario> scenario;
    std::vector<double> sweep_grid;
    std::vector<ConditionalDensityTask> conditional_density;
    std::vector<ApparatusCheckTask> apparatus_checks;
};

// Parse + validate. cli_seed (when present) wins over the ESR_SEED
// environment variable, which wins over the document's seed.
ScenarioConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> cli_seed,
                            std::optional<std::uint64_t> env_seed);

// Reads the file, consults getenv("ESR_SEED"), then parses.
ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> cli_seed);

std::string fnv1a64_hex(const std::string& data);

} // namespace esr
