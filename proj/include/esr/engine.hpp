#pragma once

#include "esr/config.hpp"
#include "esr/report.hpp"

// The run modes behind the CLI subcommands. Each consumes a validated
// config and produces a deterministic report.

namespace esr {

// Exact probabilities for every configured protocol, Bell expectations,
// conditional-density exports and apparatus consistency checks.
RunReport run_analytic(const ScenarioConfig& cfg);

// Seeded sampling of every protocol against its analytic distribution,
// with per-outcome z-scores.
RunReport run_monte_carlo(const ScenarioConfig& cfg);

// Modified BCHSH functional across the uniform-detection sweep grid.
RunReport run_bchsh_sweep(const ScenarioConfig& cfg);

// Detection-efficiency ceiling of the configured scenario.
RunReport run_bound_search(const ScenarioConfig& cfg);

} // namespace esr
