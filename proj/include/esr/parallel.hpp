#pragma once

#include <cstdint>
#include <vector>

#include "esr/bell.hpp"
#include "esr/protocol.hpp"

// Data-parallel drivers. Every kernel here has a serial reference twin that
// produces bit-identical output: work is split into independent cells or
// batches with index-derived substream seeds and merged in index order, so
// the thread count never changes a result.

namespace esr {
namespace par {

// Monte Carlo sampling of a protocol. Batch b runs on substream seed
// (seed XOR b); counts merge by addition in batch order.
McCounts run_protocol_mc(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed,
                         std::uint64_t batch_size = 8192);
McCounts run_protocol_mc_serial(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed,
                                std::uint64_t batch_size = 8192);

struct SweepRow {
    double p = 0.0;
    double e_ab = 0.0, e_abp = 0.0, e_apb = 0.0, e_apbp = 0.0;
    double modified_lhs = 0.0;
    bool within_bound = false; // LHS <= 2 + 1e-12
};

// Modified BCHSH functional over a grid of uniform detection probabilities.
std::vector<SweepRow> sweep_uniform_detection(const BellScenario& sc, const std::vector<double>& grid);
std::vector<SweepRow> sweep_uniform_detection_serial(const BellScenario& sc,
                                                     const std::vector<double>& grid);

// Largest classical BCHSH value over `count` randomly generated LHV models
// (batched like the MC driver). Stays <= 2 for every model.
double lhv_max_bchsh(std::uint64_t count, std::uint64_t seed, std::size_t max_lambda = 10,
                     std::uint64_t batch_size = 1024);
double lhv_max_bchsh_serial(std::uint64_t count, std::uint64_t seed, std::size_t max_lambda = 10,
                            std::uint64_t batch_size = 1024);

// "openmp(<n> threads)" or "serial build" for report provenance.
std::string execution_mode();

// Deterministic model used by the LHV kernels and tests.
LHVModel random_lhv_model(Rng& rng, std::size_t max_lambda);

} // namespace par
} // namespace esr
