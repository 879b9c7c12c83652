#include "esr/parallel.hpp"

#include <algorithm>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace esr {
namespace par {

namespace {

std::uint64_t batch_count(std::uint64_t samples, std::uint64_t batch_size) {
    return (samples + batch_size - 1) / batch_size;
}

std::uint64_t batch_samples(std::uint64_t samples, std::uint64_t batch_size, std::uint64_t b) {
    const std::uint64_t start = b * batch_size;
    return std::min(batch_size, samples - start);
}

McCounts merge_in_order(std::vector<McCounts>& parts) {
    McCounts total;
    for (McCounts& part : parts) total.merge(part);
    return total;
}

} // namespace

McCounts run_protocol_mc(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed,
                         std::uint64_t batch_size) {
    const std::uint64_t batches = batch_count(samples, batch_size);
    std::vector<McCounts> parts(batches);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(batches); ++b)
        parts[b] = run_protocol_batch(protocol, batch_samples(samples, batch_size, b),
                                      seed ^ static_cast<std::uint64_t>(b));
    return merge_in_order(parts);
}

McCounts run_protocol_mc_serial(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed,
                                std::uint64_t batch_size) {
    const std::uint64_t batches = batch_count(samples, batch_size);
    std::vector<McCounts> parts(batches);
    for (std::uint64_t b = 0; b < batches; ++b)
        parts[b] = run_protocol_batch(protocol, batch_samples(samples, batch_size, b), seed ^ b);
    return merge_in_order(parts);
}

namespace {

SweepRow sweep_cell(const BellScenario& sc, double p) {
    const BellScenario at_p = sc.with_uniform_detection(p);
    SweepRow row;
    row.p = p;
    row.e_ab = joint_expectation(at_p, SideASetting::a, SideBSetting::b);
    row.e_abp = joint_expectation(at_p, SideASetting::a, SideBSetting::b_prime);
    row.e_apb = joint_expectation(at_p, SideASetting::a_prime, SideBSetting::b);
    row.e_apbp = joint_expectation(at_p, SideASetting::a_prime, SideBSetting::b_prime);
    row.modified_lhs = std::abs(row.e_ab - row.e_abp) + std::abs(row.e_apb + row.e_apbp);
    row.within_bound = row.modified_lhs <= 2.0 + 1e-12;
    return row;
}

} // namespace

std::vector<SweepRow> sweep_uniform_detection(const BellScenario& sc, const std::vector<double>& grid) {
    std::vector<SweepRow> rows(grid.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(grid.size()); ++i)
        rows[i] = sweep_cell(sc, grid[i]);
    return rows;
}

std::vector<SweepRow> sweep_uniform_detection_serial(const BellScenario& sc,
                                                     const std::vector<double>& grid) {
    std::vector<SweepRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = sweep_cell(sc, grid[i]);
    return rows;
}

LHVModel random_lhv_model(Rng& rng, std::size_t max_lambda) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(max_lambda));
    std::vector<double> w(n);
    double total = 0.0;
    for (double& wi : w) {
        wi = rng.uniform01() + 1e-9;
        total += wi;
    }
    for (double& wi : w) wi /= total;
    // repair rounding so the weights sum to 1 exactly enough for validation
    double sum = 0.0;
    for (double wi : w) sum += wi;
    w.back() += 1.0 - sum;
    std::vector<std::array<int, 2>> va(n), vb(n);
    for (std::size_t l = 0; l < n; ++l)
        for (int s = 0; s < 2; ++s) {
            va[l][s] = rng.uniform01() < 0.5 ? -1 : 1;
            vb[l][s] = rng.uniform01() < 0.5 ? -1 : 1;
        }
    return LHVModel(std::move(w), std::move(va), std::move(vb));
}

namespace {

double lhv_batch_max(std::uint64_t count, std::uint64_t seed, std::size_t max_lambda) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < count; ++i)
        worst = std::max(worst, classical_bchsh_lhs(random_lhv_model(rng, max_lambda)));
    return worst;
}

} // namespace

double lhv_max_bchsh(std::uint64_t count, std::uint64_t seed, std::size_t max_lambda,
                     std::uint64_t batch_size) {
    const std::uint64_t batches = batch_count(count, batch_size);
    std::vector<double> parts(batches);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(batches); ++b)
        parts[b] = lhv_batch_max(batch_samples(count, batch_size, b),
                                 seed ^ static_cast<std::uint64_t>(b), max_lambda);
    return *std::max_element(parts.begin(), parts.end());
}

double lhv_max_bchsh_serial(std::uint64_t count, std::uint64_t seed, std::size_t max_lambda,
                            std::uint64_t batch_size) {
    const std::uint64_t batches = batch_count(count, batch_size);
    std::vector<double> parts(batches);
    for (std::uint64_t b = 0; b < batches; ++b)
        parts[b] = lhv_batch_max(batch_samples(count, batch_size, b), seed ^ b, max_lambda);
    return *std::max_element(parts.begin(), parts.end());
}

std::string execution_mode() {
#ifdef _OPENMP
    return "openmp(" + std::to_string(omp_get_max_threads()) + " threads)";
#else
    return "serial build";
#endif
}

} // namespace par
} // namespace esr
