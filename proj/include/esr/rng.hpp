#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace esr {

// Reproducibility contract: mt19937_64 seeded directly, uniform deviates
// taken as the top 53 bits. Streams are identical across platforms for the
// same seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    static constexpr const char* algorithm() { return "mt19937_64"; }

private:
    std::mt19937_64 gen_;
};

// Inverse-CDF draw over a finite distribution in declared slot order.
// Returns the most probable slot if rounding pushes u past the cumulative
// total.
std::size_t sample_index(Rng& rng, std::span<const double> probs);

} // namespace esr
