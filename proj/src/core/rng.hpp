#pragma once

#include <cstdint>

namespace sgsde {

// Counter-based generator: every output is a pure function of
// (seed, stream, counter), so any sub-window of a noise path can be
// regenerated independently and Monte Carlo runs are order-independent.
// The kernel is the splitmix64 finalizer applied to a keyed counter.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    // Uniform 64-bit word at the given counter.
    std::uint64_t bits(std::uint64_t counter) const;

    // Uniform double in (0, 1] (never 0, safe under log).
    double uniform_open(std::uint64_t counter) const;

    // Uniform double in [0, 1).
    double uniform(std::uint64_t counter) const;

    // Standard normal deviate at index k; consumes counters 2k and 2k+1.
    double normal(std::uint64_t k) const;

private:
    std::uint64_t key_;
};

}  // namespace sgsde
