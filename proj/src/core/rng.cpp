#include "core/rng.hpp"

#include <cmath>
#include <numbers>

namespace sgsde {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix_fin(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    // Two finalizer rounds decorrelate nearby (seed, stream) pairs.
    key_ = splitmix_fin(splitmix_fin(seed + kGolden) ^ (stream * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL));
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return splitmix_fin(key_ + counter * kGolden);
}

double CounterRng::uniform_open(std::uint64_t counter) const {
    return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t k) const {
    const double u1 = uniform_open(2 * k);
    const double u2 = uniform(2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sgsde
