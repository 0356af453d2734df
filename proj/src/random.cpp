#include "brt/random.hpp"

#include <limits>

namespace brt {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), engine_(seeded_engine(seed, stream)) {}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Rejection on the top partial bucket keeps the result exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
}

}  // namespace brt
