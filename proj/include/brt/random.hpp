#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace brt {

/// Seedable, splittable generator. Each (seed, stream) pair seeds an
/// independent mt19937_64 through std::seed_seq; both are fully specified by
/// the C++ standard, and the distributions below are written out explicitly,
/// so a stream is bit-identical on every conforming toolchain.
class Rng {
  public:
    static constexpr std::string_view kAlgorithm = "mt19937_64+seed_seq(seed,stream)/u53";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform on {0, ..., n-1}; n > 0.
    std::uint64_t uniform_index(std::uint64_t n);

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace brt
