#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ds {

// SplitMix64 finalizer, a bijection on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent sub-stream seed: distinct `stream` tags give
// unrelated generators for the same base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic generator: std::mt19937_64 with explicit value mappings so a
// given seed reproduces the same reals on any run.
//   uniform01: top 53 bits of one engine word, times 2^-53, in [0, 1)
//   normal:    Box-Muller on two uniform01 draws; the pair partner is cached
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal();

    // Unbiased uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n);

    // k distinct indices from {0, ..., n-1}, uniformly, returned ascending.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  private:
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace ds
