#pragma once

#include <cstdint>
#include <random>

namespace addbo {

using Rng = std::mt19937_64;

// Every consumer of randomness draws from its own stream derived from the
// experiment seed, so adding draws in one module never shifts another.
enum class Stream : std::uint32_t {
  kSynthetic = 1,
  kInitialDesign = 2,
  kObservationNoise = 3,
  kStructureLearning = 4,
  kRandomSearch = 5,
  kAnalysis = 6,
  kTest = 99,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

}  // namespace addbo
