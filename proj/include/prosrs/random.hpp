#pragma once

#include <cstdint>
#include <random>

namespace prosrs {

using Rng = std::mt19937_64;

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  Doe = 1,
  Candidates = 2,
  ZoomOut = 3,
  CrossValidation = 4,
  Noise = 5,
  RandomSearch = 6,
  ModelError = 7,
  MonteCarlo = 8,
};

/// splitmix64 finalizer over (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace prosrs
