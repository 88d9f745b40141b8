#pragma once

#include <cstdint>
#include <random>

namespace rshare {

using Rng = std::mt19937_64;

// Per-run streams are derived from (master seed, run index, stream tag) through
// std::seed_seq, so no run ever reads another run's stream. Stream tags keep
// e.g. parameter initialization and environment sampling independent within a run.
enum class Stream : std::uint32_t {
  kEnvironment = 1,
  kPolicy = 2,
  kInit = 3,
};

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t run_index,
                    Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(run_index),
                    static_cast<std::uint32_t>(run_index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi_inclusive) {
  return std::uniform_int_distribution<int>(lo, hi_inclusive)(rng);
}

}  // namespace rshare
