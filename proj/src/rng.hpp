// rng.hpp
// Deterministic, splittable pseudo-random streams.
//
// Generator: PCG64 (XSL-RR 128/64). 2^128 period per stream; streams derived
// from the same master seed use distinct odd increments, so they never share
// a sequence. Bit-level reproducibility is guaranteed within this
// implementation only; other implementations need only match the contracts.
#pragma once

#include <cstdint>

namespace stochlr::rng {

struct MasterSeed {
  std::uint64_t value = 0;
};

// One generator stream. A stream is single-owner: it must never be advanced
// from two threads at once. Distinct streams may be used concurrently.
class Stream {
 public:
  static Stream derive(MasterSeed seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  // Sample from [lo, hi). lo == hi returns lo without advancing the stream.
  // Throws std::invalid_argument if lo > hi.
  double next_uniform(double lo, double hi);

  // Sample from N(mean, stddev^2) via Box-Muller (one spare value is cached).
  // stddev == 0 returns mean exactly without advancing the stream.
  // Throws std::invalid_argument if stddev < 0.
  double next_gaussian(double mean, double stddev);

  MasterSeed master_seed() const { return {seed_}; }
  std::uint64_t stream_index() const { return index_; }

 private:
  Stream() = default;
  double uniform01();

  unsigned __int128 state_ = 0;
  unsigned __int128 inc_ = 1;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
};

// Pure function of (seed, index); safe to call concurrently.
inline Stream derive_stream(MasterSeed seed, std::uint64_t index) {
  return Stream::derive(seed, index);
}

}  // namespace stochlr::rng
