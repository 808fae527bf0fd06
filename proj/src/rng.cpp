#include "rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stochlr::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& s) {
  s += kGolden;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr unsigned __int128 kMult =
    (static_cast<unsigned __int128>(0x2360ED051FC65DA4ULL) << 64) | 0x4385DF649FCCF645ULL;

}  // namespace

Stream Stream::derive(MasterSeed seed, std::uint64_t stream_index) {
  Stream s;
  s.seed_ = seed.value;
  s.index_ = stream_index;

  std::uint64_t chain = seed.value;
  const std::uint64_t s0 = splitmix64(chain);
  const std::uint64_t s1 = splitmix64(chain);
  chain ^= kGolden * (stream_index + 1);
  const std::uint64_t i0 = splitmix64(chain);
  const std::uint64_t i1 = splitmix64(chain);

  const auto initstate = (static_cast<unsigned __int128>(s0) << 64) | s1;
  const auto streamsel = (static_cast<unsigned __int128>(i0) << 64) | i1;

  // splitmix64 is a bijection of its (advanced) state, so distinct stream
  // indices yield distinct i0 and therefore distinct increments.
  s.inc_ = (streamsel << 1) | 1;
  s.state_ = 0;
  s.next_u64();
  s.state_ += initstate;
  s.next_u64();
  return s;
}

std::uint64_t Stream::next_u64() {
  const unsigned __int128 old = state_;
  state_ = old * kMult + inc_;
  const auto xored = static_cast<std::uint64_t>((old >> 64) ^ old);
  const auto rot = static_cast<unsigned>(old >> 122);
  return (xored >> rot) | (xored << ((64u - rot) & 63u));
}

double Stream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_uniform(double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("next_uniform: invalid range, lo must not exceed hi");
  }
  if (lo == hi) {
    return lo;
  }
  return lo + uniform01() * (hi - lo);
}

double Stream::next_gaussian(double mean, double stddev) {
  if (!(stddev >= 0.0)) {
    throw std::invalid_argument("next_gaussian: stddev must be nonnegative");
  }
  if (stddev == 0.0) {
    return mean;
  }
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + stddev * radius * std::cos(angle);
}

}  // namespace stochlr::rng
