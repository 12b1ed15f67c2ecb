#pragma once

#include <cstdint>
#include <limits>

namespace ftm {

// SplitMix64 finalizer. Used both as the stream generator and to derive
// independent substream seeds from (seed, key) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(mix64(seed) ^ mix64(key ^ 0xd1b54a32d192ed03ULL));
}

// Domain tags keep substreams for different purposes disjoint.
enum class StreamDomain : std::uint64_t {
  Node = 1,
  MonteCarlo = 2,
  Bootstrap = 3,
  Synthetic = 4,
};

// Deterministic 64-bit generator (SplitMix64). Satisfies
// UniformRandomBitGenerator so it can feed <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RngStream(std::uint64_t seed = 0) noexcept : state_(seed) {}

  // Substream keyed by (seed, domain, index).
  static constexpr RngStream substream(std::uint64_t seed, StreamDomain domain,
                                       std::uint64_t index) noexcept {
    return RngStream(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(domain)), index));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ftm
