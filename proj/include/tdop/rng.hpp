#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>

namespace tdop {

// SplitMix64 finalizer. Used both as a seed mixer and for stream derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a list of 64-bit tags into one seed. Order matters; the result is
// identical on every platform.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = mix64(base ^ 0x5851f42d4c957f2dULL);
  for (auto t : tags) {
    h = mix64(h ^ mix64(t + 0x2545f4914f6cdd1dULL));
  }
  return h;
}

// Fixed stream tags. Every stage that consumes randomness gets its own
// substream so that changing one stage never shifts another.
namespace stream {
inline constexpr std::uint64_t coordinates = 0x636f6f7264ULL;
inline constexpr std::uint64_t windows = 0x77696e646f77ULL;
inline constexpr std::uint64_t budget = 0x627564676574ULL;
inline constexpr std::uint64_t sample = 0x73616d706c65ULL;
inline constexpr std::uint64_t rollout = 0x726f6c6c6f7574ULL;
inline constexpr std::uint64_t action = 0x616374696f6eULL;
inline constexpr std::uint64_t solver = 0x736f6c766572ULL;
inline constexpr std::uint64_t validation = 0x76616c6964ULL;
}  // namespace stream

/// Portable pseudo-random generator (xoshiro256**, seeded through SplitMix64).
///
/// All distributions are implemented here rather than taken from <random>,
/// whose distribution algorithms are implementation-defined. Given the same
/// seed, every method produces the same sequence on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      s = mix64(z);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform integer in [0, bound), bound > 0. Lemire's nearly-divisionless
  // rejection method; unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // Discrete uniform on the closed interval [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Standard normal via Box-Muller (no cached second variate, so the stream
  // position is a pure function of the number of calls).
  double normal() noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
};

template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace tdop
