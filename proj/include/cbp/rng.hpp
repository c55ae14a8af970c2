#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace cbp {

/// SplitMix64. Small state, passes BigCrush, and makes independent substreams
/// cheap: every (seed, rep, lane) triple hashes to its own starting state.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Stream for replication `rep`, purpose `lane`, under a run seed.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t rep, std::uint64_t lane) {
  std::uint64_t h = SplitMix64::mix(seed ^ 0x6a09e667f3bcc909ULL);
  h = SplitMix64::mix(h ^ (rep + 0x3c6ef372fe94f82bULL));
  h = SplitMix64::mix(h ^ (lane + 0xa54ff53a5f1d36f1ULL));
  return SplitMix64(h);
}

}  // namespace cbp
