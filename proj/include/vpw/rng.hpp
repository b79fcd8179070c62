#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace vpw {

/// Counter-based random stream.
///
/// Each draw is a pure function of (key, counter), so a stream can be
/// reproduced from its key alone and independent sub-streams are obtained by
/// hashing a stream id into a fresh key with split(). Satisfies
/// UniformRandomBitGenerator, so the <random> distributions work on it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ kSeedSalt)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGolden * ++counter_); }

  /// Independent stream identified by `stream`; does not advance this one.
  [[nodiscard]] Rng split(std::uint64_t stream) const {
    Rng child;
    child.key_ = mix(key_ ^ mix(stream + kGolden));
    return child;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lower, double upper) { return lower + (upper - lower) * uniform(); }

  double normal(double mean = 0.0, double stddev = 1.0) {
    std::normal_distribution<double> dist(mean, stddev);
    return dist(*this);
  }

  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(*this);
  }

  [[nodiscard]] std::uint64_t draws() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5851f42d4c957f2dULL;

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Stream ids used by the experiment harness; one stream per role keeps
/// planner randomness from perturbing the environment and vice versa.
enum class StreamRole : std::uint64_t {
  kEnvironment = 1,
  kFilter = 2,
  kPlanner = 3,
  kInitialBelief = 4,
};

inline Rng role_stream(std::uint64_t seed, StreamRole role) {
  return Rng(seed).split(static_cast<std::uint64_t>(role));
}

}  // namespace vpw
