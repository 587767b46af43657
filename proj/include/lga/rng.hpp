#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lga {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent stream identified by (base, a, b). Streams are keyed
/// by logical position (generation, task index, ...) and never by worker id.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(base ^ mix64(a)) + mix64(~b));
}

/// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kInit = 0x1417;
inline constexpr std::uint64_t kOperators = 0x2a03;
inline constexpr std::uint64_t kMutation = 0x3c11;
inline constexpr std::uint64_t kEvaluation = 0x4e29;
inline constexpr std::uint64_t kTasks = 0x5b37;
inline constexpr std::uint64_t kCandidates = 0x6d41;
inline constexpr std::uint64_t kMetaEval = 0x7f53;
inline constexpr std::uint64_t kTuning = 0x8a65;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double uniform(double low, double high) { return low + (high - low) * unit_(engine_); }
  double normal() { return normal_(engine_); }
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  /// Uniform integer on [low, high].
  long long integer(long long low, long long high) {
    return std::uniform_int_distribution<long long>(low, high)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lga
