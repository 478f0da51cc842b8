#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fvpnet {

/// Seedable, portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The transforms below are written out by hand so that the drawn
/// values are identical on every platform (std distributions are not).
///
/// Stream splitting: substream(seed, k) seeds the engine with
/// splitmix64(seed + 0x9E3779B97F4A7C15 * (k + 1)). Every graph process,
/// checker and Monte-Carlo run owns one substream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fvpnet
