#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flockswitch {

/// SplitMix64 finalizer; used for counter-based seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `stream` of `root`. Pure function of its arguments, so
/// adding streams or runs never perturbs existing ones.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  return mix64(mix64(root) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Sub-stream ids of one sample path.
enum class Stream : std::uint64_t { Dwell = 1, Choice = 2, Init = 3 };

inline std::uint64_t derive_seed(std::uint64_t root, Stream s) {
  return derive_seed(root, static_cast<std::uint64_t>(s));
}

/// mt19937_64 with explicit, library-independent conversions to reals, so a
/// seed reproduces the same draws with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flockswitch
