#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mergo {

/// Deterministic 64-bit generator: std::mt19937_64 (fixed by the standard)
/// with hand-rolled distributions, so a seed produces identical streams on
/// every platform and standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for a sub-task, derived from (seed, stream) by splitmix64.
  static Rng derived(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}; unbiased.
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller.
  double normal();
  bool coin(double p = 0.5) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[index(i)]);
  }

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace mergo
