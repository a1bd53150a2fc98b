#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace evgate {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Folds `parts` into `base` with splitmix64, left to right.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

/// Portable seeded generator: std::mt19937_64 (whose output sequence is
/// fixed by the C++ standard) with distribution transforms written out here,
/// since the <random> distributions are implementation-defined.
///
///   uniform()  = (next_u64() >> 11) * 2^-53                  in [0, 1)
///   normal()   = Box-Muller on u1 = 1 - uniform(), u2 = uniform():
///                sqrt(-2 ln u1) * cos(2 pi u2), then the paired sin value
///   uniform_int(lo, hi) = lo + floor(uniform() * (hi - lo + 1))
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long long uniform_int(long long lo, long long hi);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace evgate
