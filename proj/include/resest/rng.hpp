#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace resest {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `(a, b)` of a base seed; distinct tuples give
/// decorrelated generators.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Seedable generator with a pinned algorithm so every draw is bit-exact
/// across platforms and standard libraries.
///
/// Engine: std::mt19937_64 (its output sequence is fixed by the standard).
/// Uniform doubles take the top 53 bits. Normals use the Marsaglia polar
/// method with the spare value cached. Bounded integers use rejection
/// sampling on the raw 64-bit output. The std:: distributions are avoided
/// because their algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent child generator for stream `index`.
  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                      ///< [0, 1)
  double uniform(double lo, double hi);  ///< [lo, hi)
  double normal();                       ///< N(0, 1)
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  std::uint64_t below(std::uint64_t bound);  ///< uniform on {0, ..., bound-1}

  /// `count` distinct indices from {0, ..., n-1} by partial Fisher-Yates.
  std::vector<int> sample_without_replacement(int n, int count);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace resest
