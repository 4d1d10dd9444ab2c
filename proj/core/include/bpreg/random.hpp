#pragma once

#include <cstdint>
#include <random>

namespace bpreg {

// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Seedable random stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniform, normal and gamma variates are produced by code in this
// library rather than by <random> distributions, so a given seed yields the
// same draws on every standard library.
class RandomStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+splitmix64/v1";

  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent stream for the index-th sub-task (replicate, resample, ...).
  RandomStream derive(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal (Marsaglia polar method).
  double normal();

  // Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the
  // Gamma(shape+1) * U^(1/shape) boost.
  double gamma(double shape);

  // Beta(a, b) as G_a / (G_a + G_b).
  double beta(double a, double b);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bpreg
