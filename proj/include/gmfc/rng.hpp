#pragma once

#include <cstdint>
#include <span>

namespace gmfc {

// Counter-based stream derivation: derive_seed(s, k) is the k-th output of
// the SplitMix64 sequence rooted at s. Streams are indexed, not consumed in
// order, so adding a new stream index never perturbs existing ones.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic generator over a SplitMix64 stream. The bit stream and every
// conversion below are fully specified here, independent of the standard
// library, so equal seeds give identical draws on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  bool bernoulli(double p);

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  // Samples an index from a probability vector (entries >= 0, sum ~ 1).
  int categorical(std::span<const double> probs);

 private:
  std::uint64_t state_;
};

}  // namespace gmfc
