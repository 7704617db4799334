#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/walk.hpp"

namespace qwalk {

/// Counter-based 64-bit generator: the i-th output is a pure function of
/// (seed, i), so streams can be split or replayed without shared state.
/// Outputs coincide with the SplitMix64 sequence seeded with `seed`.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t at(std::uint64_t counter) const;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const;

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
};

/// Deterministic per-item seed derived from a base seed and an item index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

struct SampleCounts {
  std::int64_t min_site;
  std::vector<std::int64_t> counts;

  std::int64_t total() const;
  std::int64_t at(std::int64_t m) const;
};

/// Multinomial draw of `shots` detections by inverse-CDF sampling.
/// Rejects negative shot counts.
SampleCounts sample_counts(const ProbabilityDistribution &dist, std::int64_t shots,
                           std::uint64_t seed);

/// Moments of a count histogram with one-standard-deviation errors from
/// independent Poisson fluctuations (σ² = c) of every site count.
struct SampledMoments {
  std::int64_t shots;
  double m1;
  double m1_error;
  double m2;
  double m2_error;
};

/// Rejects an empty histogram.
SampledMoments estimate_moments(const SampleCounts &counts);

} // namespace qwalk
