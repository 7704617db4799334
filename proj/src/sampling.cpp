#include "qwalk/sampling.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qwalk {

namespace {

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace

std::uint64_t CounterRng::at(std::uint64_t counter) const {
  return mix64(seed_ + (counter + 1) * golden_gamma);
}

double CounterRng::uniform_at(std::uint64_t counter) const {
  return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(mix64(base) ^ (index * golden_gamma + 0x632BE59BD9B4E019ULL));
}

std::int64_t SampleCounts::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::int64_t SampleCounts::at(std::int64_t m) const {
  const std::int64_t i = m - min_site;
  if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
  return counts[static_cast<std::size_t>(i)];
}

SampleCounts sample_counts(const ProbabilityDistribution &dist, std::int64_t shots,
                           std::uint64_t seed) {
  if (shots < 0) throw validation_error("shots must be non-negative");
  const auto &p = dist.probabilities();
  SampleCounts out{dist.min_site(), std::vector<std::int64_t>(p.size(), 0)};
  if (shots == 0) return out;

  std::vector<double> cdf(p.size());
  double running = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    running += p[i];
    cdf[i] = running;
    if (p[i] > 0.0) last_nonzero = i;
  }

  const CounterRng rng(seed);
  for (std::int64_t shot = 0; shot < shots; ++shot) {
    const double u = rng.uniform_at(static_cast<std::uint64_t>(shot)) * running;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx > last_nonzero) idx = last_nonzero;
    ++out.counts[idx];
  }
  return out;
}

SampledMoments estimate_moments(const SampleCounts &counts) {
  const std::int64_t shots = counts.total();
  if (shots <= 0) throw validation_error("cannot estimate moments from an empty histogram");
  const auto total = static_cast<double>(shots);

  double m1 = 0.0;
  double m2 = 0.0;
  std::int64_t m = counts.min_site;
  for (auto c : counts.counts) {
    const auto x = static_cast<double>(m++);
    m1 += x * static_cast<double>(c);
    m2 += x * x * static_cast<double>(c);
  }
  m1 /= total;
  m2 /= total;

  // dM/dc_m = (m^j − M_j)/S, Var(c_m) = c_m.
  double var1 = 0.0;
  double var2 = 0.0;
  m = counts.min_site;
  for (auto c : counts.counts) {
    const auto x = static_cast<double>(m++);
    const auto cd = static_cast<double>(c);
    var1 += cd * (x - m1) * (x - m1);
    var2 += cd * (x * x - m2) * (x * x - m2);
  }
  return {shots, m1, std::sqrt(var1) / total, m2, std::sqrt(var2) / total};
}

} // namespace qwalk
