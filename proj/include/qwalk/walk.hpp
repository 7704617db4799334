#pragma once

#include <cstdint>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/linalg.hpp"

namespace qwalk {

/// Retardation δ and topological charge q of the q-plate.
///
/// δ is reduced into [0, 2π] (2π itself is kept). q must be a positive
/// half-integer; the lattice shift per q-plate action is 2q.
class StepParams {
public:
  explicit StepParams(double delta, double q = 0.5);

  double delta() const { return delta_; }
  double q() const { return shift_ / 2.0; }
  /// 2q, the number of sites a coin-conditioned hop moves the walker.
  int shift() const { return shift_; }

private:
  double delta_;
  int shift_;
};

/// Rows are lattice sites, columns the (|L⟩, |R⟩) amplitudes; row-major so each
/// site's pair is contiguous.
using SiteAmplitudes = Eigen::Matrix<Complex<double>, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Spinor-valued wavefunction on the dense site window [min_site, max_site].
class LatticeState {
public:
  /// Throws validation_error unless the total norm is 1 within 1e-12.
  LatticeState(std::int64_t min_site, SiteAmplitudes amplitudes);

  /// Walker at `site` with coin `coin`, zero-padded by `padding` sites per side.
  static LatticeState localized(std::int64_t site, const CoinState &coin, std::int64_t padding = 0);

  std::int64_t min_site() const { return min_site_; }
  std::int64_t max_site() const { return min_site_ + amplitudes_.rows() - 1; }
  Eigen::Index size() const { return amplitudes_.rows(); }
  const SiteAmplitudes &amplitudes() const { return amplitudes_; }

  /// Amplitudes at site m; zero outside the stored window.
  Spinor2d at(std::int64_t m) const;

  double norm_squared() const { return amplitudes_.squaredNorm(); }

  /// Same state on a window widened by the given number of sites.
  LatticeState padded(std::int64_t left, std::int64_t right) const;

private:
  struct unchecked_tag {};
  LatticeState(unchecked_tag, std::int64_t min_site, SiteAmplitudes amplitudes)
      : min_site_(min_site), amplitudes_(std::move(amplitudes)) {}

  friend LatticeState apply_qwp(const LatticeState &);
  friend LatticeState apply_qplate(const LatticeState &, const StepParams &);
  friend std::vector<LatticeState> evolve(const LatticeState &, const StepParams &, std::int64_t);
  friend LatticeState evolve_final(const LatticeState &, const StepParams &, std::int64_t);

  std::int64_t min_site_;
  SiteAmplitudes amplitudes_;
};

/// Quarter-wave plate acting on the coin: |L⟩ → (|L⟩ − i|R⟩)/√2,
/// |R⟩ → (−i|L⟩ + |R⟩)/√2, i.e. exp(−iπ/4 σ_x).
template <typename Scalar = double> Matrix2<Scalar> qwp_matrix() {
  using C = Complex<Scalar>;
  const Scalar h = 1 / std::sqrt(Scalar(2));
  Matrix2<Scalar> w;
  w << C(h), C(0, -h), C(0, -h), C(h);
  return w;
}

LatticeState apply_qwp(const LatticeState &state);

/// |L,m⟩ → cos(δ/2)|L,m⟩ + i sin(δ/2)|R,m+2q⟩,
/// |R,m⟩ → cos(δ/2)|R,m⟩ + i sin(δ/2)|L,m−2q⟩.
/// The window grows only as far as shifted non-zero amplitudes require.
LatticeState apply_qplate(const LatticeState &state, const StepParams &params);

/// One walk step: q-plate after quarter-wave plate.
LatticeState step(const LatticeState &state, const StepParams &params);

/// [initial, step(initial), …, stepⁿ(initial)]. Every element shares the
/// window of `initial` widened by 2q·n per side.
std::vector<LatticeState> evolve(const LatticeState &initial, const StepParams &params,
                                 std::int64_t steps);

/// Last element of evolve() without storing the trajectory.
LatticeState evolve_final(const LatticeState &initial, const StepParams &params,
                          std::int64_t steps);

/// Site probabilities P(m) ≥ 0 summing to 1 within 1e-10.
class ProbabilityDistribution {
public:
  ProbabilityDistribution(std::int64_t min_site, std::vector<double> probabilities);

  std::int64_t min_site() const { return min_site_; }
  std::int64_t max_site() const {
    return min_site_ + static_cast<std::int64_t>(probabilities_.size()) - 1;
  }
  const std::vector<double> &probabilities() const { return probabilities_; }
  double at(std::int64_t m) const;

private:
  std::int64_t min_site_;
  std::vector<double> probabilities_;
};

/// P(m) = |a_L(m)|² + |a_R(m)|².
ProbabilityDistribution distribution(const LatticeState &state);

struct RawMoments {
  double m1;
  double m2;
};

struct MomentReport {
  std::int64_t steps;
  double m1;
  double m2;
  double m1_over_n;
  double m2_over_n2;

  double sqrt_m2_over_n() const { return std::sqrt(m2) / static_cast<double>(steps); }
  double variance() const { return m2 - m1 * m1; }
};

RawMoments raw_moments(const ProbabilityDistribution &dist);

/// Moments with the step-normalized pair; rejects steps < 1.
MomentReport moments(const ProbabilityDistribution &dist, std::int64_t steps);

} // namespace qwalk
