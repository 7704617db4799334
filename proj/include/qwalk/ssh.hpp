#pragma once

#include <cstdint>
#include <optional>

#include "qwalk/bands.hpp"
#include "qwalk/coin.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// Intra-cell hopping t and inter-cell hopping t′ of the SSH chain, lattice
/// constant 1. Both non-negative and not both zero.
class SSHParams {
public:
  SSHParams(double t, double t_prime);

  double t() const { return t_; }
  double t_prime() const { return t_prime_; }
  double max_hopping() const { return std::max(t_, t_prime_); }

private:
  double t_;
  double t_prime_;
};

/// H(k) = (t − t′cos k)·σ_x − t′ sin k·σ_y, with the quasi-momentum already
/// shifted by π so that the gap closes at k = 0 when t = t′.
Matrix2cd ssh_bloch_hamiltonian(const SSHParams &params, double k);

/// h(k) with H(k) = h·σ; h_z = 0.
Vector3r ssh_bloch_field(const SSHParams &params, double k);

struct SSHBandPoint {
  double k;
  /// Upper band, E = |h(k)| ≥ 0.
  double energy;
  /// V = −t t′ sin k / E, the lower-band slope, for which n_y = V/t.
  std::optional<double> velocity;
  std::optional<Vector3r> n;
  /// E < 1e-9.
  bool degenerate;
};

SSHBandPoint ssh_band(const SSHParams &params, double k);

/// V², with the gapless limit t·t′ at an exact closure.
double ssh_velocity_squared(const SSHParams &params, double k);

/// Planar winding of (n_x, n_y); rejects |t − t′| ≤ 1e-6·max(t, t′) and grids
/// below 64 points.
WindingResult ssh_winding(const SSHParams &params, int grid = 1024);

struct SSHEvolutionConfig {
  SSHParams params;
  double tau;
  /// 0 selects the smallest FFT-friendly size above minimum_cells().
  std::int64_t cells = 0;
  CoinState chi0 = CoinState::left();

  /// 4·ceil(max(t, t′)·τ) + 16, enough that the support never wraps.
  std::int64_t minimum_cells() const;
  std::int64_t resolved_cells() const;
};

/// Electron started in cell 0 with sublattice spinor χ₀, evolved for time τ
/// by exact per-k exponentials and an inverse DFT back to cells.
ProbabilityDistribution ssh_evolve(const SSHEvolutionConfig &config);

struct SSHAsymptoticMoments {
  double m1_over_tau;
  double m2_over_tau2;
  /// 𝓛/t², NaN when t = 0.
  double m2_over_tau2_t2;
};

/// M1/τ → −⟨σ_y⟩·𝓛, M2/τ² → 𝓛.
SSHAsymptoticMoments ssh_asymptotic_moments(const SSHParams &params, const CoinState &chi0);

/// 𝓛(t, t′) = ∫ V² dk/2π. Quadrature uses `grid` nodes (≥ 256).
SpreadingCoefficient ssh_L(const SSHParams &params, SpreadingMethod method, int grid = 4096);

/// g(z) with 𝓛 = ∮_{|z|=1} g(z) dz.
template <typename Scalar>
Complex<Scalar> ssh_spreading_integrand(Scalar t, Scalar t_prime, Complex<Scalar> z) {
  using C = Complex<Scalar>;
  const Scalar tt = t * t_prime;
  const C z2m1 = z * z - C(1);
  const C den = C(0, 8) * pi_v<Scalar> * z * z *
                (tt * (z * z + C(1)) - (t * t + t_prime * t_prime) * z);
  return tt * tt * z2m1 * z2m1 / den;
}

/// Poles {0, t/t′, t′/t} and their residues, cross-checked numerically.
/// Rejects |t − t′| < 1e-6·max(t, t′). With t·t′ = 0 the integrand vanishes
/// and the report has no poles.
ResidueReport ssh_residue_oracle(const SSHParams &params);

} // namespace qwalk
