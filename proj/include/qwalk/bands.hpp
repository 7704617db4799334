#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

inline constexpr double gap_tolerance = 1e-9;
inline constexpr double transition_guard = 1e-6;

// ---------------------------------------------------------------------------
// Closed-form band structure of the q = 1/2 walk (upper band, E ∈ [0, π]).
//
//   cos E = [cos(δ/2) + sin(δ/2) cos k] / √2
//   N²    = 2 sin²E = sin²(δ/2) sin²k + 1 − sin δ cos k
//   V     = dE/dk = sin(δ/2) sin k / N
//   n     = (cos(δ/2) − sin(δ/2) cos k, −sin(δ/2) sin k, sin(δ/2) sin k) / N
//
// N² is evaluated as a sum of squares (see bloch_norm_squared) so that it
// vanishes at (δ, k) = (π/2, 0) and (3π/2, π) without cancellation nearby.
// ---------------------------------------------------------------------------

/// N(k)² = 2(1 − cos²E).
template <typename Scalar> Scalar bloch_norm_squared(Scalar delta, Scalar k) {
  const Scalar s = std::sin(delta / 2);
  const Scalar sk = std::sin(k);
  // 1 − sin δ cos k = 2 sin²u cos²(k/2) + 2 cos²u sin²(k/2), u = π/4 − δ/2,
  // a sum of non-negative terms that stays accurate as the gap closes.
  const Scalar u = pi_v<Scalar> / 4 - delta / 2;
  const Scalar su = std::sin(u);
  const Scalar cu = std::cos(u);
  const Scalar sh = std::sin(k / 2);
  const Scalar ch = std::cos(k / 2);
  return s * s * sk * sk + 2 * (su * su * ch * ch + cu * cu * sh * sh);
}

template <typename Scalar> struct QuasiEnergyPair {
  Scalar upper;
  Scalar lower;
};

/// ±E(δ, k); the upper branch lies in [0, π].
template <typename Scalar> QuasiEnergyPair<Scalar> quasi_energy(Scalar delta, Scalar k) {
  const Scalar cos_e = (std::cos(delta / 2) + std::sin(delta / 2) * std::cos(k)) / std::sqrt(Scalar(2));
  const Scalar sin_e = std::sqrt(std::max(bloch_norm_squared(delta, k), Scalar(0)) / 2);
  const Scalar e = std::atan2(sin_e, cos_e);
  return {e, -e};
}

/// Group velocity of the upper band. Throws gap_closure_error where
/// sin E < 1e-9.
template <typename Scalar> Scalar group_velocity(Scalar delta, Scalar k) {
  const Scalar norm = std::sqrt(std::max(bloch_norm_squared(delta, k), Scalar(0)));
  if (norm / std::sqrt(Scalar(2)) < Scalar(gap_tolerance)) {
    throw gap_closure_error("group velocity undefined at a gap closure");
  }
  return std::sin(delta / 2) * std::sin(k) / norm;
}

/// V², finite everywhere. At an exact gap closure V jumps sign but V² has the
/// one-sided limit sin²(δ/2) / (sin²(δ/2) + 1/2), which is returned there.
template <typename Scalar> Scalar velocity_squared(Scalar delta, Scalar k) {
  const Scalar s = std::sin(delta / 2);
  const Scalar num = s * s * std::sin(k) * std::sin(k);
  const Scalar den = bloch_norm_squared(delta, k);
  if (den <= Scalar(1e-24)) return s * s / (s * s + Scalar(0.5));
  return num / den;
}

template <typename Scalar> struct BlochVector {
  /// Absent at a gap closure (N < 1e-9).
  std::optional<Vector3<Scalar>> n;
  Scalar normalization;
};

template <typename Scalar> BlochVector<Scalar> bloch_vector(Scalar delta, Scalar k) {
  const Scalar c = std::cos(delta / 2);
  const Scalar s = std::sin(delta / 2);
  const Scalar norm = std::sqrt(std::max(bloch_norm_squared(delta, k), Scalar(0)));
  if (norm < Scalar(gap_tolerance)) return {std::nullopt, norm};
  const Scalar ny = -s * std::sin(k) / norm;
  return {Vector3<Scalar>((c - s * std::cos(k)) / norm, ny, -ny), norm};
}

/// Per-k band record of the walk.
struct BandPoint {
  double k;
  double energy;
  std::optional<double> velocity;
  std::optional<Vector3r> n;
  double normalization;
};

BandPoint band_point(double delta, double k);

// ---------------------------------------------------------------------------
// Bloch operator and its SU(2) decomposition.
// ---------------------------------------------------------------------------

/// Momentum-space single-step operator U(k) = Q(k)·W_qwp under the
/// convention |k⟩ = Σ_m e^{imk}|m⟩.
struct BlochMatrix {
  double k;
  Matrix2cd matrix;
};

BlochMatrix bloch_operator(const StepParams &params, double k);

/// e^{iφ}·U = cos E·I − i sin E·(n·σ), E ∈ [0, π], φ ∈ [−π/2, π/2).
template <typename Scalar> struct BlochDecomposition {
  Scalar energy;
  /// Absent when sin E < 1e-9.
  std::optional<Vector3<Scalar>> n;
  Scalar phase;
};

template <typename Scalar>
BlochDecomposition<Scalar> diagonalize_bloch(const Matrix2<Scalar> &u) {
  using C = Complex<Scalar>;
  if (max_abs(Matrix2<Scalar>(u * u.adjoint() - Matrix2<Scalar>::Identity())) > Scalar(1e-9)) {
    throw validation_error("diagonalize_bloch expects a unitary matrix");
  }
  const Scalar phase = -std::arg(u.determinant()) / 2;
  const Matrix2<Scalar> v = std::polar(Scalar(1), phase) * u;
  const Scalar cos_e = std::real(v.trace()) / 2;
  // −i sin E n_j = tr(σ_j V)/2
  const Vector3<Scalar> w(std::real(C(0, 1) * (pauli<Scalar>(PauliAxis::x) * v).trace()) / 2,
                          std::real(C(0, 1) * (pauli<Scalar>(PauliAxis::y) * v).trace()) / 2,
                          std::real(C(0, 1) * (pauli<Scalar>(PauliAxis::z) * v).trace()) / 2);
  const Scalar sin_e = w.norm();
  const Scalar energy = std::atan2(sin_e, cos_e);
  if (sin_e < Scalar(gap_tolerance)) return {energy, std::nullopt, phase};
  return {energy, Vector3<Scalar>(w / sin_e), phase};
}

/// Global k-map k_formula = (reflected ? −k : k) + k_offset that best aligns
/// the spectrum of bloch_operator with the closed-form band formulas.
struct BlochAlignment {
  double k_offset;
  bool reflected;
  double energy_residual;
  double vector_residual;
};

/// Scans k_offset ∈ {0, ±π/2, π} with and without reflection on a
/// `grid`-point k mesh. Vector residuals skip points with sin E < 1e-6.
BlochAlignment detect_bloch_alignment(double delta, int grid = 512);

/// H'(k) = E(k)·n'(k)·σ with n' = R_x(π/4)·n, the frame where the chiral
/// axis is z and n'_z = 0.
Matrix2cd chiral_frame_hamiltonian(double delta, double k);

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

struct WindingResult {
  int winding;
  Vector3r chiral_axis;
  /// Unwrapped planar angle of the Bloch vector at each k sample.
  std::vector<double> arc;
  /// |total/2π − W|.
  double residual;
  /// max_k |a·n(k)| over the sample grid.
  double max_axis_projection;
};

/// Signed turns of the closed curve k ↦ p(k) as k crosses [−π, π), sampled
/// on `grid` uniform nodes. Any step that sweeps more than π/4 is bisected
/// until it does not, so fast rotation near a small gap is not aliased.
/// `arc` receives the unwrapped angle at every node.
double planar_turns(const std::function<Eigen::Vector2d(double)> &curve, int grid,
                    std::vector<double> *arc = nullptr);

/// Rejects δ within 1e-6 of π/2 or 3π/2 and grids below 64 points.
WindingResult winding_number(double delta, int grid = 1024);

// ---------------------------------------------------------------------------
// Spreading coefficient L(δ) = ∫ V² dk/2π
// ---------------------------------------------------------------------------

enum class SpreadingMethod { quadrature, closed_form, residue };

std::string_view to_string(SpreadingMethod method);

struct SpreadingCoefficient {
  double value;
  SpreadingMethod method;
};

/// Trapezoid rule on M ≥ 256 uniform nodes.
SpreadingCoefficient spreading_coefficient_numeric(double delta, int grid = 4096);

/// Piecewise closed form; δ must lie in [0, 2π].
SpreadingCoefficient spreading_coefficient_closed(double delta);

/// Σ 2πi·r over the poles inside the unit circle (see residue_oracle).
SpreadingCoefficient spreading_coefficient_residue(double delta);

/// Integrand f_δ(z) with L(δ) = ∮_{|z|=1} f_δ(z) dz.
template <typename Scalar> Complex<Scalar> spreading_integrand(Scalar delta, Complex<Scalar> z) {
  using C = Complex<Scalar>;
  const C one(1);
  const C z2 = z * z;
  const Scalar s = std::sin(delta / 2);
  // (1+z²)² cos δ − z⁴ − 10z² − 1 with cos δ − 1 = −2 sin²(δ/2) taken exactly,
  // since the two cancel for small δ.
  const C den = pi_v<Scalar> * z *
                (Scalar(-2) * s * s * (one + z2) * (one + z2) - Scalar(8) * z2 -
                 C(0, 4) * z * (z2 - one) * std::sin(delta));
  return C(0, 1) * (one + z2) * (one + z2) * s * s / den;
}

struct ResidueReport {
  std::vector<Complex<double>> poles;
  /// Residues r_k from the analytic formulas.
  std::vector<Complex<double>> residues;
  /// Residues from small contour integrals around each pole.
  std::vector<Complex<double>> numeric_residues;
  std::vector<bool> inside;
  /// Σ_{|z_k|<1} 2πi·r_k
  Complex<double> total;
  /// max_k |2πi·(r_k − r_k^numeric)|
  double max_discrepancy;
  bool verified;
};

inline constexpr double residue_tolerance = 1e-8;

/// Poles z_k and residues of f_δ, each residue cross-checked by a 64-node
/// contour integral. Rejects δ ∉ (0, 2π) and δ with a pole within 1e-6 of |z| = 1.
ResidueReport residue_oracle(double delta);

// ---------------------------------------------------------------------------
// Asymptotic moments
// ---------------------------------------------------------------------------

struct AsymptoticMoments {
  double m1_over_n;
  double m2_over_n2;
};

/// M1/n → (s_y − s_z)·L(δ), M2/n² → L(δ).
AsymptoticMoments asymptotic_moments(double delta, const CoinState &coin);

} // namespace qwalk
