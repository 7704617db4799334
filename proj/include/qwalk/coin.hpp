#pragma once

#include "qwalk/linalg.hpp"

namespace qwalk {

inline constexpr double state_tolerance = 1e-12;
inline constexpr double distribution_tolerance = 1e-10;

/// Normalized two-component spinor α|L⟩ + β|R⟩. |L⟩ is the σ_z = +1 state.
///
/// The same type carries the SSH sublattice spinor, read as (A, B).
class CoinState {
public:
  /// Throws validation_error unless |α|² + |β|² = 1 within 1e-12.
  CoinState(Complex<double> alpha, Complex<double> beta);
  explicit CoinState(const Spinor2d &spinor) : CoinState(spinor(0), spinor(1)) {}

  /// Rescales (α, β) to unit norm; rejects the zero vector.
  static CoinState normalized(Complex<double> alpha, Complex<double> beta);

  static CoinState left() { return {1.0, 0.0}; }
  static CoinState right() { return {0.0, 1.0}; }

  /// cos(θ/2)|L⟩ + sin(θ/2)|R⟩, a point on the x–z meridian of the sphere.
  static CoinState meridian(double theta);

  Complex<double> alpha() const { return spinor_(0); }
  Complex<double> beta() const { return spinor_(1); }
  const Spinor2d &spinor() const { return spinor_; }

  friend bool operator==(const CoinState &a, const CoinState &b) {
    return a.spinor_ == b.spinor_;
  }

private:
  Spinor2d spinor_;
};

struct PauliExpectations {
  double sx;
  double sy;
  double sz;
};

/// ⟨φ|σ_i|φ⟩ for i = x, y, z.
PauliExpectations coin_expectations(const CoinState &coin);

} // namespace qwalk
