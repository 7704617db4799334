#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace qwalk {

template <typename Scalar> using Complex = std::complex<Scalar>;

/// Two-component complex spinor over a two-level basis (coin or sublattice).
template <typename Scalar> using Spinor = Eigen::Matrix<Complex<Scalar>, 2, 1>;

template <typename Scalar> using Matrix2 = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Spinor2d = Spinor<double>;
using Matrix2cd = Matrix2<double>;
using Vector3r = Vector3<double>;

template <typename Scalar> constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

enum class PauliAxis { x, y, z };

template <typename Scalar = double> Matrix2<Scalar> pauli(PauliAxis axis) {
  using C = Complex<Scalar>;
  Matrix2<Scalar> m;
  switch (axis) {
  case PauliAxis::x:
    m << C(0), C(1), C(1), C(0);
    break;
  case PauliAxis::y:
    m << C(0), C(0, -1), C(0, 1), C(0);
    break;
  case PauliAxis::z:
    m << C(1), C(0), C(0), C(-1);
    break;
  }
  return m;
}

/// n·σ for a real 3-vector n.
template <typename Derived>
Matrix2<typename Derived::Scalar> pauli_dot(const Eigen::MatrixBase<Derived> &n) {
  using Scalar = typename Derived::Scalar;
  return Complex<Scalar>(n(0)) * pauli<Scalar>(PauliAxis::x) +
         Complex<Scalar>(n(1)) * pauli<Scalar>(PauliAxis::y) +
         Complex<Scalar>(n(2)) * pauli<Scalar>(PauliAxis::z);
}

/// cos(θ)·I − i·sin(θ)·(n·σ), the exact exponential exp(−iθ n·σ) for unit n.
template <typename Derived>
Matrix2<typename Derived::Scalar> su2_exponential(typename Derived::Scalar theta,
                                                  const Eigen::MatrixBase<Derived> &n) {
  using Scalar = typename Derived::Scalar;
  return Complex<Scalar>(std::cos(theta)) * Matrix2<Scalar>::Identity() -
         Complex<Scalar>(0, std::sin(theta)) * pauli_dot(n);
}

/// Expectation value ⟨ψ|A|ψ⟩; real part only (A Hermitian).
template <typename Scalar>
Scalar expectation(const Spinor<Scalar> &psi, const Matrix2<Scalar> &op) {
  return std::real(psi.dot(op * psi));
}

/// Rotation of a real 3-vector by `angle` about the x-axis.
template <typename Scalar> Eigen::Matrix<Scalar, 3, 3> rotation_about_x(Scalar angle) {
  return Eigen::AngleAxis<Scalar>(angle, Vector3<Scalar>::UnitX()).toRotationMatrix();
}

/// Largest absolute entry, the norm used for all matrix tolerances here.
template <typename Derived> auto max_abs(const Eigen::MatrixBase<Derived> &m) {
  return m.cwiseAbs().maxCoeff();
}

/// Wrap an angle into [−π, π).
template <typename Scalar> Scalar wrap_angle(Scalar k) {
  const Scalar two_pi = 2 * pi_v<Scalar>;
  Scalar w = std::fmod(k + pi_v<Scalar>, two_pi);
  if (w < 0) w += two_pi;
  w -= pi_v<Scalar>;
  return w >= pi_v<Scalar> ? -pi_v<Scalar> : w;
}

} // namespace qwalk
