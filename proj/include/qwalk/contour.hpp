#pragma once

#include <cstddef>

#include "qwalk/linalg.hpp"

namespace qwalk {

/// (1/2πi)∮ f(z) dz on the circle |z − center| = radius, by the
/// trapezoid rule with `points` nodes (spectrally accurate for analytic f).
template <typename Scalar, typename F>
Complex<Scalar> contour_residue(F &&f, Complex<Scalar> center, Scalar radius, int points = 64) {
  Complex<Scalar> acc(0);
  for (int j = 0; j < points; ++j) {
    const Scalar theta = 2 * pi_v<Scalar> * Scalar(j) / Scalar(points);
    const Complex<Scalar> offset = std::polar(radius, theta);
    acc += f(center + offset) * offset;
  }
  return acc / Scalar(points);
}

/// ∫_{−π}^{π} g(k) dk/2π by the composite trapezoid rule on the uniform grid
/// k_j = −π + 2πj/M, which for a periodic integrand is the plain mean.
template <typename F> double brillouin_zone_average(F &&g, std::size_t points) {
  double acc = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double k = -pi_v<double> + 2 * pi_v<double> * double(j) / double(points);
    acc += g(k);
  }
  return acc / double(points);
}

} // namespace qwalk
