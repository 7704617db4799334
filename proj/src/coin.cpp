#include "qwalk/coin.hpp"

#include "qwalk/errors.hpp"

#include <cmath>
#include <string>

namespace qwalk {

CoinState::CoinState(Complex<double> alpha, Complex<double> beta) : spinor_(alpha, beta) {
  const double norm = spinor_.squaredNorm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > state_tolerance) {
    throw validation_error("coin state must be normalized (|alpha|^2 + |beta|^2 = " +
                           std::to_string(norm) + ")");
  }
}

CoinState CoinState::normalized(Complex<double> alpha, Complex<double> beta) {
  const double norm = std::sqrt(std::norm(alpha) + std::norm(beta));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw validation_error("coin state must have non-zero finite norm");
  }
  return {alpha / norm, beta / norm};
}

CoinState CoinState::meridian(double theta) {
  return {std::cos(theta / 2), std::sin(theta / 2)};
}

PauliExpectations coin_expectations(const CoinState &coin) {
  const Spinor2d &psi = coin.spinor();
  return {expectation(psi, pauli(PauliAxis::x)), expectation(psi, pauli(PauliAxis::y)),
          expectation(psi, pauli(PauliAxis::z))};
}

} // namespace qwalk
