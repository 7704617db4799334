#include "qwalk/ssh.hpp"

#include "qwalk/contour.hpp"
#include "qwalk/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <string>

namespace qwalk {

namespace {

constexpr double pi = std::numbers::pi;

bool gapless(const SSHParams &p) {
  return std::abs(p.t() - p.t_prime()) <= transition_guard * p.max_hopping();
}

// Smallest n ≥ lower whose only prime factors are 2, 3 and 5.
std::int64_t fft_friendly(std::int64_t lower) {
  for (std::int64_t n = std::max<std::int64_t>(lower, 1);; ++n) {
    std::int64_t r = n;
    for (std::int64_t f : {2, 3, 5})
      while (r % f == 0) r /= f;
    if (r == 1) return n;
  }
}

} // namespace

SSHParams::SSHParams(double t, double t_prime) : t_(t), t_prime_(t_prime) {
  if (!std::isfinite(t) || !std::isfinite(t_prime) || t < 0.0 || t_prime < 0.0) {
    throw validation_error("t and tprime must be finite and non-negative");
  }
  if (t == 0.0 && t_prime == 0.0) throw validation_error("t and tprime cannot both be zero");
}

Vector3r ssh_bloch_field(const SSHParams &params, double k) {
  return {params.t() - params.t_prime() * std::cos(k), -params.t_prime() * std::sin(k), 0.0};
}

Matrix2cd ssh_bloch_hamiltonian(const SSHParams &params, double k) {
  return pauli_dot(ssh_bloch_field(params, k));
}

SSHBandPoint ssh_band(const SSHParams &params, double k) {
  const Vector3r h = ssh_bloch_field(params, k);
  const double e = h.norm();
  SSHBandPoint p{k, e, std::nullopt, std::nullopt, e < gap_tolerance};
  if (!p.degenerate) {
    p.n = h / e;
    p.velocity = -params.t() * params.t_prime() * std::sin(k) / e;
  }
  return p;
}

double ssh_velocity_squared(const SSHParams &params, double k) {
  const double tt = params.t() * params.t_prime();
  const double e2 = ssh_bloch_field(params, k).squaredNorm();
  if (e2 <= 1e-24) return tt;
  const double sk = std::sin(k);
  return tt * tt * sk * sk / e2;
}

WindingResult ssh_winding(const SSHParams &params, int grid) {
  if (grid < 64) throw validation_error("winding grid must have at least 64 points");
  if (gapless(params)) throw gap_closure_error("winding undefined at transition (t = tprime)");
  const auto planar = [&](double k) -> Eigen::Vector2d {
    const Vector3r h = ssh_bloch_field(params, k);
    return Eigen::Vector2d(h.x(), h.y()) / h.norm();
  };
  WindingResult result;
  result.chiral_axis = Vector3r::UnitZ();
  const double turns = planar_turns(planar, grid, &result.arc);
  result.winding = static_cast<int>(std::lround(turns));
  result.residual = std::abs(turns - result.winding);
  result.max_axis_projection = 0.0;
  if (result.residual >= 1e-6) {
    throw std::runtime_error("winding number did not resolve to an integer");
  }
  return result;
}

std::int64_t SSHEvolutionConfig::minimum_cells() const {
  return 4 * static_cast<std::int64_t>(std::ceil(params.max_hopping() * tau)) + 16;
}

std::int64_t SSHEvolutionConfig::resolved_cells() const {
  return cells == 0 ? fft_friendly(minimum_cells()) : cells;
}

ProbabilityDistribution ssh_evolve(const SSHEvolutionConfig &config) {
  if (!std::isfinite(config.tau) || config.tau < 0.0) {
    throw validation_error("tau must be finite and non-negative");
  }
  if (config.cells != 0 && config.cells < config.minimum_cells()) {
    throw validation_error("cells must be at least " + std::to_string(config.minimum_cells()) +
                           " for tau = " + std::to_string(config.tau) + " (support would wrap)");
  }
  if (config.params.t_prime() == 0.0 || config.tau == 0.0) {
    return ProbabilityDistribution(0, {1.0});
  }

  using C = Complex<double>;
  const std::int64_t n = config.resolved_cells();
  std::vector<C> psi_a(static_cast<std::size_t>(n));
  std::vector<C> psi_b(static_cast<std::size_t>(n));
  const Spinor2d &chi = config.chi0.spinor();
  for (std::int64_t j = 0; j < n; ++j) {
    const double k = 2 * pi * static_cast<double>(j) / static_cast<double>(n);
    const Vector3r h = ssh_bloch_field(config.params, k);
    const double e = h.norm();
    // exp(−iHτ) = cos(Eτ) − i sin(Eτ)/E · h·σ; the E → 0 limit is the identity.
    const double sinc = e > 0.0 ? std::sin(e * config.tau) / e : config.tau;
    const Matrix2cd u = C(std::cos(e * config.tau)) * Matrix2cd::Identity() -
                        C(0, sinc) * pauli_dot(h);
    const Spinor2d out = u * chi;
    psi_a[j] = out(0);
    psi_b[j] = out(1);
  }

  Eigen::FFT<double> fft;
  std::vector<C> cell_a;
  std::vector<C> cell_b;
  fft.inv(cell_a, psi_a);
  fft.inv(cell_b, psi_b);

  // Index j ≥ N/2 is cell j − N; store cells −N/2 … N/2 − 1 contiguously.
  const std::int64_t half = n / 2;
  std::vector<double> probs(static_cast<std::size_t>(n));
  for (std::int64_t m = -half; m < n - half; ++m) {
    const auto j = static_cast<std::size_t>(m < 0 ? m + n : m);
    probs[static_cast<std::size_t>(m + half)] = std::norm(cell_a[j]) + std::norm(cell_b[j]);
  }
  return ProbabilityDistribution(-half, std::move(probs));
}

SSHAsymptoticMoments ssh_asymptotic_moments(const SSHParams &params, const CoinState &chi0) {
  const double l = ssh_L(params, SpreadingMethod::closed_form).value;
  const double sy = coin_expectations(chi0).sy;
  const double t2 = params.t() * params.t();
  return {-sy * l, l, t2 > 0.0 ? l / t2 : std::numeric_limits<double>::quiet_NaN()};
}

SpreadingCoefficient ssh_L(const SSHParams &params, SpreadingMethod method, int grid) {
  switch (method) {
  case SpreadingMethod::closed_form: {
    const double t = params.t();
    const double tp = params.t_prime();
    return {tp < t ? tp * tp / 2 : t * t / 2, method};
  }
  case SpreadingMethod::quadrature: {
    if (grid < 256) throw validation_error("quadrature grid must have at least 256 points");
    const double value = brillouin_zone_average(
        [&](double k) { return ssh_velocity_squared(params, k); }, static_cast<std::size_t>(grid));
    return {value, method};
  }
  case SpreadingMethod::residue:
    return {ssh_residue_oracle(params).total.real(), method};
  }
  throw validation_error("unknown spreading method");
}

ResidueReport ssh_residue_oracle(const SSHParams &params) {
  if (gapless(params)) {
    throw validation_error("residue method rejects |t - tprime| < 1e-6 max(t, tprime): poles on integration path");
  }
  using C = Complex<double>;
  ResidueReport report;
  report.total = C(0);
  report.max_discrepancy = 0.0;
  report.verified = true;
  const double t = params.t();
  const double tp = params.t_prime();
  if (t == 0.0 || tp == 0.0) return report;

  report.poles = {C(0), C(t / tp), C(tp / t)};
  const std::array<double, 3> two_pi_i_r = {(t * t + tp * tp) / 4, (t * t - tp * tp) / 4,
                                            (tp * tp - t * t) / 4};
  const C two_pi_i(0, 2 * pi);
  const auto g = [t, tp](C z) { return ssh_spreading_integrand(t, tp, z); };
  for (std::size_t i = 0; i < report.poles.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < report.poles.size(); ++j) {
      if (j != i) nearest = std::min(nearest, std::abs(report.poles[i] - report.poles[j]));
    }
    const C numeric = contour_residue(g, report.poles[i], std::min(1e-3, 0.25 * nearest), 64);
    report.residues.push_back(C(two_pi_i_r[i]) / two_pi_i);
    report.numeric_residues.push_back(numeric);
    report.max_discrepancy =
        std::max(report.max_discrepancy, std::abs(two_pi_i * numeric - two_pi_i_r[i]));
    const bool inside = std::abs(report.poles[i]) < 1.0;
    report.inside.push_back(inside);
    if (inside) report.total += two_pi_i_r[i];
  }
  report.verified = report.max_discrepancy <= residue_tolerance;
  return report;
}

} // namespace qwalk
