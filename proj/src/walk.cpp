#include "qwalk/walk.hpp"

#include "qwalk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qwalk {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

double reduce_delta(double delta) {
  if (!std::isfinite(delta)) throw validation_error("delta must be finite");
  if (delta >= 0.0 && delta <= two_pi) return delta;
  double r = std::fmod(delta, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

Complex<double> entry_or_zero(const SiteAmplitudes &a, std::int64_t row, int coin) {
  return (row >= 0 && row < a.rows()) ? a(row, coin) : Complex<double>(0.0);
}

// i·s·z without forming the full complex product.
Complex<double> times_i(double s, Complex<double> z) { return {-s * z.imag(), s * z.real()}; }

// q-plate from window `in` (first site in_min) into window `out` (first site out_min).
void qplate_into(const SiteAmplitudes &in, std::int64_t in_min, SiteAmplitudes &out,
                 std::int64_t out_min, double c, double s, int shift) {
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const std::int64_t row = out_min + i - in_min;
    out(i, 0) = c * entry_or_zero(in, row, 0) + times_i(s, entry_or_zero(in, row + shift, 1));
    out(i, 1) = c * entry_or_zero(in, row, 1) + times_i(s, entry_or_zero(in, row - shift, 0));
  }
}

} // namespace

StepParams::StepParams(double delta, double q) : delta_(reduce_delta(delta)), shift_(0) {
  const double twice = 2.0 * q;
  if (!std::isfinite(twice) || twice < 1.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    throw validation_error("q must be a positive half-integer (2q integer >= 1), got " +
                           std::to_string(q));
  }
  shift_ = static_cast<int>(std::lround(twice));
}

LatticeState::LatticeState(std::int64_t min_site, SiteAmplitudes amplitudes)
    : min_site_(min_site), amplitudes_(std::move(amplitudes)) {
  const double norm = amplitudes_.squaredNorm();
  if (amplitudes_.rows() == 0 || !std::isfinite(norm) ||
      std::abs(norm - 1.0) > state_tolerance) {
    throw validation_error("lattice state must be normalized (norm^2 = " + std::to_string(norm) +
                           ")");
  }
}

LatticeState LatticeState::localized(std::int64_t site, const CoinState &coin,
                                     std::int64_t padding) {
  if (padding < 0) throw validation_error("padding must be non-negative");
  SiteAmplitudes amps = SiteAmplitudes::Zero(2 * padding + 1, 2);
  amps.row(padding) = coin.spinor().transpose();
  return {unchecked_tag{}, site - padding, std::move(amps)};
}

Spinor2d LatticeState::at(std::int64_t m) const {
  const std::int64_t row = m - min_site_;
  if (row < 0 || row >= amplitudes_.rows()) return Spinor2d::Zero();
  return amplitudes_.row(row).transpose();
}

LatticeState LatticeState::padded(std::int64_t left, std::int64_t right) const {
  if (left < 0 || right < 0) throw validation_error("padding must be non-negative");
  SiteAmplitudes amps = SiteAmplitudes::Zero(amplitudes_.rows() + left + right, 2);
  amps.middleRows(left, amplitudes_.rows()) = amplitudes_;
  return {unchecked_tag{}, min_site_ - left, std::move(amps)};
}

LatticeState apply_qwp(const LatticeState &state) {
  SiteAmplitudes out = state.amplitudes_ * qwp_matrix().transpose();
  return {LatticeState::unchecked_tag{}, state.min_site_, std::move(out)};
}

LatticeState apply_qplate(const LatticeState &state, const StepParams &params) {
  const double c = std::cos(params.delta() / 2);
  const double s = std::sin(params.delta() / 2);
  const int shift = params.shift();
  const SiteAmplitudes &in = state.amplitudes_;

  std::int64_t lo = state.min_site();
  std::int64_t hi = state.max_site();
  if (s != 0.0) {
    for (Eigen::Index i = 0; i < in.rows(); ++i) {
      if (in(i, 1) != Complex<double>(0.0)) {
        lo = std::min(lo, state.min_site() + i - shift);
        break;
      }
    }
    for (Eigen::Index i = in.rows() - 1; i >= 0; --i) {
      if (in(i, 0) != Complex<double>(0.0)) {
        hi = std::max(hi, state.min_site() + i + shift);
        break;
      }
    }
  }
  SiteAmplitudes out(hi - lo + 1, 2);
  qplate_into(in, state.min_site(), out, lo, c, s, shift);
  return {LatticeState::unchecked_tag{}, lo, std::move(out)};
}

LatticeState step(const LatticeState &state, const StepParams &params) {
  return apply_qplate(apply_qwp(state), params);
}

namespace {

// Advances `amps` in place on a window already wide enough for every step.
void advance_fixed_window(SiteAmplitudes &amps, SiteAmplitudes &scratch, std::int64_t min_site,
                          double c, double s, int shift) {
  scratch.noalias() = amps * qwp_matrix().transpose();
  qplate_into(scratch, min_site, amps, min_site, c, s, shift);
}

} // namespace

std::vector<LatticeState> evolve(const LatticeState &initial, const StepParams &params,
                                 std::int64_t steps) {
  if (steps < 0) throw validation_error("step count must be non-negative");
  const std::int64_t pad = params.shift() * steps;
  const double c = std::cos(params.delta() / 2);
  const double s = std::sin(params.delta() / 2);

  std::vector<LatticeState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(steps) + 1);
  trajectory.push_back(initial.padded(pad, pad));

  SiteAmplitudes amps = trajectory.back().amplitudes_;
  SiteAmplitudes scratch(amps.rows(), 2);
  const std::int64_t min_site = trajectory.back().min_site_;
  for (std::int64_t i = 0; i < steps; ++i) {
    advance_fixed_window(amps, scratch, min_site, c, s, params.shift());
    trajectory.push_back({LatticeState::unchecked_tag{}, min_site, amps});
  }
  return trajectory;
}

LatticeState evolve_final(const LatticeState &initial, const StepParams &params,
                          std::int64_t steps) {
  if (steps < 0) throw validation_error("step count must be non-negative");
  const std::int64_t pad = params.shift() * steps;
  const double c = std::cos(params.delta() / 2);
  const double s = std::sin(params.delta() / 2);

  LatticeState state = initial.padded(pad, pad);
  SiteAmplitudes scratch(state.amplitudes_.rows(), 2);
  for (std::int64_t i = 0; i < steps; ++i) {
    advance_fixed_window(state.amplitudes_, scratch, state.min_site_, c, s, params.shift());
  }
  return state;
}

ProbabilityDistribution::ProbabilityDistribution(std::int64_t min_site,
                                                 std::vector<double> probabilities)
    : min_site_(min_site), probabilities_(std::move(probabilities)) {
  if (probabilities_.empty()) throw validation_error("distribution must not be empty");
  for (double p : probabilities_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw validation_error("probabilities must be finite and non-negative");
    }
  }
  const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
  if (std::abs(total - 1.0) > distribution_tolerance) {
    throw validation_error("probabilities must sum to 1 (sum = " + std::to_string(total) + ")");
  }
}

double ProbabilityDistribution::at(std::int64_t m) const {
  const std::int64_t i = m - min_site_;
  if (i < 0 || i >= static_cast<std::int64_t>(probabilities_.size())) return 0.0;
  return probabilities_[static_cast<std::size_t>(i)];
}

ProbabilityDistribution distribution(const LatticeState &state) {
  const auto &amps = state.amplitudes();
  std::vector<double> p(static_cast<std::size_t>(amps.rows()));
  for (Eigen::Index i = 0; i < amps.rows(); ++i) {
    p[static_cast<std::size_t>(i)] = std::norm(amps(i, 0)) + std::norm(amps(i, 1));
  }
  return {state.min_site(), std::move(p)};
}

RawMoments raw_moments(const ProbabilityDistribution &dist) {
  RawMoments r{0.0, 0.0};
  std::int64_t m = dist.min_site();
  for (double p : dist.probabilities()) {
    const auto x = static_cast<double>(m++);
    r.m1 += x * p;
    r.m2 += x * x * p;
  }
  return r;
}

MomentReport moments(const ProbabilityDistribution &dist, std::int64_t steps) {
  if (steps < 1) throw validation_error("normalized moments need a step count >= 1");
  const RawMoments r = raw_moments(dist);
  const auto n = static_cast<double>(steps);
  return {steps, r.m1, r.m2, r.m1 / n, r.m2 / (n * n)};
}

} // namespace qwalk
