#include "qwalk/bands.hpp"

#include "qwalk/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double sqrt2 = std::numbers::sqrt2;

bool near_transition(double delta) {
  return std::abs(delta - pi / 2) <= transition_guard ||
         std::abs(delta - 3 * pi / 2) <= transition_guard;
}

double signed_angle(const Eigen::Vector2d &a, const Eigen::Vector2d &b) {
  return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
}

double swept_angle(const std::function<Eigen::Vector2d(double)> &curve, double k0, double k1,
                   const Eigen::Vector2d &p0, const Eigen::Vector2d &p1, int depth) {
  const double step = signed_angle(p0, p1);
  if (std::abs(step) <= pi / 4 || depth == 0) return step;
  const double km = 0.5 * (k0 + k1);
  const Eigen::Vector2d pm = curve(km);
  return swept_angle(curve, k0, km, p0, pm, depth - 1) +
         swept_angle(curve, km, k1, pm, p1, depth - 1);
}

} // namespace

BandPoint band_point(double delta, double k) {
  const auto energy = quasi_energy(delta, k);
  const auto bv = bloch_vector(delta, k);
  BandPoint p{k, energy.upper, std::nullopt, bv.n, bv.normalization};
  if (bv.n) p.velocity = group_velocity(delta, k);
  return p;
}

BlochMatrix bloch_operator(const StepParams &params, double k) {
  using C = Complex<double>;
  const double c = std::cos(params.delta() / 2);
  const double s = std::sin(params.delta() / 2);
  const double phase = params.shift() * k;
  Matrix2cd q;
  q << C(c), C(0, s) * std::polar(1.0, phase), C(0, s) * std::polar(1.0, -phase), C(c);
  return {wrap_angle(k), q * qwp_matrix()};
}

BlochAlignment detect_bloch_alignment(double delta, int grid) {
  if (grid < 8) throw validation_error("alignment grid must have at least 8 points");
  const StepParams params(delta);
  struct Sample {
    double k;
    BlochDecomposition<double> dec;
  };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) {
    const double k = -pi + 2 * pi * j / grid;
    samples.push_back({k, diagonalize_bloch(bloch_operator(params, k).matrix)});
  }

  BlochAlignment best{0.0, false, std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
  for (bool reflected : {false, true}) {
    for (double offset : {0.0, pi / 2, -pi / 2, pi}) {
      double e_res = 0.0;
      double n_res = 0.0;
      for (const auto &sample : samples) {
        const double kf = wrap_angle((reflected ? -sample.k : sample.k) + offset);
        e_res = std::max(e_res, std::abs(sample.dec.energy - quasi_energy(delta, kf).upper));
        if (std::sin(sample.dec.energy) < 1e-6 || !sample.dec.n) continue;
        const auto bv = bloch_vector(delta, kf);
        if (!bv.n) continue;
        n_res = std::max(n_res, max_abs(*sample.dec.n - *bv.n));
      }
      if (std::max(e_res, n_res) < std::max(best.energy_residual, best.vector_residual)) {
        best = {offset, reflected, e_res, n_res};
      }
    }
  }
  return best;
}

Matrix2cd chiral_frame_hamiltonian(double delta, double k) {
  const auto bv = bloch_vector(delta, k);
  if (!bv.n) return Matrix2cd::Zero();
  const Vector3r rotated = rotation_about_x(pi / 4) * *bv.n;
  return Complex<double>(quasi_energy(delta, k).upper) * pauli_dot(rotated);
}

double planar_turns(const std::function<Eigen::Vector2d(double)> &curve, int grid,
                    std::vector<double> *arc) {
  if (grid < 2) throw validation_error("planar curve needs at least two samples");
  std::vector<double> ks(static_cast<std::size_t>(grid));
  std::vector<Eigen::Vector2d> pts(static_cast<std::size_t>(grid));
  for (int j = 0; j < grid; ++j) {
    ks[j] = -pi + 2 * pi * j / grid;
    pts[j] = curve(ks[j]);
  }
  double total = 0.0;
  if (arc) {
    arc->assign(1, std::atan2(pts[0].y(), pts[0].x()));
    arc->reserve(ks.size());
  }
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const std::size_t next = (j + 1) % ks.size();
    const double k1 = next == 0 ? pi : ks[next];
    total += swept_angle(curve, ks[j], k1, pts[j], pts[next], 40);
    if (arc && next != 0) arc->push_back(arc->front() + total);
  }
  return total / (2 * pi);
}

WindingResult winding_number(double delta, int grid) {
  if (grid < 64) throw validation_error("winding grid must have at least 64 points");
  if (!(delta >= 0.0 && delta <= 2 * pi)) {
    throw validation_error("delta must lie in [0, 2*pi] for the winding number");
  }
  if (near_transition(delta)) throw gap_closure_error("winding undefined at transition");

  const Eigen::Matrix3d rotation = rotation_about_x(pi / 4);
  const auto planar = [&](double k) -> Eigen::Vector2d {
    const auto bv = bloch_vector(delta, k);
    if (!bv.n) throw gap_closure_error("winding undefined at transition");
    const Vector3r r = rotation * *bv.n;
    return {r.x(), r.y()};
  };

  WindingResult result;
  result.chiral_axis = Vector3r(0.0, 1.0, 1.0) / sqrt2;
  const double turns = planar_turns(planar, grid, &result.arc);
  result.winding = static_cast<int>(std::lround(turns));
  result.residual = std::abs(turns - result.winding);
  result.max_axis_projection = 0.0;
  for (int j = 0; j < grid; ++j) {
    const auto bv = bloch_vector(delta, -pi + 2 * pi * j / grid);
    result.max_axis_projection =
        std::max(result.max_axis_projection, std::abs(result.chiral_axis.dot(*bv.n)));
  }
  if (result.residual >= 1e-6) {
    throw std::runtime_error("winding number did not resolve to an integer");
  }
  return result;
}

std::string_view to_string(SpreadingMethod method) {
  switch (method) {
  case SpreadingMethod::quadrature:
    return "quadrature";
  case SpreadingMethod::closed_form:
    return "closed_form";
  case SpreadingMethod::residue:
    return "residue";
  }
  return "unknown";
}

SpreadingCoefficient spreading_coefficient_numeric(double delta, int grid) {
  if (grid < 256) throw validation_error("quadrature grid must have at least 256 points");
  const double value = brillouin_zone_average(
      [delta](double k) { return velocity_squared(delta, k); }, static_cast<std::size_t>(grid));
  return {value, SpreadingMethod::quadrature};
}

SpreadingCoefficient spreading_coefficient_closed(double delta) {
  if (!(delta >= 0.0 && delta <= 2 * pi)) {
    throw validation_error("delta must lie in [0, 2*pi]");
  }
  double value;
  if (delta <= pi / 2) {
    const double s = std::sin(delta / 4);
    value = 2 * s * s;
  } else if (delta <= 3 * pi / 2) {
    value = 1 - 1 / sqrt2;
  } else {
    const double c = std::cos(delta / 4);
    value = 2 * c * c;
  }
  return {value, SpreadingMethod::closed_form};
}

ResidueReport residue_oracle(double delta) {
  if (!(delta > 0.0 && delta < 2 * pi)) {
    throw validation_error("residue method needs delta strictly inside (0, 2*pi)");
  }
  using C = Complex<double>;
  const double t = std::tan(delta / 4);
  const double ct = 1 / t;
  const double ch = std::cos(delta / 2);

  ResidueReport report;
  report.poles = {C(0), C(0, (sqrt2 - 1) * ct), C(0, (sqrt2 + 1) * t), C(0, -(sqrt2 + 1) * ct),
                  C(0, -(sqrt2 - 1) * t)};
  const std::array<double, 5> two_pi_i_r = {1.0, (-sqrt2 + 2 * ch) / 4, (sqrt2 - 2 * ch) / 4,
                                            (sqrt2 + 2 * ch) / 4, (-sqrt2 - 2 * ch) / 4};
  for (const C &z : report.poles) {
    if (std::abs(std::abs(z) - 1.0) < transition_guard) {
      throw validation_error("a pole lies within 1e-6 of the unit circle");
    }
  }

  const C two_pi_i(0, 2 * pi);
  const auto f = [delta](C z) { return spreading_integrand(delta, z); };
  report.total = C(0);
  report.max_discrepancy = 0.0;
  for (std::size_t i = 0; i < report.poles.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < report.poles.size(); ++j) {
      if (j != i) nearest = std::min(nearest, std::abs(report.poles[i] - report.poles[j]));
    }
    const double radius = std::min(1e-3, 0.25 * nearest);
    const C numeric = contour_residue(f, report.poles[i], radius, 64);
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

SpreadingCoefficient spreading_coefficient_residue(double delta) {
  return {residue_oracle(delta).total.real(), SpreadingMethod::residue};
}

AsymptoticMoments asymptotic_moments(double delta, const CoinState &coin) {
  const double l = spreading_coefficient_closed(delta).value;
  const auto s = coin_expectations(coin);
  return {(s.sy - s.sz) * l, l};
}

} // namespace qwalk
