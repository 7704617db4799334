#include "qwalk/experiments.hpp"

#include "qwalk/bands.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/sampling.hpp"
#include "qwalk/ssh.hpp"
#include "qwalk/walk.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qwalk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5g", v);
  return buf;
}

void require_range(const Grid &g, const char *name, double lo, double hi) {
  if (g.start < lo || g.stop > hi) {
    throw validation_error(std::string(name) + " grid must lie in [" + fmt(lo) + ", " + fmt(hi) +
                           "]");
  }
}

// Sampled moments scaled by 1/scale and 1/scale².
SampledEstimate sample(const ProbabilityDistribution &dist, const SweepConfig &config,
                       std::size_t row, double scale) {
  const auto counts = sample_counts(dist, config.shots, derive_seed(config.seed, row));
  const auto est = estimate_moments(counts);
  return {est.m1 / scale, est.m1_error / scale, est.m2 / (scale * scale),
          est.m2_error / (scale * scale)};
}

SweepRow walk_row(double parameter, double delta, std::int64_t steps, const CoinState &coin,
                  const SweepConfig &config, std::size_t row) {
  const StepParams params(delta);
  const auto final_state = evolve_final(LatticeState::localized(0, coin), params, steps);
  const auto dist = distribution(final_state);
  const auto report = moments(dist, steps);
  const auto asym = asymptotic_moments(delta, coin);
  SweepRow out{parameter, report.m1_over_n, report.m2_over_n2, asym.m1_over_n,
               spreading_coefficient_closed(delta).value, std::nullopt, std::nullopt};
  if (config.shots > 0) out.sampled = sample(dist, config, row, static_cast<double>(steps));
  return out;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

} // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
  case SweepKind::delta_sweep:
    return "delta_sweep";
  case SweepKind::coin_sweep:
    return "coin_sweep";
  case SweepKind::ssh_sweep:
    return "ssh_sweep";
  case SweepKind::convergence:
    return "convergence";
  }
  return "unknown";
}

Grid Grid::stepped(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw validation_error("grid step must be positive");
  if (!(stop > start)) throw validation_error("grid stop must exceed start");
  const double span = (stop - start) / step;
  const auto intervals = static_cast<int>(std::lround(span));
  if (intervals < 1) throw validation_error("grid step is larger than the grid span");
  return {start, start + intervals * step, intervals + 1};
}

double Grid::at(int i) const {
  if (i == count - 1) return stop;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<double> Grid::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = at(i);
  return v;
}

void SweepConfig::validate() const {
  if (grid.count < 2) throw validation_error("grid count must be at least 2");
  if (!(grid.start < grid.stop)) throw validation_error("grid start must be below stop");
  if (shots < 0) throw validation_error("shots must be non-negative");
  if (threads < 0) throw validation_error("threads must be non-negative");
  switch (kind) {
  case SweepKind::delta_sweep:
    require_range(grid, "delta", 0.0, 2 * pi);
    if (steps < 1) throw validation_error("n must be at least 1");
    break;
  case SweepKind::coin_sweep:
    require_range(grid, "theta", 0.0, pi);
    if (steps < 1) throw validation_error("n must be at least 1");
    if (!(delta >= 0.0 && delta <= 2 * pi)) throw validation_error("delta must lie in [0, 6.2832]");
    break;
  case SweepKind::ssh_sweep:
    require_range(grid, "tprime", 0.0, std::numeric_limits<double>::infinity());
    if (!(tau > 0.0) || !std::isfinite(tau)) throw validation_error("tau must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw validation_error("t must be non-negative");
    break;
  case SweepKind::convergence:
    if (grid.start < 1.0) throw validation_error("convergence grid (step counts) must start at 1 or more");
    if (!(delta >= 0.0 && delta <= 2 * pi)) throw validation_error("delta must lie in [0, 6.2832]");
    break;
  }
}

std::vector<SweepRow> run_delta_sweep(const SweepConfig &config) {
  config.validate();
  const auto values = config.grid.values();
  return ordered_map(values.size(), config.threads, [&](std::size_t i) {
    return walk_row(values[i], values[i], config.steps, config.coin, config, i);
  });
}

std::vector<SweepRow> run_coin_sweep(const SweepConfig &config) {
  config.validate();
  const auto values = config.grid.values();
  return ordered_map(values.size(), config.threads, [&](std::size_t i) {
    return walk_row(values[i], config.delta, config.steps, CoinState::meridian(values[i]), config, i);
  });
}

std::vector<SweepRow> run_convergence(const SweepConfig &config) {
  config.validate();
  const auto values = config.grid.values();
  return ordered_map(values.size(), config.threads, [&](std::size_t i) {
    const auto n = static_cast<std::int64_t>(std::llround(values[i]));
    return walk_row(static_cast<double>(n), config.delta, n, config.coin, config, i);
  });
}

std::vector<SweepRow> run_ssh_sweep(const SweepConfig &config) {
  config.validate();
  const auto values = config.grid.values();
  return ordered_map(values.size(), config.threads, [&](std::size_t i) {
    const SSHParams params(config.t, values[i]);
    const auto dist = ssh_evolve({params, config.tau, 0, config.coin});
    const auto report = moments(dist, 1);
    const double tau2 = config.tau * config.tau;
    const auto asym = ssh_asymptotic_moments(params, config.coin);
    SweepRow out{values[i], report.m1 / config.tau, report.m2 / tau2, asym.m1_over_tau,
                 asym.m2_over_tau2, std::nullopt, std::nullopt};
    if (std::abs(params.t() - params.t_prime()) > transition_guard * params.max_hopping()) {
      out.residue_m2 = ssh_L(params, SpreadingMethod::residue).value;
    }
    if (config.shots > 0) out.sampled = sample(dist, config, i, config.tau);
    return out;
  });
}

std::vector<SweepRow> run_sweep(const SweepConfig &config) {
  switch (config.kind) {
  case SweepKind::delta_sweep:
    return run_delta_sweep(config);
  case SweepKind::coin_sweep:
    return run_coin_sweep(config);
  case SweepKind::ssh_sweep:
    return run_ssh_sweep(config);
  case SweepKind::convergence:
    return run_convergence(config);
  }
  throw validation_error("unknown sweep kind");
}

Table sweep_table(const SweepConfig &config, const std::vector<SweepRow> &rows) {
  Table table;
  const bool sampled = config.shots > 0;
  if (config.kind == SweepKind::ssh_sweep) {
    table.columns = {"tprime", "M1_over_tau", "M2_over_tau2", "L_closed", "M2_over_tau2_t2",
                     "M1_asymptotic", "L_residue", "residue_skipped"};
    if (sampled) {
      table.columns.insert(table.columns.end(), {"M1_over_tau_sampled", "M1_over_tau_sampled_err",
                                                 "M2_over_tau2_sampled", "M2_over_tau2_sampled_err"});
    }
    const double t2 = config.t * config.t;
    for (const auto &r : rows) {
      std::vector<double> v = {r.parameter, r.m1, r.m2, r.asymptotic_m2,
                               t2 > 0.0 ? r.m2 / t2 : nan, r.asymptotic_m1,
                               r.residue_m2.value_or(nan), r.residue_m2 ? 0.0 : 1.0};
      if (sampled) v.insert(v.end(), {r.sampled->m1, r.sampled->m1_error, r.sampled->m2, r.sampled->m2_error});
      table.rows.push_back(std::move(v));
    }
    return table;
  }

  const char *param = config.kind == SweepKind::delta_sweep  ? "delta"
                      : config.kind == SweepKind::coin_sweep ? "theta"
                                                             : "n";
  table.columns = {param, "M1_over_n", "sqrtM2_over_n", "L_closed", "sqrtL_closed", "M2_over_n2",
                   "M1_asymptotic"};
  if (sampled) {
    table.columns.insert(table.columns.end(), {"M1_over_n_sampled", "M1_over_n_sampled_err",
                                               "sqrtM2_over_n_sampled", "sqrtM2_over_n_sampled_err"});
  }
  for (const auto &r : rows) {
    std::vector<double> v = {r.parameter,   r.m1, std::sqrt(r.m2), r.asymptotic_m2,
                             std::sqrt(r.asymptotic_m2), r.m2, r.asymptotic_m1};
    if (sampled) {
      // σ(√M2) = σ(M2) / (2√M2)
      const double root = std::sqrt(r.sampled->m2);
      v.insert(v.end(), {r.sampled->m1, r.sampled->m1_error, root,
                         root > 0.0 ? r.sampled->m2_error / (2 * root) : 0.0});
    }
    table.rows.push_back(std::move(v));
  }
  return table;
}

std::vector<double> detect_transition(const std::vector<double> &x, const std::vector<double> &y,
                                      std::optional<double> threshold) {
  if (x.size() != y.size()) throw validation_error("x and y must have the same length");
  if (x.size() < 5) throw validation_error("kink detection needs at least 5 points");
  const double h = x[1] - x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-6 * std::max(1.0, std::abs(h))) {
      throw validation_error("kink detection needs uniformly spaced points");
    }
  }

  // a[i] = |y[i−1] − 2y[i] + y[i+1]| for interior i.
  const std::size_t n = x.size();
  std::vector<double> a(n, 0.0);
  std::vector<double> interior;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    a[i] = std::abs(y[i - 1] - 2 * y[i] + y[i + 1]);
    interior.push_back(a[i]);
  }
  const double level = threshold.value_or(5.0 * median(interior));

  std::vector<std::size_t> peaks;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (a[i] > level && a[i] >= a[i - 1] && a[i] >= a[i + 1]) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t p, std::size_t q) { return a[p] > a[q]; });

  const auto separation = std::max<std::size_t>(2, n / 16);
  std::vector<std::size_t> kept;
  for (std::size_t p : peaks) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t q) {
      return (p > q ? p - q : q - p) < separation;
    });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<double> out;
  for (std::size_t p : kept) out.push_back(x[p]);
  return out;
}

std::vector<double> detect_transition(const std::vector<SweepRow> &rows,
                                      std::optional<double> threshold) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto &r : rows) {
    x.push_back(r.parameter);
    y.push_back(r.asymptotic_m2);
  }
  return detect_transition(x, y, threshold);
}

} // namespace qwalk
