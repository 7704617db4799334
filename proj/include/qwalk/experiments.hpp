#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "qwalk/coin.hpp"
#include "qwalk/table.hpp"

namespace qwalk {

enum class SweepKind { delta_sweep, coin_sweep, ssh_sweep, convergence };

std::string_view to_string(SweepKind kind);

/// count ≥ 2 uniformly spaced values from start to stop inclusive.
struct Grid {
  double start;
  double stop;
  int count;

  /// Grid with the given spacing; the last point is the one nearest `stop`.
  static Grid stepped(double start, double stop, double step);

  double at(int i) const;
  std::vector<double> values() const;
};

/// One scenario. `delta` is the fixed retardation of coin sweeps and
/// convergence runs; `t` the fixed intra-cell hopping of SSH sweeps. `coin`
/// doubles as the SSH sublattice spinor χ₀. For convergence runs the grid
/// values are step counts (rounded to integers).
struct SweepConfig {
  SweepKind kind = SweepKind::delta_sweep;
  Grid grid{0.0, 2 * std::numbers::pi, 33};
  std::int64_t steps = 6;
  double tau = 50.0;
  double delta = std::numbers::pi;
  double t = 1.0;
  CoinState coin = CoinState::left();
  /// 0 means exact moments only.
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 1;

  /// Throws validation_error naming the offending field.
  void validate() const;
};

/// Poisson-sampled moments, normalized like the exact columns.
struct SampledEstimate {
  double m1;
  double m1_error;
  double m2;
  double m2_error;
};

/// Normalized moments are M1/n, M2/n² for the walk and M1/τ, M2/τ² for SSH.
struct SweepRow {
  double parameter;
  double m1;
  double m2;
  double asymptotic_m1;
  /// L(δ) or 𝓛(t, t′) from the closed form.
  double asymptotic_m2;
  /// SSH only: 𝓛 by residues; empty at t′ = t where the poles sit on |z| = 1.
  std::optional<double> residue_m2;
  std::optional<SampledEstimate> sampled;
};

std::vector<SweepRow> run_delta_sweep(const SweepConfig &config);
std::vector<SweepRow> run_coin_sweep(const SweepConfig &config);
std::vector<SweepRow> run_ssh_sweep(const SweepConfig &config);
std::vector<SweepRow> run_convergence(const SweepConfig &config);

/// Dispatch on config.kind.
std::vector<SweepRow> run_sweep(const SweepConfig &config);

/// Column layout of each sweep kind; sampled columns only when shots > 0.
Table sweep_table(const SweepConfig &config, const std::vector<SweepRow> &rows);

/// Parameter values where |Δ²y| is a local maximum above `threshold`
/// (default 5× the median |Δ²y|). Peaks closer than max(2, count/16) grid
/// steps to a stronger one are suppressed. Needs ≥ 5 uniformly spaced points.
std::vector<double> detect_transition(const std::vector<double> &x, const std::vector<double> &y,
                                      std::optional<double> threshold = std::nullopt);

/// Kinks of the asymptotic column.
std::vector<double> detect_transition(const std::vector<SweepRow> &rows,
                                      std::optional<double> threshold = std::nullopt);

/// f(0), …, f(count − 1) evaluated on up to `threads` workers, returned in
/// index order. The first exception thrown by any item is rethrown.
template <typename F> auto ordered_map(std::size_t count, int threads, F &&f) {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::max<std::size_t>(1, std::min(workers, count));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto &th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<R> out;
  out.reserve(count);
  for (auto &slot : slots) out.push_back(std::move(*slot));
  return out;
}

} // namespace qwalk
