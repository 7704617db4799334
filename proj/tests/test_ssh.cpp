#include <doctest.h>

#include "oracles.hpp"
#include "qwalk/contour.hpp"
#include "qwalk/ssh.hpp"

using namespace qwalk;
using C = Complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

std::pair<double, double> ring_moments(const std::vector<double> &p) {
  const int half = static_cast<int>(p.size()) / 2;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = static_cast<double>(static_cast<int>(i) - half);
    m1 += m * p[i];
    m2 += m * m * p[i];
  }
  return {m1, m2};
}

} // namespace

TEST_SUITE("ssh") {

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(SSHParams(1.0, 0.0));
  CHECK_THROWS_AS(SSHParams(-1.0, 1.0), validation_error);
  CHECK_THROWS_AS(SSHParams(0.0, 0.0), validation_error);
  CHECK_THROWS_AS(SSHParams(1.0, std::nan("")), validation_error);
  CHECK(SSHParams(0.5, 2.0).max_hopping() == 2.0);
}

TEST_CASE("bloch hamiltonian and bands") {
  for (double tp : {0.3, 1.0, 1.7}) {
    const SSHParams p(1.0, tp);
    for (double k : {-3.0, -1.0, 0.2, 2.5}) {
      const Matrix2cd h = ssh_bloch_hamiltonian(p, k);
      CHECK(max_abs(Matrix2cd(h - h.adjoint())) < 1e-15);
      CHECK(max_abs(Matrix2cd(h - pauli_dot(ssh_bloch_field(p, k)))) < 1e-15);
      CHECK(ssh_bloch_field(p, k).z() == 0.0);
      const auto b = ssh_band(p, k);
      CHECK(b.energy == doctest::Approx(oracle::ssh_energy(1.0, tp, k)).epsilon(1e-14));
      REQUIRE(b.velocity);
      REQUIRE(b.n);
      // n_y = V/t, and V is the lower-band slope −dE/dk.
      CHECK(std::abs(b.n->y() - *b.velocity) < 1e-14);
      const double fd = (oracle::ssh_energy(1.0, tp, k + 1e-6) - oracle::ssh_energy(1.0, tp, k - 1e-6)) / 2e-6;
      CHECK(std::abs(*b.velocity + fd) < 1e-8);
      CHECK(ssh_velocity_squared(p, k) == doctest::Approx(*b.velocity * *b.velocity).epsilon(1e-14));
    }
  }
  const auto closed = ssh_band(SSHParams(1.0, 1.0), 0.0);
  CHECK(closed.degenerate);
  CHECK_FALSE(closed.velocity);
  CHECK_FALSE(closed.n);
  CHECK(ssh_velocity_squared(SSHParams(1.0, 1.0), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("chiral and time-reversal symmetry") {
  const Matrix2cd sz = pauli(PauliAxis::z);
  for (double tp : {0.4, 1.6}) {
    const SSHParams p(1.0, tp);
    for (double k : {-2.0, 0.7, 3.1}) {
      const Matrix2cd h = ssh_bloch_hamiltonian(p, k);
      const Matrix2cd hm = ssh_bloch_hamiltonian(p, -k);
      CHECK(max_abs(Matrix2cd(sz * h * sz + h)) < 1e-10);
      CHECK(max_abs(Matrix2cd(h.conjugate() - hm)) < 1e-10);
      CHECK(max_abs(Matrix2cd(sz * h.conjugate() * sz + hm)) < 1e-10);
    }
  }
}

TEST_CASE("winding") {
  for (double t : {0.5, 1.0, 1.7}) {
    for (double tp : {0.0, 0.3, 0.9, 1.2, 2.0, 3.5}) {
      if (std::abs(t - tp) < 1e-3) continue;
      const auto w = ssh_winding(SSHParams(t, tp), 128);
      CHECK(w.winding == (tp > t ? 1 : 0));
      CHECK(w.residual < 1e-9);
    }
  }
  CHECK_THROWS_AS(ssh_winding(SSHParams(1.0, 1.0)), gap_closure_error);
  CHECK_THROWS_AS(ssh_winding(SSHParams(1.0, 2.0), 16), validation_error);
}

TEST_CASE("spreading coefficient") {
  for (int i = 1; i <= 25; ++i) {
    const double tp = 0.1 * i;
    const SSHParams p(1.0, tp);
    const double closed = ssh_L(p, SpreadingMethod::closed_form).value;
    const double expected = tp <= 1.0 ? tp * tp / 2 : 0.5;
    CHECK(closed == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(ssh_L(p, SpreadingMethod::quadrature).value - closed) < 1e-9);
    if (std::abs(tp - 1.0) > 1e-9) {
      CHECK(std::abs(ssh_L(p, SpreadingMethod::residue).value - closed) < 1e-9);
    }
  }
  // t′ = 0 has no dynamics; the integrand and L vanish.
  CHECK(ssh_L(SSHParams(1.0, 0.0), SpreadingMethod::residue).value == 0.0);
  CHECK(ssh_L(SSHParams(2.0, 3.0), SpreadingMethod::closed_form).value == doctest::Approx(2.0));
  CHECK_THROWS_AS(ssh_L(SSHParams(1.0, 1.0), SpreadingMethod::residue), validation_error);
  CHECK_THROWS_AS(ssh_L(SSHParams(1.0, 1.0), SpreadingMethod::quadrature, 10), validation_error);
}

TEST_CASE("residue oracle") {
  const auto r = ssh_residue_oracle(SSHParams(1.0, 2.0));
  CHECK(r.poles.size() == 3);
  CHECK(r.verified);
  const auto big = contour_residue<double>([](C z) { return ssh_spreading_integrand(1.0, 2.0, z); }, 0.0, 1.0, 4096);
  CHECK(std::abs(C(0, 2 * pi) * big - r.total) < 1e-10);
  CHECK(r.total.real() == doctest::Approx(0.5));
  CHECK(ssh_residue_oracle(SSHParams(0.0, 1.0)).poles.empty());
}

TEST_CASE("integrand reproduces V^2 on the unit circle") {
  for (double tp : {0.4, 1.7}) {
    for (double k : {-2.0, 0.3, 1.4}) {
      const C z = std::polar(1.0, k);
      const C v2 = ssh_spreading_integrand(1.0, tp, z) * C(0, 1) * z * (2 * pi);
      CHECK(std::abs(v2 - ssh_velocity_squared(SSHParams(1.0, tp), k)) < 1e-12);
    }
  }
}

TEST_CASE("evolution cells") {
  SSHEvolutionConfig c{SSHParams(1.0, 2.0), 10.0};
  CHECK(c.minimum_cells() == 96);
  const auto n = c.resolved_cells();
  CHECK(n >= 96);
  auto m = n;
  for (int f : {2, 3, 5}) while (m % f == 0) m /= f;
  CHECK(m == 1);
  c.cells = 50;
  CHECK_THROWS_AS(ssh_evolve(c), validation_error);
  CHECK_THROWS_AS(ssh_evolve({SSHParams(1.0, 1.0), -1.0}), validation_error);
}

TEST_CASE("evolution against real-space diagonalization") {
  struct Case {
    double t, tp, tau;
    CoinState chi;
    std::int64_t cells;
  };
  const double h = 1 / std::sqrt(2.0);
  const Case cases[] = {
      {1.0, 1.5, 12.0, CoinState::left(), 96},
      {1.0, 0.6, 20.0, CoinState::right(), 120},
      {0.7, 1.3, 8.0, CoinState(h, C(0, h)), 64},
      {1.0, 1.0, 15.0, CoinState(0.6, 0.8), 100},
  };
  for (const auto &c : cases) {
    const auto got = ssh_evolve({SSHParams(c.t, c.tp), c.tau, c.cells, c.chi});
    const auto ref = oracle::ssh_distribution(c.t, c.tp, c.tau, int(c.cells), c.chi.alpha(), c.chi.beta());
    const auto half = c.cells / 2;
    double err = 0.0;
    for (std::int64_t m = -half; m < c.cells - half; ++m) {
      err = std::max(err, std::abs(got.at(m) - ref[std::size_t(m + half)]));
    }
    CHECK(err < 1e-10);
  }
}

TEST_CASE("frozen moments") {
  // Reference values from an independent dense numpy diagonalization.
  struct Case {
    double t, tp, tau;
    CoinState chi;
    std::int64_t cells;
    double m1, m2;
  };
  const double h = 1 / std::sqrt(2.0);
  const Case cases[] = {
      {1.0, 1.5, 50.0, CoinState::left(), 316, -0.4778627208293571, 1250.6136775997593},
      {1.0, 0.6, 50.0, CoinState::left(), 216, 0.017798572679724955, 450.17938209479587},
      {1.0, 2.0, 10.0, CoinState(h, C(0, h)), 96, -5.043601229812713, 50.643395993975616},
      {1.0, 0.5, 20.0, CoinState::right(), 96, 0.006567935845673056, 50.09614770350929},
  };
  for (const auto &c : cases) {
    const auto r = raw_moments(ssh_evolve({SSHParams(c.t, c.tp), c.tau, c.cells, c.chi}));
    CHECK(std::abs(r.m1 - c.m1) < 1e-8);
    CHECK(std::abs(r.m2 - c.m2) < 1e-8 * c.m2);
  }
  // the same runs on the dense oracle, at the smaller sizes
  const auto p = oracle::ssh_distribution(1.0, 2.0, 10.0, 96, h, C(0, h));
  const auto [m1, m2] = ring_moments(p);
  CHECK(std::abs(m1 - -5.043601229812713) < 1e-8);
  CHECK(std::abs(m2 - 50.643395993975616) < 1e-8);
}

TEST_CASE("trivial evolutions") {
  const auto still = ssh_evolve({SSHParams(1.0, 0.0), 30.0});
  CHECK(still.at(0) == doctest::Approx(1.0));
  const auto zero = ssh_evolve({SSHParams(1.0, 2.0), 0.0});
  CHECK(zero.at(0) == doctest::Approx(1.0));
}

TEST_CASE("asymptotic moments") {
  const double h = 1 / std::sqrt(2.0);
  const auto a = ssh_asymptotic_moments(SSHParams(1.0, 2.0), CoinState(h, C(0, h)));
  CHECK(a.m2_over_tau2 == doctest::Approx(0.5));
  CHECK(a.m1_over_tau == doctest::Approx(-0.5));
  CHECK(a.m2_over_tau2_t2 == doctest::Approx(0.5));
  CHECK(ssh_asymptotic_moments(SSHParams(1.0, 2.0), CoinState::left()).m1_over_tau == 0.0);
  CHECK(std::isnan(ssh_asymptotic_moments(SSHParams(0.0, 2.0), CoinState::left()).m2_over_tau2_t2));
}

} // TEST_SUITE
