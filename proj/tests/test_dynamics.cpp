#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/readout.hpp"
#include "helpers.hpp"

using namespace fuzzwatch;
using fwtest::config_with_ratio;
using fwtest::random_readout;
using fwtest::undriven;

namespace {

const complex I{0.0, 1.0};

/// Lab-frame coupling equivalent to the rotating-frame drive at resonance.
ComplexMatrix lab_coupling(const MeasurementConfig& c, double t) {
  ComplexMatrix v(2);
  const double amp = c.drive(t);
  const double w = c.e2 - c.e1;
  v(0, 1) = amp * std::exp(I * w * t);
  v(1, 0) = amp * std::exp(-I * w * t);
  return v;
}

ReadoutCurve refine(const ReadoutCurve& coarse, const MeasurementConfig& fine) {
  ReadoutCurve out{fine.grid(), {}};
  for (std::size_t k = 0; k < out.grid.size(); ++k) out.values.push_back(coarse.value_at(out.grid.at(k)));
  return out;
}

}  // namespace

TEST_CASE("general right-hand side: stationary eigenstates rotate in phase") {
  const std::vector<double> h0{-0.5, 0.5, 1.7};
  ComplexMatrix v(3);
  for (std::size_t n = 0; n < 3; ++n) {
    std::vector<complex> psi(3, 0.0);
    psi[n] = 1.0;
    const auto free = rpi_rhs_general(psi, h0, v, 0.0, 0.3);
    const auto resonant = rpi_rhs_general(psi, h0, v, 1.0, h0[n]);
    for (std::size_t m = 0; m < 3; ++m) {
      const complex expected = -I * h0[n] * psi[m];
      CHECK(std::abs(free[m] - expected) < 1e-15);
      CHECK(std::abs(resonant[m] - expected) < 1e-15);
    }
  }
}

TEST_CASE("general right-hand side rejects bad shapes and non-Hermitian couplings") {
  const std::vector<complex> psi{1.0, 0.0};
  const std::vector<double> h0{-0.5, 0.5, 1.0};
  CHECK_THROWS_AS(rpi_rhs_general(psi, h0, ComplexMatrix(3), 0.0, 0.0), ConfigError);
  const std::vector<double> h2{-0.5, 0.5};
  ComplexMatrix bad(2);
  bad(0, 1) = 1.0;
  bad(1, 0) = 2.0;
  CHECK_THROWS_AS(rpi_rhs_general(psi, h2, bad, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(rpi_rhs_general(psi, h2, ComplexMatrix(3), 0.0, 0.0), ConfigError);
}

TEST_CASE("two-level right-hand side by direct substitution") {
  MeasurementConfig c;
  c.kappa = 0.0;
  AtomState ground{1.0, 0.0, 0.1};
  const auto d = rpi_rhs_twolevel(ground, c, 0.1, 0.0);
  CHECK(std::abs(d[0]) == 0.0);
  CHECK(std::abs(d[1] - (-I * c.v0)) < 1e-15);

  c.kappa = 2.5;
  const auto damped = rpi_rhs_twolevel(ground, c, 0.6, c.mid_energy());
  CHECK(std::abs(damped[0] - complex{-2.5 * 0.25, 0.0}) < 1e-15);
  CHECK(std::abs(damped[1]) == 0.0);
}

TEST_CASE("lab-frame equation transformed to the rotating frame equals the two-level form") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-0.25, 0.75);
  MeasurementConfig c;
  c.kappa = 3.7;
  const std::vector<double> h0{c.e1, c.e2};
  for (int trial = 0; trial < 10; ++trial) {
    const AtomState s{complex{g(rng), g(rng)}, complex{g(rng), g(rng)}, u(rng)};
    const double t = s.t;
    const double e = g(rng);
    // psi_n = C_n exp(-i E_n t)
    const std::vector<complex> psi{s.c1 * std::exp(-I * c.e1 * t), s.c2 * std::exp(-I * c.e2 * t)};
    const auto dpsi = rpi_rhs_general(psi, h0, lab_coupling(c, t), c.kappa, e);
    // dC_n/dt = exp(i E_n t) (dpsi_n/dt + i E_n psi_n)
    const complex dc1 = std::exp(I * c.e1 * t) * (dpsi[0] + I * c.e1 * psi[0]);
    const complex dc2 = std::exp(I * c.e2 * t) * (dpsi[1] + I * c.e2 * psi[1]);
    const auto expected = rpi_rhs_twolevel(s, c, t, e);
    CHECK(std::abs(dc1 - expected[0]) < 1e-12);
    CHECK(std::abs(dc2 - expected[1]) < 1e-12);
  }
}

TEST_CASE("decoupled damping follows the closed form") {
  const double tlr = 0.37;
  MeasurementConfig c = undriven(1.0 / tlr);
  const auto traj = evolve(c, ReadoutCurve::constant(c.grid(), c.mid_energy()));
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    const double elapsed = traj.grid.at(k) - c.t1;
    CHECK(std::abs(traj.amplitudes[k].c1 - std::exp(-elapsed / (4.0 * tlr))) < 1e-9);
    CHECK(std::abs(traj.amplitudes[k].c2) < 1e-15);
  }
  const double duration = c.t2 - c.t1;
  CHECK(readout_probability(traj) == doctest::Approx(std::exp(-duration / (2.0 * tlr))).epsilon(1e-9));
  CHECK(log_readout_probability(traj) == doctest::Approx(-duration / (2.0 * tlr)).epsilon(1e-9));
}

TEST_CASE("pi pulse without measurement transfers the population exactly") {
  MeasurementConfig c;
  c.kappa = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto traj = evolve(c, random_readout(c, seed));
    CHECK(traj.populations.back() == doctest::Approx(1.0).epsilon(1e-9));
    for (double n : traj.norms) CHECK(std::abs(n - 1.0) < 1e-9);
    CHECK(std::abs(readout_probability(traj) - 1.0) < 1e-9);
  }
}

TEST_CASE("no pulse and no measurement leaves the state constant") {
  const MeasurementConfig c = undriven(0.0);
  const auto traj = evolve(c, random_readout(c, 5));
  for (const auto& a : traj.amplitudes) {
    CHECK(std::abs(a.c1 - complex{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(a.c2) < 1e-14);
  }
}

TEST_CASE("readout sitting on the occupied level is not penalized") {
  const MeasurementConfig c = undriven(4.0 / 0.5);
  const auto traj = evolve(c, ReadoutCurve::constant(c.grid(), c.e1));
  CHECK(std::abs(readout_probability(traj) - 1.0) < 1e-14);
}

TEST_CASE("norms are non-increasing and populations stay in [0, 1]") {
  for (double ratio : {0.1, 5.0 / 3.0, 100.0}) {
    const MeasurementConfig c = config_with_ratio(ratio);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto traj = evolve(c, random_readout(c, seed));
      for (std::size_t k = 1; k < traj.norms.size(); ++k) {
        CHECK(traj.norms[k] <= traj.norms[k - 1] + 1e-9);
      }
      for (double p : traj.populations) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0 + 1e-12);
      }
      const double prob = readout_probability(traj);
      CHECK(prob > 0.0);
      CHECK(prob <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("level swap with reflected readout preserves P[E]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  MeasurementConfig a = config_with_ratio(5.0 / 3.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    a.initial_state = AtomState{complex{g(rng), g(rng)}, complex{g(rng), g(rng)}, 0.0};
    MeasurementConfig b = a;
    b.initial_state = AtomState{a.initial_state.c2, a.initial_state.c1, 0.0};
    const ReadoutCurve e = random_readout(a, seed);
    const double pa = readout_probability(evolve(a, e));
    const double pb = readout_probability(evolve(b, reflect(e, a.mid_energy())));
    CHECK(pa == doctest::Approx(pb).epsilon(1e-9));
  }
}

TEST_CASE("lab-frame integrator reproduces rotating-frame populations at resonance") {
  const MeasurementConfig c = config_with_ratio(5.0 / 3.0);
  LabFrameProblem lab;
  lab.h0_diag = {c.e1, c.e2};
  lab.kappa = c.kappa;
  lab.drive = [&c](double t) { return lab_coupling(c, t); };
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const ReadoutCurve e = random_readout(c, seed);
    const auto rot = evolve(c, e);
    const auto states = evolve_lab_frame(lab, {complex{1.0, 0.0}, complex{0.0, 0.0}}, e, 64);
    REQUIRE(states.size() == rot.populations.size());
    double worst = 0.0, worst_norm = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double n = std::norm(states[k][0]) + std::norm(states[k][1]);
      worst = std::max(worst, std::abs(std::norm(states[k][1]) / n - rot.populations[k]));
      worst_norm = std::max(worst_norm, std::abs(n - rot.norms[k]) / n);
    }
    CHECK(worst < 1e-8);
    CHECK(worst_norm < 1e-6);
  }
}

TEST_CASE("step halving changes P[E] by less than 1e-8") {
  MeasurementConfig coarse = config_with_ratio(5.0 / 3.0);
  MeasurementConfig fine = coarse;
  fine.dt = coarse.dt / 2.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ReadoutCurve e = random_readout(coarse, seed);
    const double p1 = readout_probability(evolve(coarse, e));
    const double p2 = readout_probability(evolve(fine, refine(e, fine)));
    CHECK(std::abs(p1 - p2) < 1e-8);
  }
}

TEST_CASE("fourth-order convergence: halving dt cuts the error about 16 times") {
  // One RK4 step per interval at every dt used here.
  MeasurementConfig c;
  c.kappa = 1.0;
  c.dt = 1.0 / 200.0;
  const auto final_state = [&](double dt) {
    MeasurementConfig x = c;
    x.dt = dt;
    const auto traj = evolve(x, ReadoutCurve::constant(x.grid(), 0.3));
    return traj.amplitudes.back();
  };
  const AtomState a = final_state(c.dt);
  const AtomState b = final_state(c.dt / 2.0);
  const AtomState r = final_state(c.dt / 4.0);
  const double e1 = std::abs(a.c1 - b.c1) + std::abs(a.c2 - b.c2);
  const double e2 = std::abs(b.c1 - r.c1) + std::abs(b.c2 - r.c2);
  const double reduction = e1 / e2;
  CHECK(reduction > 14.0);
  CHECK(reduction < 18.0);
}

TEST_CASE("evolve rejects a readout on another grid") {
  const MeasurementConfig c;
  MeasurementConfig other = c;
  other.dt = c.dt / 2.0;
  CHECK_THROWS_AS(evolve(c, ReadoutCurve::constant(other.grid(), 0.0)), ConfigError);
}

TEST_CASE("configuration validation") {
  MeasurementConfig c;
  CHECK(c.validate().empty());
  CHECK(c.rabi_period() == doctest::Approx(1.0));
  c.set_tlr_ratio(5.0 / 3.0);
  CHECK(c.tlr_ratio() == doctest::Approx(5.0 / 3.0));
  CHECK(c.level_resolution_time() == doctest::Approx(5.0 / 3.0 / (4.0 * std::numbers::pi)));
  CHECK(c.kappa == doctest::Approx(1.0 / c.level_resolution_time()));
  c.set_level_resolution_time(std::numeric_limits<double>::infinity());
  CHECK(c.kappa == 0.0);
  CHECK(std::isinf(c.tlr_ratio()));

  MeasurementConfig bad;
  bad.dt = 0.01;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = MeasurementConfig{};
  bad.e2 = bad.e1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = MeasurementConfig{};
  bad.kappa = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = MeasurementConfig{};
  bad.t1 = 0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = MeasurementConfig{};
  bad.initial_state = AtomState{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  MeasurementConfig long_pulse;
  long_pulse.pulse_end = 0.6;
  CHECK(long_pulse.validate().size() == 1);
}

TEST_CASE("time grid spans the window exactly") {
  const TimeGrid g = TimeGrid::spanning(-0.25, 0.75, 1.0 / 400.0);
  CHECK(g.size() == 401);
  CHECK(g.at(0) == -0.25);
  CHECK(g.end() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(TimeGrid::spanning(0.0, 1.0, 0.3), ConfigError);
}

TEST_CASE("normalized state") {
  const AtomState s{complex{3.0, 0.0}, complex{0.0, 4.0}, 0.0};
  CHECK(s.normalized().norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.excited_population() == doctest::Approx(16.0 / 25.0));
}
