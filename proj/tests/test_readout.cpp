#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/readout.hpp"
#include "helpers.hpp"

using namespace fuzzwatch;

namespace {

/// Brute-force centered average over samples within half*dt of each point, truncated at the ends.
std::vector<double> windowed_sum(const std::vector<double>& v, std::size_t half) {
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const long d = static_cast<long>(j) - static_cast<long>(k);
      if (std::labs(d) <= static_cast<long>(half)) {
        sum += v[j];
        ++count;
      }
    }
    out[k] = sum / count;
  }
  return out;
}

}  // namespace

TEST_CASE("defaults follow the measurement configuration") {
  MeasurementConfig c;
  const auto p = ReadoutProcess::defaults_for(c);
  CHECK(p.mean == doctest::Approx(c.mid_energy()));
  CHECK(p.stddev == doctest::Approx(c.level_gap()));
  CHECK(p.correlation_time == doctest::Approx(c.pulse_duration() / 10.0));
  CHECK(p.lower == doctest::Approx(c.mid_energy() - 3.0 * c.level_gap()));
  CHECK(p.upper == doctest::Approx(c.mid_energy() + 3.0 * c.level_gap()));
  CHECK_NOTHROW(p.validate(c));
}

TEST_CASE("process validation") {
  MeasurementConfig c;
  auto p = ReadoutProcess::defaults_for(c);
  p.stddev = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ReadoutProcess::defaults_for(c);
  p.correlation_time = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ReadoutProcess::defaults_for(c);
  p.upper = 0.2;
  CHECK_THROWS_AS(p.validate(c), ConfigError);
}

TEST_CASE("vanishing stddev gives the constant mean curve") {
  MeasurementConfig c;
  auto p = ReadoutProcess::defaults_for(c);
  p.mean = 0.2;
  p.stddev = 1e-14;
  RandomStream rng(1, 0);
  const auto curve = sample_readout(p, c.grid(), rng);
  for (double v : curve.values) CHECK(std::abs(v - 0.2) < 1e-12);
}

TEST_CASE("sampling is deterministic per stream") {
  MeasurementConfig c;
  const auto p = ReadoutProcess::defaults_for(c);
  RandomStream a(42, 7), b(42, 7), other(42, 8);
  const auto x = sample_readout(p, c.grid(), a);
  const auto y = sample_readout(p, c.grid(), b);
  const auto z = sample_readout(p, c.grid(), other);
  CHECK(x.values == y.values);
  CHECK(x.values != z.values);
}

TEST_CASE("samples respect the clipping interval") {
  MeasurementConfig c;
  auto p = ReadoutProcess::defaults_for(c);
  p.lower = -0.8;
  p.upper = 0.8;
  RandomStream rng(3, 0);
  for (int i = 0; i < 50; ++i) {
    for (double v : sample_readout(p, c.grid(), rng).values) {
      CHECK(v >= -0.8);
      CHECK(v <= 0.8);
    }
  }
}

TEST_CASE("Ornstein-Uhlenbeck stationary statistics") {
  MeasurementConfig c;
  auto p = ReadoutProcess::defaults_for(c);
  p.lower = -50.0;
  p.upper = 50.0;
  const TimeGrid grid = c.grid();
  const std::size_t paths = 10000;
  const std::size_t lags[] = {1, 5, 20, 40};
  const std::size_t origin = 100;
  double sum = 0.0, sum2 = 0.0;
  std::vector<double> x0(paths);
  std::vector<std::vector<double>> xk(std::size(lags), std::vector<double>(paths));
  for (std::size_t i = 0; i < paths; ++i) {
    RandomStream rng(2024, i);
    const auto curve = sample_readout(p, grid, rng);
    x0[i] = curve.values[origin];
    sum += x0[i];
    sum2 += x0[i] * x0[i];
    for (std::size_t l = 0; l < std::size(lags); ++l) xk[l][i] = curve.values[origin + lags[l]];
  }
  const double mean = sum / paths;
  const double sd = std::sqrt(sum2 / paths - mean * mean);
  CHECK(std::abs(sd / p.stddev - 1.0) < 0.05);
  for (std::size_t l = 0; l < std::size(lags); ++l) {
    double m2 = 0.0, s2 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < paths; ++i) m2 += xk[l][i];
    m2 /= paths;
    for (std::size_t i = 0; i < paths; ++i) {
      c2 += (x0[i] - mean) * (xk[l][i] - m2);
      s2 += (xk[l][i] - m2) * (xk[l][i] - m2);
    }
    const double rho = c2 / std::sqrt(s2 * (sum2 - paths * mean * mean));
    const double expected = std::exp(-static_cast<double>(lags[l]) * grid.step / p.correlation_time);
    CHECK(std::abs(rho - expected) < 0.05);
  }
}

TEST_CASE("smoothing keeps constants and interior of ramps") {
  MeasurementConfig c;
  const TimeGrid g = c.grid();
  const auto flat = smooth(ReadoutCurve::constant(g, 0.7), 0.5);
  for (double v : flat.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));

  ReadoutCurve ramp{g, {}};
  for (std::size_t k = 0; k < g.size(); ++k) ramp.values.push_back(2.0 * g.at(k) - 0.3);
  const auto s = smooth(ramp, 0.5);
  const std::size_t half = 100;
  for (std::size_t k = half; k + half < g.size(); ++k) {
    CHECK(std::abs(s.values[k] - ramp.values[k]) < 1e-12);
  }
}

TEST_CASE("smoothing a sinusoid of period window/2 equals the brute-force windowed sum") {
  MeasurementConfig c;
  const TimeGrid g = c.grid();
  const double window = 0.5;
  const double omega = 2.0 * std::numbers::pi / (window / 2.0);
  ReadoutCurve wave{g, {}};
  for (std::size_t k = 0; k < g.size(); ++k) wave.values.push_back(std::sin(omega * g.at(k) + 0.3));
  const auto s = smooth(wave, window);
  const std::size_t half = 100;
  const auto oracle = windowed_sum(wave.values, half);
  const double n = 2.0 * half + 1.0;
  const double dirichlet = std::sin(n * omega * g.step / 2.0) / (n * std::sin(omega * g.step / 2.0));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(std::abs(s.values[k] - oracle[k]) < 1e-12);
    if (k >= half && k + half < g.size()) {
      CHECK(std::abs(s.values[k] - dirichlet * wave.values[k]) < 1e-12);
    }
  }
}

TEST_CASE("smoothing is linear and stays within the raw range") {
  MeasurementConfig c;
  const auto p = ReadoutProcess::defaults_for(c);
  RandomStream rng(9, 0);
  const auto a = sample_readout(p, c.grid(), rng);
  const auto b = sample_readout(p, c.grid(), rng);
  ReadoutCurve combo{a.grid, {}};
  for (std::size_t k = 0; k < a.values.size(); ++k) combo.values.push_back(2.0 * a.values[k] - 0.5 * b.values[k]);
  const auto sa = smooth(a, 0.5), sb = smooth(b, 0.5), sc = smooth(combo, 0.5);
  const double lo = *std::min_element(a.values.begin(), a.values.end());
  const double hi = *std::max_element(a.values.begin(), a.values.end());
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    CHECK(std::abs(sc.values[k] - (2.0 * sa.values[k] - 0.5 * sb.values[k])) < 1e-12);
    CHECK(sa.values[k] >= lo - 1e-12);
    CHECK(sa.values[k] <= hi + 1e-12);
  }
}

TEST_CASE("smoothing window must fit the observation window") {
  MeasurementConfig c;
  const auto curve = ReadoutCurve::constant(c.grid(), 0.0);
  CHECK_THROWS_AS(smooth(curve, 0.0), UsageError);
  CHECK_THROWS_AS(smooth(curve, 1.5), UsageError);
  CHECK_NOTHROW(smooth(curve, 1.0));
}

TEST_CASE("classification by end points") {
  MeasurementConfig c;
  const TimeGrid g = c.grid();
  ReadoutCurve up{g, {}};
  for (std::size_t k = 0; k < g.size(); ++k) {
    up.values.push_back(c.e1 + (c.e2 - c.e1) * static_cast<double>(k) / static_cast<double>(g.intervals));
  }
  CHECK(classify(up, c.mid_energy()) == ReadoutClass::E12);
  CHECK(classify(ReadoutCurve::constant(g, c.e1), c.mid_energy()) == ReadoutClass::E11);
  CHECK(classify(ReadoutCurve::constant(g, c.mid_energy()), c.mid_energy()) == ReadoutClass::E22);
  CHECK(classify(reflect(up, c.mid_energy()), c.mid_energy()) == ReadoutClass::E21);
}

TEST_CASE("reflection swaps level indices in the class") {
  MeasurementConfig c;
  const auto p = ReadoutProcess::defaults_for(c);
  RandomStream rng(17, 0);
  for (int i = 0; i < 200; ++i) {
    const auto s = smooth(sample_readout(p, c.grid(), rng), 0.5);
    const auto cls = classify(s, c.mid_energy());
    const auto mirrored = classify(reflect(s, c.mid_energy()), c.mid_energy());
    CHECK(mirrored == swap_levels(cls));
  }
}

TEST_CASE("class names round-trip") {
  for (int i = 0; i < 4; ++i) {
    const auto cls = static_cast<ReadoutClass>(i);
    CHECK(parse_readout_class(to_string(cls)) == cls);
    CHECK(swap_levels(swap_levels(cls)) == cls);
  }
  CHECK_FALSE(parse_readout_class("E13").has_value());
  CHECK(swap_levels(ReadoutClass::E12) == ReadoutClass::E21);
  CHECK(swap_levels(ReadoutClass::E11) == ReadoutClass::E22);
}

TEST_CASE("curve CSV round-trips exactly") {
  MeasurementConfig c;
  const auto p = ReadoutProcess::defaults_for(c);
  RandomStream rng(5, 0);
  const auto curve = sample_readout(p, c.grid(), rng);
  std::stringstream ss;
  write_curve_csv(ss, curve, {"seed: 5"});
  const auto back = read_curve_csv(ss);
  REQUIRE(back.values.size() == curve.values.size());
  for (std::size_t k = 0; k < curve.values.size(); ++k) {
    CHECK(std::abs(back.values[k] - curve.values[k]) <= 1e-12 * std::max(1.0, std::abs(curve.values[k])));
    CHECK(std::abs(back.times[k] - curve.grid.at(k)) < 1e-12);
  }
  const auto uniform = to_uniform_curve(back);
  CHECK(uniform.grid.same_as(curve.grid));

  ReadoutSamples gappy{{0.0, 0.1, 0.3}, {1.0, 2.0, 3.0}};
  CHECK_THROWS_AS(to_uniform_curve(gappy), ConfigError);
}

TEST_CASE("linear interpolation clamps outside the grid") {
  const TimeGrid g = TimeGrid::spanning(0.0, 1.0, 0.5);
  const ReadoutCurve r{g, {0.0, 1.0, 3.0}};
  CHECK(r.value_at(0.25) == doctest::Approx(0.5));
  CHECK(r.value_at(0.75) == doctest::Approx(2.0));
  CHECK(r.value_at(-1.0) == 0.0);
  CHECK(r.value_at(2.0) == 3.0);
}
