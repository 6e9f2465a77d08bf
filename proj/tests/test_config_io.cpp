#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fuzzwatch/config.hpp"
#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/io.hpp"
#include "fuzzwatch/stats.hpp"
#include "fuzzwatch/units.hpp"

using namespace fuzzwatch;

namespace {

KeyValueFile parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in, "test.conf");
}

std::string error_of(const std::string& text) {
  try {
    (void)RunConfig::from_file(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("key-value files") {
  const auto f = parse("# comment\n\n a = 1 # trailing\nb=two words\n");
  REQUIRE(f.entries().size() == 2);
  CHECK(f.entries()[0].key == "a");
  CHECK(f.entries()[0].value == "1");
  CHECK(f.entries()[0].line == 3);
  CHECK(f.entries()[1].value == "two words");
  CHECK_THROWS_AS(parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(parse("= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("a =\n"), ConfigError);
  CHECK_THROWS_AS(parse("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueFile::load("/nonexistent/file.conf"), ConfigError);
}

TEST_CASE("number parsing") {
  CHECK(parse_double("x", "1e-3") == 1e-3);
  CHECK(std::isinf(parse_double("x", "inf")));
  CHECK_THROWS_AS(parse_double("x", "1.0abc"), ConfigError);
  CHECK_THROWS_AS(parse_double("x", "nan"), ConfigError);
  CHECK_THROWS_AS(parse_double("x", ""), ConfigError);
  CHECK(parse_count("n", "42") == 42);
  CHECK_THROWS_AS(parse_count("n", "-1"), ConfigError);
  CHECK_THROWS_AS(parse_count("n", "2.5"), ConfigError);
}

TEST_CASE("run configuration defaults and errors") {
  RunConfig c;
  CHECK(c.measurement.tlr_ratio() == doctest::Approx(5.0 / 3.0));
  CHECK(c.process.stddev == doctest::Approx(1.0));
  CHECK(c.ensemble.smoothing_window == doctest::Approx(0.5));
  CHECK_NOTHROW(c.validate());

  CHECK(error_of("bogus = 1\n").find("test.conf:1") != std::string::npos);
  CHECK(error_of("e1 = 0\ne2 = x\n").find("test.conf:2") != std::string::npos);
  CHECK_FALSE(error_of("estimator = mcmc\n").empty());
  CHECK_FALSE(error_of("kappa = -1\n").empty());
  CHECK_FALSE(error_of("ess_threshold = 2\n").empty());
  CHECK_FALSE(error_of("dt = 0\n").empty());

  RunConfig bad;
  bad.set("grid_t_bins", "1");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.set("smoothing_window", "2");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.set("grid_t_bins", "100000");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("measurement strength keys") {
  RunConfig c;
  c.set("kappa", "2");
  CHECK(c.measurement.kappa == 2.0);
  c.set("tlr", "inf");
  CHECK(c.measurement.kappa == 0.0);
  c.set("tlr", "0.25");
  CHECK(c.measurement.level_resolution_time() == doctest::Approx(0.25));
  c.set("tlr_ratio", "100");
  CHECK(c.measurement.tlr_ratio() == doctest::Approx(100.0));
  // The ratio follows later changes of the levels.
  c.set("e2", "1.5");
  CHECK(c.measurement.tlr_ratio() == doctest::Approx(100.0));
  c.set("rabi_period", "2");
  CHECK(c.measurement.v0 == doctest::Approx(std::acos(-1.0) / 2.0));
}

TEST_CASE("readout defaults follow the levels unless set") {
  RunConfig c;
  c.set("e1", "1");
  c.set("e2", "3");
  CHECK(c.process.mean == doctest::Approx(2.0));
  CHECK(c.process.stddev == doctest::Approx(2.0));
  CHECK(c.process.lower == doctest::Approx(-4.0));
  c.set("readout_mean", "0");
  c.set("e2", "5");
  CHECK(c.process.mean == 0.0);
  CHECK(c.process.stddev == doctest::Approx(4.0));
}

TEST_CASE("describe round-trips through set") {
  RunConfig c;
  c.set("tlr_ratio", "0.7");
  c.set("readout_correlation_time", "0.033");
  c.set("estimator", "importance");
  c.set("c2_im", "0.25");
  c.set("seed", "99");
  RunConfig back;
  for (const auto& [k, v] : c.describe()) back.set(k, v);
  CHECK(back.describe() == c.describe());
  CHECK(back.measurement.kappa == c.measurement.kappa);
  CHECK(back.ensemble.estimator == Estimator::Importance);
}

TEST_CASE("example configuration files load") {
  const auto run = RunConfig::load(FUZZWATCH_SOURCE_DIR "/configs/default.conf");
  CHECK(run.measurement.tlr_ratio() == doctest::Approx(5.0 / 3.0));
  CHECK(run.n == 10000);
  CHECK(run.seed == 1);
  CHECK_NOTHROW(run.validate());

  const auto setup = load_setup(FUZZWATCH_SOURCE_DIR "/configs/reference_setup.conf");
  CHECK(units::dipole_cgs_to_si(setup.d1) == doctest::Approx(0.9e-29));
  CHECK(units::erg_to_ev(setup.electron_energy) == doctest::Approx(1e-4));
  CHECK(units::areal_density_cgs_to_si(setup.surface_density) == doctest::Approx(1e13));
}

TEST_CASE("setup keys") {
  ScatteringSetup s;
  set_setup_key(s, "electron_energy", "1.602176634e-23");
  CHECK(units::erg_to_ev(s.electron_energy) == doctest::Approx(1e-4).epsilon(1e-12));
  set_setup_key(s, "slit_q", "1e-6");
  CHECK(s.slit_q == doctest::Approx(1e-4));
  CHECK_THROWS_AS(set_setup_key(s, "nope", "1"), ConfigError);
  CHECK_THROWS_AS(setup_from_file(parse("slit_q = 1\n")), ConfigError);
}

TEST_CASE("numbers format to the shortest round-tripping text") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
    CHECK(parse_double("x", format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV tables round-trip") {
  CsvTable t;
  t.comments = {"tool: test", "seed: 3"};
  t.columns = {"t", "value", "flag"};
  t.rows = {{0.0, 1.25, 1.0}, {0.1, std::numeric_limits<double>::infinity(), 0.0}, {0.2, 1e-300, 1.0}};
  std::stringstream ss;
  write_csv(ss, t);
  const auto back = read_csv(ss);
  CHECK(back.comments == t.comments);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.column("value") == 1);
  CHECK_THROWS_AS(back.column("missing"), ConfigError);

  std::istringstream nan_row("a,b\nnan,true\n");
  const auto n = read_csv(nan_row);
  CHECK(std::isnan(n.rows[0][0]));
  CHECK(n.rows[0][1] == 1.0);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), ConfigError);
  std::istringstream junk("a\nxyz\n");
  CHECK_THROWS_AS(read_csv(junk), ConfigError);
}

TEST_CASE("matrices round-trip and PGM output") {
  Matrix m(3, 4);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = 0.1 * static_cast<double>(i);
  std::stringstream ss;
  write_matrix_csv(ss, m, {"kind: test"});
  const auto back = read_matrix_csv(ss);
  CHECK(back.rows == 3);
  CHECK(back.cols == 4);
  CHECK(back.data == m.data);

  std::ostringstream pgm;
  write_pgm(pgm, m, 1.1, {"kind: test"});
  const std::string bytes = pgm.str();
  CHECK(bytes.rfind("P5", 0) == 0);
  CHECK(bytes.find("# kind: test") != std::string::npos);
  CHECK(bytes.size() > 12);
  CHECK(static_cast<unsigned char>(bytes.back()) == 255);
}

TEST_CASE("manifest lines") {
  RunManifest m;
  m.tool_version = "1.0";
  m.subcommand = "ensemble";
  m.seed = 7;
  m.output_directory = "out";
  m.timestamp = "2020-01-01T00:00:00Z";
  m.extra = {{"param n", "5"}};
  const auto lines = m.lines();
  CHECK(lines.front() == "tool: fuzzwatch 1.0");
  CHECK(lines[2] == "config: (defaults)");
  CHECK(lines.back() == "param n: 5");
}

TEST_CASE("statistics helpers") {
  const std::vector<double> xs{0.1, 0.2, 0.3}, w{1.0, 1.0, 1.0};
  CHECK(ks_distance(xs, w, xs) == 0.0);
  CHECK(ks_distance(std::vector<double>{0.0}, std::vector<double>{1.0}) == 1.0);
  CHECK(effective_sample_size(w) == doctest::Approx(3.0));
  CHECK(effective_sample_size(std::vector<double>{1.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(rms_difference(xs, std::vector<double>{0.2, 0.3, 0.4}) == doctest::Approx(0.1));
  CHECK_THROWS_AS(rms_difference(xs, std::vector<double>{1.0}), UsageError);
  const std::vector<double> x{1.0, 10.0, 100.0}, y{3.0, 300.0, 30000.0};
  CHECK(log_log_slope(x, y) == doctest::Approx(2.0));
  CHECK(chi_square_p_value(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_p_value(11.345, 3) == doctest::Approx(0.01).epsilon(0.01));
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}
