#include "fuzzwatch/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <set>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/io.hpp"
#include "fuzzwatch/units.hpp"

namespace fuzzwatch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(const KeyValueFile& file, const KeyValueFile::Entry& e) {
  return file.source() + ":" + std::to_string(e.line) + ": ";
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
  KeyValueFile file;
  file.source_ = std::move(source);
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
    if (e.key.empty()) throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": empty key");
    if (e.value.empty()) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": empty value for '" + e.key + "'");
    }
    if (!seen.insert(e.key).second) {
      throw ConfigError(file.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + e.key + "'");
    }
    file.entries_.push_back(std::move(e));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse(in, path.string());
}

double parse_double(const std::string& key, const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty() || std::isnan(v)) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

RunConfig::RunConfig() { refresh_defaults(); }

void RunConfig::refresh_defaults() {
  MeasurementConfig& m = measurement;
  switch (strength_kind_) {
    case Strength::Kappa: m.kappa = strength_value_; break;
    case Strength::Tlr:
      if (std::isinf(strength_value_)) {
        m.kappa = 0.0;
      } else if (strength_value_ > 0.0 && m.level_gap() > 0.0) {
        m.set_level_resolution_time(strength_value_);
      }
      break;
    case Strength::Ratio:
      if (std::isinf(strength_value_)) {
        m.kappa = 0.0;
      } else if (strength_value_ > 0.0 && m.level_gap() > 0.0 && m.v0 > 0.0) {
        m.set_tlr_ratio(strength_value_);
      }
      break;
  }
  const ReadoutProcess d = ReadoutProcess::defaults_for(m);
  if (!process_mean_set_) process.mean = d.mean;
  if (!process_stddev_set_) process.stddev = d.stddev;
  if (!process_tau_set_) process.correlation_time = d.correlation_time;
  if (!process_lower_set_) process.lower = process.mean - 3.0 * process.stddev;
  if (!process_upper_set_) process.upper = process.mean + 3.0 * process.stddev;
  if (!window_set_) ensemble.smoothing_window = m.pulse_duration();
}

void RunConfig::set(const std::string& key, const std::string& value) {
  MeasurementConfig& m = measurement;
  const auto num = [&] { return parse_double(key, value); };
  const auto positive = [&] {
    const double v = num();
    if (!(v > 0.0)) throw ConfigError(key + " must be positive");
    return v;
  };
  const auto count = [&] { return parse_count(key, value); };

  if (key == "e1") m.e1 = num();
  else if (key == "e2") m.e2 = num();
  else if (key == "v0") m.v0 = positive();
  else if (key == "rabi_period") m.v0 = std::acos(-1.0) / positive();
  else if (key == "pulse_start") m.pulse_start = num();
  else if (key == "pulse_end") m.pulse_end = num();
  else if (key == "t1") m.t1 = num();
  else if (key == "t2") m.t2 = num();
  else if (key == "dt") m.dt = positive();
  else if (key == "kappa") {
    const double v = num();
    if (v < 0.0 || std::isinf(v)) throw ConfigError("kappa must be finite and non-negative");
    strength_kind_ = Strength::Kappa;
    strength_value_ = v;
  } else if (key == "tlr") {
    strength_kind_ = Strength::Tlr;
    strength_value_ = positive();
  } else if (key == "tlr_ratio") {
    strength_kind_ = Strength::Ratio;
    strength_value_ = positive();
  } else if (key == "c1_re") m.initial_state.c1.real(num());
  else if (key == "c1_im") m.initial_state.c1.imag(num());
  else if (key == "c2_re") m.initial_state.c2.real(num());
  else if (key == "c2_im") m.initial_state.c2.imag(num());
  else if (key == "readout_mean") {
    process.mean = num();
    process_mean_set_ = true;
  } else if (key == "readout_stddev") {
    process.stddev = positive();
    process_stddev_set_ = true;
  } else if (key == "readout_correlation_time") {
    process.correlation_time = positive();
    process_tau_set_ = true;
  } else if (key == "readout_lower") {
    process.lower = num();
    process_lower_set_ = true;
  } else if (key == "readout_upper") {
    process.upper = num();
    process_upper_set_ = true;
  } else if (key == "smoothing_window") {
    ensemble.smoothing_window = positive();
    window_set_ = true;
  } else if (key == "estimator") {
    const auto e = parse_estimator(value);
    if (!e) throw ConfigError("estimator must be 'resampling' or 'importance', got '" + value + "'");
    ensemble.estimator = *e;
  } else if (key == "ess_threshold") {
    const double v = num();
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("ess_threshold must lie in [0, 1]");
    ensemble.ess_threshold = v;
  } else if (key == "bootstrap_resamples") ensemble.bootstrap_resamples = count();
  else if (key == "grid_t_bins") grid_t_bins = count();
  else if (key == "grid_y_bins") grid_y_bins = count();
  else if (key == "n") n = count();
  else if (key == "seed") seed = count();
  else throw ConfigError("unknown key '" + key + "'");
  refresh_defaults();
}

std::vector<std::string> RunConfig::validate() const {
  auto warnings = measurement.validate();
  process.validate(measurement);
  const double span = measurement.t2 - measurement.t1;
  if (!(ensemble.smoothing_window > 0.0) || ensemble.smoothing_window > span * (1.0 + 1e-12)) {
    throw ConfigError("smoothing_window must lie in (0, t2 - t1]");
  }
  if (n < 1) throw ConfigError("n must be at least 1");
  if (grid_t_bins < 2 || grid_y_bins < 2) throw ConfigError("grid bins must be at least 2");
  if (grid_t_bins > measurement.grid().size()) {
    throw ConfigError("grid_t_bins exceeds the number of time samples");
  }
  return warnings;
}

std::vector<std::pair<std::string, std::string>> RunConfig::describe() const {
  const MeasurementConfig& m = measurement;
  const auto f = [](double x) { return format_number(x); };
  return {
      {"e1", f(m.e1)},
      {"e2", f(m.e2)},
      {"v0", f(m.v0)},
      {"pulse_start", f(m.pulse_start)},
      {"pulse_end", f(m.pulse_end)},
      {"t1", f(m.t1)},
      {"t2", f(m.t2)},
      {"dt", f(m.dt)},
      {"kappa", f(m.kappa)},
      {"c1_re", f(m.initial_state.c1.real())},
      {"c1_im", f(m.initial_state.c1.imag())},
      {"c2_re", f(m.initial_state.c2.real())},
      {"c2_im", f(m.initial_state.c2.imag())},
      {"readout_mean", f(process.mean)},
      {"readout_stddev", f(process.stddev)},
      {"readout_correlation_time", f(process.correlation_time)},
      {"readout_lower", f(process.lower)},
      {"readout_upper", f(process.upper)},
      {"smoothing_window", f(ensemble.smoothing_window)},
      {"estimator", std::string(to_string(ensemble.estimator))},
      {"ess_threshold", f(ensemble.ess_threshold)},
      {"bootstrap_resamples", std::to_string(ensemble.bootstrap_resamples)},
      {"grid_t_bins", std::to_string(grid_t_bins)},
      {"grid_y_bins", std::to_string(grid_y_bins)},
      {"n", std::to_string(n)},
      {"seed", std::to_string(seed)},
  };
}

RunConfig RunConfig::from_file(const KeyValueFile& file) {
  RunConfig config;
  for (const auto& e : file.entries()) {
    try {
      config.set(e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(at_line(file, e) + err.what());
    }
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_file(KeyValueFile::load(path));
}

void set_setup_key(ScatteringSetup& s, const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (key == "dipole_d1") s.d1 = units::dipole_si_to_cgs(v);
  else if (key == "alpha1") s.alpha1 = units::polarizability_si_to_cgs(v);
  else if (key == "alpha2") s.alpha2 = units::polarizability_si_to_cgs(v);
  else if (key == "field_e0") s.field_e0 = units::field_si_to_cgs(v);
  else if (key == "distance_l") s.distance_l = units::length_si_to_cgs(v);
  else if (key == "electron_energy") s.electron_energy = units::energy_si_to_cgs(v);
  else if (key == "electron_energy_ev") s.electron_energy = units::ev_to_erg(v);
  else if (key == "energy_spread") s.energy_spread = units::energy_si_to_cgs(v);
  else if (key == "energy_spread_ev") s.energy_spread = units::ev_to_erg(v);
  else if (key == "slit_q") s.slit_q = units::length_si_to_cgs(v);
  else if (key == "slit_ratio") s.slit_ratio = v;
  else if (key == "attenuation_s") s.attenuation_s = v;
  else if (key == "surface_density") s.surface_density = units::areal_density_si_to_cgs(v);
  else if (key == "pulse_duration") s.pulse_duration = v;
  else if (key == "spontaneous_lifetime") s.spontaneous_lifetime = v;
  else throw ConfigError("unknown key '" + key + "'");
}

ScatteringSetup setup_from_file(const KeyValueFile& file) {
  ScatteringSetup setup;
  for (const auto& e : file.entries()) {
    try {
      set_setup_key(setup, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(at_line(file, e) + err.what());
    }
  }
  try {
    (void)setup.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(file.source() + ": " + err.what());
  }
  return setup;
}

ScatteringSetup load_setup(const std::filesystem::path& path) {
  return setup_from_file(KeyValueFile::load(path));
}

}  // namespace fuzzwatch
