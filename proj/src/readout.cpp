#include "fuzzwatch/readout.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/io.hpp"

namespace fuzzwatch {

double ReadoutCurve::value_at(double t) const {
  if (values.empty()) throw UsageError("empty readout curve");
  if (t <= grid.start) return values.front();
  if (t >= grid.end()) return values.back();
  const double x = (t - grid.start) / grid.step;
  const auto k = std::min(static_cast<std::size_t>(x), grid.intervals - 1);
  const double f = x - static_cast<double>(k);
  return values[k] + f * (values[k + 1] - values[k]);
}

ReadoutProcess ReadoutProcess::defaults_for(const MeasurementConfig& config) {
  ReadoutProcess p;
  p.mean = config.mid_energy();
  p.stddev = config.level_gap();
  p.correlation_time = config.pulse_duration() / 10.0;
  p.lower = p.mean - 3.0 * p.stddev;
  p.upper = p.mean + 3.0 * p.stddev;
  return p;
}

void ReadoutProcess::validate() const {
  if (!std::isfinite(mean)) throw ConfigError("readout mean must be finite");
  if (!(stddev > 0.0) || !std::isfinite(stddev)) throw ConfigError("readout stddev must be positive");
  if (!(correlation_time > 0.0) || !std::isfinite(correlation_time)) {
    throw ConfigError("readout correlation_time must be positive");
  }
  if (!(lower < upper)) throw ConfigError("readout bounds must satisfy lower < upper");
}

void ReadoutProcess::validate(const MeasurementConfig& config) const {
  validate();
  if (lower > config.e1 || upper < config.e2) {
    throw ConfigError("readout bounds must contain [e1, e2]");
  }
}

double ReadoutProcess::step(double x, double dt, RandomStream& rng) const {
  const double a = std::exp(-dt / correlation_time);
  return mean + a * (x - mean) + stddev * std::sqrt(1.0 - a * a) * rng.gaussian();
}

double ReadoutProcess::stationary(RandomStream& rng) const { return mean + stddev * rng.gaussian(); }

std::string_view to_string(ReadoutClass c) {
  switch (c) {
    case ReadoutClass::E11: return "E11";
    case ReadoutClass::E12: return "E12";
    case ReadoutClass::E21: return "E21";
    case ReadoutClass::E22: return "E22";
  }
  return "?";
}

std::optional<ReadoutClass> parse_readout_class(std::string_view text) {
  for (std::size_t i = 0; i < kClassCount; ++i) {
    const auto c = static_cast<ReadoutClass>(i);
    if (text == to_string(c)) return c;
  }
  return std::nullopt;
}

ReadoutClass swap_levels(ReadoutClass c) {
  switch (c) {
    case ReadoutClass::E11: return ReadoutClass::E22;
    case ReadoutClass::E12: return ReadoutClass::E21;
    case ReadoutClass::E21: return ReadoutClass::E12;
    case ReadoutClass::E22: return ReadoutClass::E11;
  }
  return c;
}

ReadoutCurve sample_readout(const ReadoutProcess& process, const TimeGrid& grid, RandomStream& rng) {
  ReadoutCurve curve;
  curve.grid = grid;
  curve.values.resize(grid.size());
  double x = process.stationary(rng);
  curve.values[0] = process.clip(x);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    x = process.step(x, grid.step, rng);
    curve.values[k] = process.clip(x);
  }
  return curve;
}

ReadoutCurve smooth(const ReadoutCurve& curve, double window) {
  const double span = curve.grid.end() - curve.grid.start;
  if (!(window > 0.0) || window > span * (1.0 + 1e-12)) {
    throw UsageError("smoothing window must lie in (0, t2 - t1]");
  }
  const std::size_t n = curve.values.size();
  const auto half = static_cast<std::size_t>(std::llround(0.5 * window / curve.grid.step));
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + curve.values[k];
  ReadoutCurve out{curve.grid, std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(n - 1, k + half);
    out.values[k] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

ReadoutClass classify(const ReadoutCurve& curve, double e_mid) {
  if (curve.values.empty()) throw UsageError("cannot classify an empty curve");
  const int first = curve.values.front() < e_mid ? 0 : 1;
  const int last = curve.values.back() < e_mid ? 0 : 1;
  return static_cast<ReadoutClass>(2 * first + last);
}

ReadoutCurve reflect(const ReadoutCurve& curve, double e_mid) {
  ReadoutCurve out = curve;
  for (double& v : out.values) v = 2.0 * e_mid - v;
  return out;
}

void write_curve_csv(std::ostream& out, const ReadoutSamples& samples,
                     const std::vector<std::string>& header) {
  if (samples.times.size() != samples.values.size()) throw UsageError("times/values size mismatch");
  for (const auto& line : header) out << "# " << line << '\n';
  out << "t,E\n";
  for (std::size_t k = 0; k < samples.times.size(); ++k) {
    out << format_number(samples.times[k]) << ',' << format_number(samples.values[k]) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const ReadoutCurve& curve,
                     const std::vector<std::string>& header) {
  ReadoutSamples samples;
  samples.values = curve.values;
  samples.times.resize(curve.values.size());
  for (std::size_t k = 0; k < samples.times.size(); ++k) samples.times[k] = curve.grid.at(k);
  write_curve_csv(out, samples, header);
}

ReadoutSamples read_curve_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t ti = table.column("t");
  const std::size_t ei = table.column("E");
  ReadoutSamples samples;
  for (const auto& row : table.rows) {
    samples.times.push_back(row[ti]);
    samples.values.push_back(row[ei]);
  }
  return samples;
}

ReadoutCurve to_uniform_curve(const ReadoutSamples& samples) {
  const std::size_t n = samples.times.size();
  if (n < 2 || samples.values.size() != n) throw ConfigError("need at least two samples");
  TimeGrid grid;
  grid.start = samples.times.front();
  grid.intervals = n - 1;
  grid.step = (samples.times.back() - grid.start) / static_cast<double>(n - 1);
  if (!(grid.step > 0.0)) throw ConfigError("sample times must increase");
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(samples.times[k] - grid.at(k)) > 1e-9 * grid.step) {
      throw ConfigError("samples are not on a uniform grid (gap near t = " +
                        format_number(samples.times[k]) + ")");
    }
  }
  return {grid, samples.values};
}

}  // namespace fuzzwatch
