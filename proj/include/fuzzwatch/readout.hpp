#pragma once

// Candidate readout curves E(t): generation, smoothing and transition classes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/random.hpp"

namespace fuzzwatch {

/// Real energy samples on a uniform grid.
struct ReadoutCurve {
  TimeGrid grid;
  std::vector<double> values;

  static ReadoutCurve constant(const TimeGrid& grid, double value) {
    return {grid, std::vector<double>(grid.size(), value)};
  }
  /// Linear interpolation; clamps outside the grid.
  double value_at(double t) const;
};

/// Stationary Ornstein-Uhlenbeck prior over readouts, clipped to [lower, upper].
struct ReadoutProcess {
  double mean = 0.0;
  double stddev = 1.0;
  double correlation_time = 0.05;
  double lower = -3.0;
  double upper = 3.0;

  /// mean = E-bar, stddev = Delta E, correlation time T/10, bounds E-bar +- 3 Delta E.
  static ReadoutProcess defaults_for(const MeasurementConfig& config);

  /// Throws ConfigError. With a config, also requires the bounds to contain [E1, E2].
  void validate() const;
  void validate(const MeasurementConfig& config) const;

  /// Exact OU transition over `dt` from the unclipped state x.
  double step(double x, double dt, RandomStream& rng) const;
  double stationary(RandomStream& rng) const;
  double clip(double x) const { return x < lower ? lower : (x > upper ? upper : x); }
};

enum class ReadoutClass : int { E11 = 0, E12 = 1, E21 = 2, E22 = 3 };

inline constexpr std::size_t kClassCount = 4;

std::string_view to_string(ReadoutClass c);
std::optional<ReadoutClass> parse_readout_class(std::string_view text);
/// The class seen after exchanging the roles of the two levels.
ReadoutClass swap_levels(ReadoutClass c);

/// OU path sampled exactly on the grid (stationary start), clipped to the process bounds.
ReadoutCurve sample_readout(const ReadoutProcess& process, const TimeGrid& grid,
                            RandomStream& rng);

/// Centered moving average of total width `window`. Near the ends the window is truncated to the
/// samples that exist. Throws UsageError unless 0 < window <= span.
ReadoutCurve smooth(const ReadoutCurve& curve, double window);

/// Class from the first and last samples: below e_mid -> 1, otherwise 2.
ReadoutClass classify(const ReadoutCurve& curve, double e_mid);

/// E -> 2 e_mid - E.
ReadoutCurve reflect(const ReadoutCurve& curve, double e_mid);

/// Samples with arbitrary (increasing) times, e.g. a reconstructed readout with gaps.
struct ReadoutSamples {
  std::vector<double> times;
  std::vector<double> values;
};

/// Two-column CSV "t,E" preceded by '#' comment lines.
void write_curve_csv(std::ostream& out, const ReadoutSamples& samples,
                     const std::vector<std::string>& header = {});
void write_curve_csv(std::ostream& out, const ReadoutCurve& curve,
                     const std::vector<std::string>& header = {});
ReadoutSamples read_curve_csv(std::istream& in);
/// Rebuilds a uniform curve; throws ConfigError if the samples are not on a uniform grid.
ReadoutCurve to_uniform_curve(const ReadoutSamples& samples);

}  // namespace fuzzwatch
