#pragma once

// Monte Carlo ensembles of (readout, trajectory) pairs weighted by P[E].

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/io.hpp"
#include "fuzzwatch/readout.hpp"

namespace fuzzwatch {

enum class Estimator {
  /// Particle filter over the readout path with systematic resampling.
  Resampling,
  /// Independent prior draws weighted by P[E].
  Importance,
};

std::string_view to_string(Estimator e);
std::optional<Estimator> parse_estimator(std::string_view text);

struct EnsembleOptions {
  unsigned threads = 0;
  Estimator estimator = Estimator::Resampling;
  /// Resample when ESS < ess_threshold * n.
  double ess_threshold = 0.5;
  /// Moving-average width used for classification and readout density grids.
  double smoothing_window = 0.5;
  /// Keep amplitudes and norms of every trajectory (populations are always kept).
  bool keep_amplitudes = false;
  std::size_t bootstrap_resamples = 200;
};

struct EnsembleRecord {
  ReadoutCurve readout;
  ReadoutCurve smoothed;
  Trajectory trajectory;
  /// P[E] of this readout and its logarithm.
  double probability = 0.0;
  double log_probability = 0.0;
  /// Estimator weight, scaled so that the largest weight in the ensemble is 1.
  double weight = 0.0;
  ReadoutClass cls = ReadoutClass::E11;

  double final_p2() const { return trajectory.populations.back(); }
};

struct EnsembleResult {
  MeasurementConfig config;
  ReadoutProcess process;
  EnsembleOptions options;
  std::uint64_t seed = 0;
  std::vector<EnsembleRecord> records;
  double total_weight = 0.0;
  std::size_t resampling_events = 0;

  std::vector<double> weights() const;
  double effective_sample_size() const;
};

/// n >= 1 (UsageError otherwise). The result depends only on the inputs, not on options.threads.
EnsembleResult run_ensemble(const MeasurementConfig& config, const ReadoutProcess& process,
                            std::size_t n, std::uint64_t seed, const EnsembleOptions& options = {});

/// Weight fractions of E11, E12, E21, E22. UsageError on an empty result.
std::array<double, kClassCount> class_probabilities(const EnsembleResult& result);

/// Weighted mean of the final P2.
double transition_probability(const EnsembleResult& result);

/// Weighted mean final P2 over one class; nullopt if the class carries no weight.
std::optional<double> conditional_final_p2(const EnsembleResult& result, ReadoutClass cls);

/// Weighted mean P2(t) on the configuration grid.
std::vector<double> mean_population(const EnsembleResult& result);

/// Weighted final P2 samples (values, weights).
std::pair<std::vector<double>, std::vector<double>> final_populations(const EnsembleResult& result);

struct BootstrapErrors {
  std::array<double, kClassCount> class_probabilities{};
  double transition = 0.0;
};

/// Standard deviations over `resamples` record-level bootstrap replicates.
BootstrapErrors bootstrap_errors(const EnsembleResult& result, std::size_t resamples,
                                 std::uint64_t seed);

enum class DensityField { Readout, Population };

std::string_view to_string(DensityField f);

struct DensityGrid {
  DensityField field = DensityField::Readout;
  std::vector<double> t_edges;
  std::vector<double> y_edges;
  /// rows = value bins (ascending), cols = time bins.
  Matrix mass;
  double total_weight = 0.0;

  /// Each column divided by its maximum (zero columns stay zero).
  Matrix column_normalized() const;
};

/// Weighted 2D histogram. Readouts use the smoothed curve on [E-bar - 2 dE, E-bar + 2 dE],
/// populations use [0, 1]; values outside clamp to the edge bins. Every record deposits its
/// weight exactly once per time column. Requires 2 <= t_bins <= grid size and y_bins >= 2.
DensityGrid density_grid(const EnsembleResult& result, DensityField field, std::size_t t_bins,
                         std::size_t y_bins, std::optional<ReadoutClass> filter = std::nullopt);

/// (readout, population) grids restricted to one class.
std::pair<DensityGrid, DensityGrid> class_conditional_grids(const EnsembleResult& result,
                                                            ReadoutClass cls, std::size_t t_bins,
                                                            std::size_t y_bins);

struct ScanRow {
  double level_resolution_time = 0.0;  // +inf for kappa = 0
  double tlr_ratio = 0.0;              // 4 pi T_lr / T_R
  double transition = 0.0;
  double transition_error = 0.0;
  std::array<double, kClassCount> classes{};
  std::array<double, kClassCount> class_errors{};
  double effective_sample_size = 0.0;
};

/// One ensemble per T_lr value (+inf means no measurement). Needs at least two values.
std::vector<ScanRow> regime_scan(const MeasurementConfig& config_template,
                                 const ReadoutProcess& process, std::span<const double> tlr_values,
                                 std::size_t n, std::uint64_t seed,
                                 const EnsembleOptions& options = {});

}  // namespace fuzzwatch
