#include "fuzzwatch/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/parallel.hpp"
#include "fuzzwatch/random.hpp"
#include "fuzzwatch/stats.hpp"

namespace fuzzwatch {

namespace {

constexpr std::uint64_t kResampleStream = 0x8000000000000000ULL;
constexpr std::uint64_t kBootstrapStream = 0x8000000000000001ULL;

struct Particle {
  double latent = 0.0;
  double previous = 0.0;
  std::array<complex, 2> c{};
  double log_weight = 0.0;
};

void finish_record(EnsembleRecord& r, const MeasurementConfig& config, const EnsembleOptions& options) {
  r.trajectory = evolve(config, r.readout);
  r.log_probability = r.trajectory.log_final_norm;
  r.probability = std::exp(r.log_probability);
  if (!options.keep_amplitudes) {
    r.trajectory.amplitudes = {};
    r.trajectory.norms = {};
  }
  r.smoothed = smooth(r.readout, options.smoothing_window);
  r.cls = classify(r.smoothed, config.mid_energy());
}

void check_inputs(const MeasurementConfig& config, const ReadoutProcess& process, std::size_t n,
                  const EnsembleOptions& options) {
  if (n < 1) throw UsageError("ensemble size must be at least 1");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw UsageError("ensemble size too large");
  (void)config.validate();
  process.validate(config);
  const double span = config.t2 - config.t1;
  if (!(options.smoothing_window > 0.0) || options.smoothing_window > span * (1.0 + 1e-12)) {
    throw ConfigError("smoothing_window must lie in (0, t2 - t1]");
  }
  if (!(options.ess_threshold >= 0.0 && options.ess_threshold <= 1.0)) {
    throw ConfigError("ess_threshold must lie in [0, 1]");
  }
}

void importance_ensemble(EnsembleResult& result, std::size_t n, unsigned threads) {
  const MeasurementConfig& config = result.config;
  const TimeGrid grid = config.grid();
  result.records.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    RandomStream rng(result.seed, i);
    EnsembleRecord& r = result.records[i];
    r.readout = sample_readout(result.process, grid, rng);
    finish_record(r, config, result.options);
  });
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& r : result.records) max_log = std::max(max_log, r.log_probability);
  for (auto& r : result.records) r.weight = std::exp(r.log_probability - max_log);
}

void resampling_ensemble(EnsembleResult& result, std::size_t n, unsigned threads) {
  const MeasurementConfig& config = result.config;
  const ReadoutProcess& process = result.process;
  const TimeGrid grid = config.grid();
  const std::size_t steps = grid.intervals;

  std::vector<RandomStream> streams;
  streams.reserve(n);
  for (std::size_t j = 0; j < n; ++j) streams.emplace_back(result.seed, j);
  RandomStream resample_rng(result.seed, kResampleStream);

  std::vector<double> values((steps + 1) * n);
  std::vector<std::uint32_t> parents((steps + 1) * n);
  std::vector<Particle> particles(n), scratch(n);
  std::vector<std::uint32_t> ancestor(n);
  for (std::size_t j = 0; j < n; ++j) ancestor[j] = static_cast<std::uint32_t>(j);

  const AtomState start = config.initial_state.normalized();
  for (std::size_t j = 0; j < n; ++j) {
    Particle& p = particles[j];
    p.latent = process.stationary(streams[j]);
    p.previous = process.clip(p.latent);
    p.c = {start.c1, start.c2};
    values[j] = p.previous;
    parents[j] = static_cast<std::uint32_t>(j);
  }

  std::vector<double> w(n);
  for (std::size_t k = 0; k < steps; ++k) {
    const double ta = grid.at(k), tb = grid.at(k + 1);
    double* row = values.data() + (k + 1) * n;
    std::uint32_t* parent_row = parents.data() + (k + 1) * n;
    parallel_for(n, threads, [&](std::size_t j) {
      Particle& p = particles[j];
      p.latent = process.step(p.latent, grid.step, streams[j]);
      const double e = process.clip(p.latent);
      row[j] = e;
      parent_row[j] = ancestor[j];
      if (!std::isfinite(p.log_weight)) {
        p.previous = e;
        return;
      }
      advance_interval(p.c, config, ta, tb, p.previous, e);
      p.previous = e;
      const double norm = std::norm(p.c[0]) + std::norm(p.c[1]);
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        p.log_weight = -std::numeric_limits<double>::infinity();
        p.c = {complex{1.0, 0.0}, complex{0.0, 0.0}};
        return;
      }
      p.log_weight += std::log(norm);
      const double s = std::sqrt(norm);
      p.c[0] /= s;
      p.c[1] /= s;
    });

    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& p : particles) max_log = std::max(max_log, p.log_weight);
    if (!std::isfinite(max_log)) {
      throw IntegrationError("all particles lost their weight at t = " + format_number(tb));
    }
    for (std::size_t j = 0; j < n; ++j) w[j] = std::exp(particles[j].log_weight - max_log);
    for (std::size_t j = 0; j < n; ++j) ancestor[j] = static_cast<std::uint32_t>(j);

    const bool last = k + 1 == steps;
    if (last || effective_sample_size(w) >= result.options.ess_threshold * static_cast<double>(n)) {
      continue;
    }
    // Systematic resampling.
    const double total = compensated_sum(w);
    const double u0 = resample_rng.unit();
    double cumulative = 0.0;
    std::size_t src = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (u0 + static_cast<double>(j)) / static_cast<double>(n) * total;
      while (src + 1 < n && cumulative + w[src] <= u) cumulative += w[src++];
      ancestor[j] = static_cast<std::uint32_t>(src);
      scratch[j] = particles[src];
      scratch[j].log_weight = 0.0;
    }
    particles.swap(scratch);
    ++result.resampling_events;
  }

  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& p : particles) max_log = std::max(max_log, p.log_weight);

  result.records.resize(n);
  parallel_for(n, threads, [&](std::size_t j) {
    EnsembleRecord& r = result.records[j];
    r.readout.grid = grid;
    r.readout.values.resize(steps + 1);
    std::size_t idx = j;
    for (std::size_t k = steps + 1; k-- > 0;) {
      r.readout.values[k] = values[k * n + idx];
      idx = parents[k * n + idx];
    }
    r.weight = std::exp(particles[j].log_weight - max_log);
    finish_record(r, config, result.options);
  });
}

template <class Weight>
std::array<double, kClassCount> class_fractions(const EnsembleResult& result, Weight&& weight_of) {
  std::array<CompensatedSum, kClassCount> sums;
  CompensatedSum total;
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const double w = weight_of(i);
    sums[static_cast<std::size_t>(result.records[i].cls)].add(w);
    total.add(w);
  }
  std::array<double, kClassCount> out{};
  if (!(total.value() > 0.0)) return out;
  for (std::size_t c = 0; c < kClassCount; ++c) out[c] = sums[c].value() / total.value();
  return out;
}

}  // namespace

std::string_view to_string(Estimator e) {
  return e == Estimator::Resampling ? "resampling" : "importance";
}

std::optional<Estimator> parse_estimator(std::string_view text) {
  if (text == "resampling") return Estimator::Resampling;
  if (text == "importance") return Estimator::Importance;
  return std::nullopt;
}

std::string_view to_string(DensityField f) {
  return f == DensityField::Readout ? "readout" : "population";
}

std::vector<double> EnsembleResult::weights() const {
  std::vector<double> w;
  w.reserve(records.size());
  for (const auto& r : records) w.push_back(r.weight);
  return w;
}

double EnsembleResult::effective_sample_size() const { return fuzzwatch::effective_sample_size(weights()); }

EnsembleResult run_ensemble(const MeasurementConfig& config, const ReadoutProcess& process,
                            std::size_t n, std::uint64_t seed, const EnsembleOptions& options) {
  check_inputs(config, process, n, options);
  EnsembleResult result;
  result.config = config;
  result.process = process;
  result.options = options;
  result.seed = seed;
  const unsigned threads = resolve_threads(options.threads);
  if (options.estimator == Estimator::Importance) {
    importance_ensemble(result, n, threads);
  } else {
    resampling_ensemble(result, n, threads);
  }
  CompensatedSum total;
  for (const auto& r : result.records) total.add(r.weight);
  result.total_weight = total.value();
  return result;
}

std::array<double, kClassCount> class_probabilities(const EnsembleResult& result) {
  if (result.records.empty()) throw UsageError("class probabilities of an empty ensemble");
  return class_fractions(result, [&](std::size_t i) { return result.records[i].weight; });
}

double transition_probability(const EnsembleResult& result) {
  if (result.records.empty()) throw UsageError("transition probability of an empty ensemble");
  CompensatedSum num, den;
  for (const auto& r : result.records) {
    num.add(r.weight * r.final_p2());
    den.add(r.weight);
  }
  return num.value() / den.value();
}

std::optional<double> conditional_final_p2(const EnsembleResult& result, ReadoutClass cls) {
  CompensatedSum num, den;
  for (const auto& r : result.records) {
    if (r.cls != cls) continue;
    num.add(r.weight * r.final_p2());
    den.add(r.weight);
  }
  if (!(den.value() > 0.0)) return std::nullopt;
  return num.value() / den.value();
}

std::vector<double> mean_population(const EnsembleResult& result) {
  if (result.records.empty()) throw UsageError("mean population of an empty ensemble");
  const std::size_t m = result.records.front().trajectory.populations.size();
  std::vector<CompensatedSum> sums(m);
  CompensatedSum den;
  for (const auto& r : result.records) {
    for (std::size_t k = 0; k < m; ++k) sums[k].add(r.weight * r.trajectory.populations[k]);
    den.add(r.weight);
  }
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = sums[k].value() / den.value();
  return out;
}

std::pair<std::vector<double>, std::vector<double>> final_populations(const EnsembleResult& result) {
  std::pair<std::vector<double>, std::vector<double>> out;
  out.first.reserve(result.records.size());
  out.second.reserve(result.records.size());
  for (const auto& r : result.records) {
    out.first.push_back(r.final_p2());
    out.second.push_back(r.weight);
  }
  return out;
}

BootstrapErrors bootstrap_errors(const EnsembleResult& result, std::size_t resamples,
                                 std::uint64_t seed) {
  if (result.records.empty()) throw UsageError("bootstrap of an empty ensemble");
  BootstrapErrors errors;
  if (resamples < 2) return errors;
  const std::size_t n = result.records.size();
  RandomStream rng(seed, kBootstrapStream);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> counts(n);
  std::array<std::vector<double>, kClassCount> class_reps;
  std::vector<double> transition_reps;
  for (std::size_t b = 0; b < resamples; ++b) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[pick(rng.engine)];
    const auto probs = class_fractions(result, [&](std::size_t i) {
      return static_cast<double>(counts[i]) * result.records[i].weight;
    });
    for (std::size_t c = 0; c < kClassCount; ++c) class_reps[c].push_back(probs[c]);
    CompensatedSum num, den;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = static_cast<double>(counts[i]) * result.records[i].weight;
      num.add(w * result.records[i].final_p2());
      den.add(w);
    }
    transition_reps.push_back(den.value() > 0.0 ? num.value() / den.value() : 0.0);
  }
  const auto stddev = [](const std::vector<double>& xs) {
    const double m = compensated_sum(xs) / static_cast<double>(xs.size());
    CompensatedSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return std::sqrt(s.value() / static_cast<double>(xs.size() - 1));
  };
  for (std::size_t c = 0; c < kClassCount; ++c) errors.class_probabilities[c] = stddev(class_reps[c]);
  errors.transition = stddev(transition_reps);
  return errors;
}

Matrix DensityGrid::column_normalized() const {
  Matrix out = mass;
  for (std::size_t c = 0; c < out.cols; ++c) {
    double peak = 0.0;
    for (std::size_t r = 0; r < out.rows; ++r) peak = std::max(peak, out(r, c));
    if (peak > 0.0) {
      for (std::size_t r = 0; r < out.rows; ++r) out(r, c) /= peak;
    }
  }
  return out;
}

DensityGrid density_grid(const EnsembleResult& result, DensityField field, std::size_t t_bins,
                         std::size_t y_bins, std::optional<ReadoutClass> filter) {
  const TimeGrid grid = result.config.grid();
  if (t_bins < 2 || y_bins < 2) throw UsageError("density grid needs at least 2 bins per axis");
  if (t_bins > grid.size()) {
    throw UsageError("t_bins = " + std::to_string(t_bins) + " exceeds the " +
                     std::to_string(grid.size()) + " grid samples");
  }
  DensityGrid g;
  g.field = field;
  double lo = 0.0, hi = 1.0;
  if (field == DensityField::Readout) {
    lo = result.config.mid_energy() - 2.0 * result.config.level_gap();
    hi = result.config.mid_energy() + 2.0 * result.config.level_gap();
  }
  const double t_lo = grid.start, t_hi = grid.end();
  for (std::size_t b = 0; b <= t_bins; ++b) {
    g.t_edges.push_back(t_lo + (t_hi - t_lo) * static_cast<double>(b) / static_cast<double>(t_bins));
  }
  for (std::size_t b = 0; b <= y_bins; ++b) {
    g.y_edges.push_back(lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(y_bins));
  }

  std::vector<std::size_t> column(grid.size());
  std::vector<std::size_t> per_column(t_bins, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    column[k] = std::min(t_bins - 1, k * t_bins / grid.intervals);
    ++per_column[column[k]];
  }

  std::vector<CompensatedSum> cells(t_bins * y_bins);
  CompensatedSum total;
  for (const auto& r : result.records) {
    if (filter && r.cls != *filter) continue;
    total.add(r.weight);
    const std::vector<double>& ys =
        field == DensityField::Readout ? r.smoothed.values : r.trajectory.populations;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double x = (ys[k] - lo) / (hi - lo) * static_cast<double>(y_bins);
      const auto row = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(y_bins - 1)));
      const std::size_t col = column[k];
      cells[row * t_bins + col].add(r.weight / static_cast<double>(per_column[col]));
    }
  }
  g.mass = Matrix(y_bins, t_bins);
  for (std::size_t i = 0; i < cells.size(); ++i) g.mass.data[i] = cells[i].value();
  g.total_weight = total.value();
  return g;
}

std::pair<DensityGrid, DensityGrid> class_conditional_grids(const EnsembleResult& result,
                                                            ReadoutClass cls, std::size_t t_bins,
                                                            std::size_t y_bins) {
  return {density_grid(result, DensityField::Readout, t_bins, y_bins, cls),
          density_grid(result, DensityField::Population, t_bins, y_bins, cls)};
}

std::vector<ScanRow> regime_scan(const MeasurementConfig& config_template,
                                 const ReadoutProcess& process, std::span<const double> tlr_values,
                                 std::size_t n, std::uint64_t seed, const EnsembleOptions& options) {
  if (tlr_values.size() < 2) throw ConfigError("a regime scan needs at least two T_lr values");
  std::vector<ScanRow> rows;
  for (double tlr : tlr_values) {
    MeasurementConfig config = config_template;
    config.set_level_resolution_time(tlr);
    const EnsembleResult result = run_ensemble(config, process, n, seed, options);
    const BootstrapErrors errors = bootstrap_errors(result, options.bootstrap_resamples, seed);
    ScanRow row;
    row.level_resolution_time = config.level_resolution_time();
    row.tlr_ratio = config.tlr_ratio();
    row.transition = transition_probability(result);
    row.transition_error = errors.transition;
    row.classes = class_probabilities(result);
    row.class_errors = errors.class_probabilities;
    row.effective_sample_size = result.effective_sample_size();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fuzzwatch
