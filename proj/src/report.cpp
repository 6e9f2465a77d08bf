#include "fuzzwatch/report.hpp"

#include <fstream>
#include <sstream>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/units.hpp"

namespace fuzzwatch {

namespace {

namespace fs = std::filesystem;

std::string opt(const std::optional<double>& x) { return x ? format_number(*x) : "nan"; }

Matrix flipped(const Matrix& m) {
  Matrix out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out(m.rows - 1 - r, c) = m(r, c);
  }
  return out;
}

std::vector<std::string> with(std::vector<std::string> lines, std::initializer_list<std::string> more) {
  lines.insert(lines.end(), more.begin(), more.end());
  return lines;
}

}  // namespace

EnsembleSummary summarize(const EnsembleResult& result) {
  EnsembleSummary s;
  s.classes = class_probabilities(result);
  s.errors = bootstrap_errors(result, result.options.bootstrap_resamples, result.seed);
  s.transition = transition_probability(result);
  s.e12_final_p2 = conditional_final_p2(result, ReadoutClass::E12);
  s.e11_final_p2 = conditional_final_p2(result, ReadoutClass::E11);
  s.effective_sample_size = result.effective_sample_size();
  return s;
}

std::string format_summary(const EnsembleResult& result, const EnsembleSummary& s,
                           const std::vector<std::string>& manifest) {
  std::ostringstream os;
  write_comment_header(os, manifest);
  const MeasurementConfig& m = result.config;
  const ReadoutProcess& p = result.process;
  os << "records: " << result.records.size() << '\n';
  os << "estimator: " << to_string(result.options.estimator) << '\n';
  os << "total_weight: " << format_number(result.total_weight) << '\n';
  os << "effective_sample_size: " << format_number(s.effective_sample_size) << '\n';
  os << "resampling_events: " << result.resampling_events << '\n';
  os << "kappa: " << format_number(m.kappa) << '\n';
  os << "tlr_ratio: " << format_number(m.tlr_ratio()) << '\n';
  os << "prior: ornstein-uhlenbeck\n";
  os << "prior_mean: " << format_number(p.mean) << '\n';
  os << "prior_stddev: " << format_number(p.stddev) << '\n';
  os << "prior_correlation_time: " << format_number(p.correlation_time) << '\n';
  os << "prior_lower: " << format_number(p.lower) << '\n';
  os << "prior_upper: " << format_number(p.upper) << '\n';
  os << "smoothing_window: " << format_number(result.options.smoothing_window) << '\n';
  os << "bootstrap_resamples: " << result.options.bootstrap_resamples << '\n';
  os << "transition_probability: " << format_number(s.transition) << '\n';
  os << "transition_probability_error: " << format_number(s.errors.transition) << '\n';
  os << "final_p2_given_E12: " << opt(s.e12_final_p2) << '\n';
  os << "final_p2_given_E11: " << opt(s.e11_final_p2) << '\n';
  if (s.e12_final_p2 && s.e11_final_p2) {
    os << "reliability_gap: " << format_number(*s.e12_final_p2 - *s.e11_final_p2) << '\n';
  } else {
    os << "reliability_gap: nan\n";
  }
  os << "\n[class_probabilities]\nclass,probability,bootstrap_error\n";
  for (std::size_t c = 0; c < kClassCount; ++c) {
    os << to_string(static_cast<ReadoutClass>(c)) << ',' << format_number(s.classes[c]) << ','
       << format_number(s.errors.class_probabilities[c]) << '\n';
  }
  return os.str();
}

std::vector<fs::path> write_ensemble_outputs(const fs::path& dir, const EnsembleResult& result,
                                             const RunManifest& manifest, std::size_t t_bins,
                                             std::size_t y_bins) {
  std::vector<fs::path> written;
  const std::vector<std::string> header = manifest.lines();
  const EnsembleSummary summary = summarize(result);

  {
    const fs::path path = dir / "summary.txt";
    auto out = open_output(path);
    out << format_summary(result, summary, header);
    written.push_back(path);
  }
  {
    const fs::path path = dir / "records.csv";
    auto out = open_output(path);
    CsvTable table;
    table.comments = with(header, {"class_code: 0=E11 1=E12 2=E21 3=E22"});
    table.columns = {"index", "class_code", "weight", "probability", "log_probability",
                     "final_p2", "e_start_smoothed", "e_end_smoothed"};
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const auto& r = result.records[i];
      table.rows.push_back({static_cast<double>(i), static_cast<double>(static_cast<int>(r.cls)),
                            r.weight, r.probability, r.log_probability, r.final_p2(),
                            r.smoothed.values.front(), r.smoothed.values.back()});
    }
    write_csv(out, table);
    written.push_back(path);
  }
  {
    const fs::path path = dir / "mean_population.csv";
    auto out = open_output(path);
    CsvTable table;
    table.comments = header;
    table.columns = {"t", "mean_p2"};
    const auto mean = mean_population(result);
    const TimeGrid grid = result.config.grid();
    for (std::size_t k = 0; k < mean.size(); ++k) table.rows.push_back({grid.at(k), mean[k]});
    write_csv(out, table);
    written.push_back(path);
  }

  struct Panel {
    const char* name;
    std::optional<ReadoutClass> filter;
  };
  const Panel panels[] = {{"all", std::nullopt}, {"E12", ReadoutClass::E12}, {"E11", ReadoutClass::E11}};
  for (const auto& panel : panels) {
    for (DensityField field : {DensityField::Readout, DensityField::Population}) {
      const DensityGrid g = density_grid(result, field, t_bins, y_bins, panel.filter);
      const std::string stem = std::string("grid_") + panel.name + "_" + std::string(to_string(field));
      const auto grid_header = with(header, {
          "panel: " + std::string(panel.name),
          "field: " + std::string(to_string(field)),
          "t_range: " + format_number(g.t_edges.front()) + " " + format_number(g.t_edges.back()),
          "y_range: " + format_number(g.y_edges.front()) + " " + format_number(g.y_edges.back()),
          "bins: " + std::to_string(y_bins) + " rows (y ascending) x " + std::to_string(t_bins) + " columns (t)",
          "panel_weight: " + format_number(g.total_weight),
      });
      {
        const fs::path path = dir / (stem + ".csv");
        auto out = open_output(path);
        write_matrix_csv(out, g.mass, with(grid_header, {"values: raw weight mass"}));
        written.push_back(path);
      }
      const Matrix norm = g.column_normalized();
      {
        const fs::path path = dir / (stem + "_colnorm.csv");
        auto out = open_output(path);
        write_matrix_csv(out, norm, with(grid_header, {"values: column max normalized"}));
        written.push_back(path);
      }
      {
        const fs::path path = dir / (stem + ".pgm");
        auto out = open_output(path, true);
        write_pgm(out, flipped(norm), 1.0,
                  with(grid_header, {"image: column max normalized, y increases upward"}));
        written.push_back(path);
      }
    }
  }
  return written;
}

void write_scan_table(const fs::path& path, std::span<const ScanRow> rows, const RunManifest& manifest) {
  auto out = open_output(path);
  CsvTable table;
  table.comments = with(manifest.lines(), {
      "tlr: level resolution time in units of T_R (inf = no measurement)",
      "tlr_ratio: 4 pi T_lr / T_R; transition: weighted mean final P2; *_err: bootstrap stddev"});
  table.columns = {"tlr",     "tlr_ratio", "transition", "transition_err", "p_E11", "p_E12",
                   "p_E21",   "p_E22",     "err_E11",    "err_E12",        "err_E21", "err_E22",
                   "ess"};
  for (const auto& r : rows) {
    table.rows.push_back({r.level_resolution_time, r.tlr_ratio, r.transition, r.transition_error,
                          r.classes[0], r.classes[1], r.classes[2], r.classes[3], r.class_errors[0],
                          r.class_errors[1], r.class_errors[2], r.class_errors[3],
                          r.effective_sample_size});
  }
  write_csv(out, table);
}

std::string format_cross_check(const CrossCheck& cc) {
  std::ostringstream os;
  const EventModel& m = cc.events.model;
  double arrivals = 0.0, deflections = 0.0, defect = 0.0;
  for (const auto& tr : cc.events.trajectories) {
    for (auto a : tr.arrivals) arrivals += a;
    for (auto d : tr.deflections) deflections += d;
    defect = std::max(defect, tr.max_norm_defect);
  }
  const double n = static_cast<double>(cc.events.trajectories.size());
  os << "trajectories: " << cc.events.trajectories.size() << '\n';
  os << "time_unit_seconds: " << format_number(cc.time_unit_seconds) << '\n';
  os << "tlr_ratio: " << format_number(cc.rpi.config.tlr_ratio()) << '\n';
  os << "sigma0_over_q: " << format_number(m.sigma0_over_q()) << '\n';
  os << "delta_d_over_d0: " << format_number(m.dipoles.delta_d / m.dipoles.d0) << '\n';
  os << "arrival_rate_per_unit_time: " << format_number(m.arrival_rate) << '\n';
  os << "mean_arrivals_per_trajectory: " << format_number(arrivals / n) << '\n';
  os << "mean_deflections_per_trajectory: " << format_number(deflections / n) << '\n';
  os << "max_norm_defect: " << format_number(defect) << '\n';
  os << "event_final_mean_p2: " << format_number(cc.event_mean.back()) << '\n';
  os << "rpi_final_mean_p2: " << format_number(cc.rpi_mean.back()) << '\n';
  os << "rms_mean_p2: " << format_number(cc.rms) << '\n';
  os << "ks_final_p2: " << format_number(cc.ks) << '\n';
  return os.str();
}

std::vector<fs::path> write_cross_check_outputs(const fs::path& dir, const CrossCheck& cc,
                                                const RunManifest& manifest, double window,
                                                std::uint64_t n_min, std::size_t logged) {
  std::vector<fs::path> written;
  const auto header = manifest.lines();
  const TimeGrid grid = cc.rpi.config.grid();
  {
    const fs::path path = dir / "comparison.csv";
    auto out = open_output(path);
    CsvTable table;
    table.comments = header;
    table.columns = {"t", "event_mean_p2", "rpi_mean_p2", "difference"};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      table.rows.push_back({grid.at(k), cc.event_mean[k], cc.rpi_mean[k], cc.event_mean[k] - cc.rpi_mean[k]});
    }
    write_csv(out, table);
    out << "# rms_mean_p2: " << format_number(cc.rms) << '\n';
    out << "# ks_final_p2: " << format_number(cc.ks) << '\n';
    written.push_back(path);
  }
  {
    const fs::path path = dir / "final_p2_events.csv";
    auto out = open_output(path);
    CsvTable table;
    table.comments = header;
    table.columns = {"trajectory", "final_p2"};
    const auto finals = cc.events.final_populations();
    for (std::size_t i = 0; i < finals.size(); ++i) table.rows.push_back({static_cast<double>(i), finals[i]});
    write_csv(out, table);
    written.push_back(path);
  }
  {
    const fs::path path = dir / "final_p2_rpi.csv";
    auto out = open_output(path);
    CsvTable table;
    table.comments = header;
    table.columns = {"record", "final_p2", "weight"};
    for (std::size_t i = 0; i < cc.rpi.records.size(); ++i) {
      table.rows.push_back({static_cast<double>(i), cc.rpi.records[i].final_p2(), cc.rpi.records[i].weight});
    }
    write_csv(out, table);
    written.push_back(path);
  }
  {
    const fs::path path = dir / "summary.txt";
    auto out = open_output(path);
    write_comment_header(out, header);
    out << format_cross_check(cc);
    written.push_back(path);
  }
  const std::size_t count = std::min(logged, cc.events.trajectories.size());
  for (std::size_t i = 0; i < count; ++i) {
    const EventTrajectory& tr = cc.events.trajectories[i];
    const std::string suffix = "_" + std::to_string(i) + ".csv";
    {
      const fs::path path = dir / ("events" + suffix);
      auto out = open_output(path);
      CsvTable table;
      table.comments = with(header, {"trajectory: " + std::to_string(i)});
      table.columns = {"t", "deflected", "p2_before", "p2_after"};
      for (const auto& e : tr.events) table.rows.push_back({e.t, e.deflected ? 1.0 : 0.0, e.p2_before, e.p2_after});
      write_csv(out, table);
      written.push_back(path);
    }
    const ReconstructedReadout rec = estimate_sigma(tr, cc.events.model, cc.rpi.config, window, n_min);
    {
      const fs::path path = dir / ("reconstruction" + suffix);
      auto out = open_output(path);
      CsvTable table;
      table.comments = with(header, {"trajectory: " + std::to_string(i),
                                     "window: " + format_number(rec.window),
                                     "n_min: " + std::to_string(n_min), "sigma_hat in metres"});
      table.columns = {"t", "N", "N1", "sigma_hat", "e_hat", "valid", "p2"};
      for (std::size_t k = 0; k < rec.samples.size(); ++k) {
        const auto& s = rec.samples[k];
        table.rows.push_back({s.t, static_cast<double>(s.n), static_cast<double>(s.n1),
                              units::length_cgs_to_si(s.sigma_hat), s.e_hat, s.valid ? 1.0 : 0.0, tr.populations[k]});
      }
      write_csv(out, table);
      written.push_back(path);
    }
    if (cc.events.model.dipoles.chi != 0.0) {
      const fs::path path = dir / ("readout" + suffix);
      auto out = open_output(path);
      const ReadoutSamples samples =
          energy_readout_from_events(rec, cc.events.model, cc.rpi.config.e1, cc.rpi.config.e2);
      write_curve_csv(out, samples, with(header, {"trajectory: " + std::to_string(i),
                                                  "reconstructed energy readout (valid windows only)"}));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace fuzzwatch
