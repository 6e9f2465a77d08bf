#pragma once

// Output files of the command-line tool. Every file starts with the run manifest.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fuzzwatch/cross_check.hpp"
#include "fuzzwatch/ensemble.hpp"
#include "fuzzwatch/io.hpp"

namespace fuzzwatch {

struct EnsembleSummary {
  std::array<double, kClassCount> classes{};
  BootstrapErrors errors;
  double transition = 0.0;
  std::optional<double> e12_final_p2;
  std::optional<double> e11_final_p2;
  double effective_sample_size = 0.0;
};

EnsembleSummary summarize(const EnsembleResult& result);

/// "key: value" block followed by CSV blocks.
std::string format_summary(const EnsembleResult& result, const EnsembleSummary& summary,
                           const std::vector<std::string>& manifest);

/// Writes summary.txt, records.csv, mean_population.csv and the density grids
/// grid_{all,E12,E11}_{readout,population}.{csv,pgm} plus *_colnorm.csv into `dir`.
/// Returns the paths written.
std::vector<std::filesystem::path> write_ensemble_outputs(const std::filesystem::path& dir,
                                                          const EnsembleResult& result,
                                                          const RunManifest& manifest,
                                                          std::size_t t_bins, std::size_t y_bins);

void write_scan_table(const std::filesystem::path& path, std::span<const ScanRow> rows,
                      const RunManifest& manifest);

/// comparison.csv, final_p2_events.csv, final_p2_rpi.csv, summary.txt; with `logged` > 0 also events_<i>.csv,
/// reconstruction_<i>.csv and readout_<i>.csv for the logged trajectories.
std::vector<std::filesystem::path> write_cross_check_outputs(const std::filesystem::path& dir,
                                                             const CrossCheck& cc,
                                                             const RunManifest& manifest,
                                                             double window, std::uint64_t n_min,
                                                             std::size_t logged);

std::string format_cross_check(const CrossCheck& cc);

}  // namespace fuzzwatch
