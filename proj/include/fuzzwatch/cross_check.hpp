#pragma once

// Event simulation against the RPI ensemble at matched level resolution time.

#include <cstdint>
#include <vector>

#include "fuzzwatch/ensemble.hpp"
#include "fuzzwatch/event_sim.hpp"

namespace fuzzwatch {

struct CrossCheck {
  double time_unit_seconds = 0.0;
  EventEnsemble events;
  EnsembleResult rpi;
  std::vector<double> event_mean;
  std::vector<double> rpi_mean;
  /// RMS of the two mean P2(t) curves over the grid.
  double rms = 0.0;
  /// KS distance between the weighted RPI and the event final-P2 distributions.
  double ks = 0.0;
};

/// With time_unit_seconds <= 0 the unit is chosen by matched_time_unit. Otherwise the RPI
/// side uses the setup's T_lr in that unit (infinite when delta_d = 0). Both ensembles have
/// n members; the event ensemble uses a seed derived from `seed`.
CrossCheck run_cross_check(const MeasurementConfig& config, const ReadoutProcess& process,
                           const EnsembleOptions& options, const ScatteringSetup& setup,
                           std::size_t n, std::uint64_t seed, std::size_t logged = 0,
                           double time_unit_seconds = 0.0);

std::uint64_t event_seed(std::uint64_t seed);

}  // namespace fuzzwatch
