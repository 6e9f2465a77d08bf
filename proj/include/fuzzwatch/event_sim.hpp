#pragma once

// Discrete-event Monte Carlo of the scattering experiment: Poisson electron arrivals,
// deflection decisions and the back-action on the atom.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/readout.hpp"
#include "fuzzwatch/scattering.hpp"

namespace fuzzwatch {

/// Per-arrival parameters in dynamics time units.
struct EventModel {
  DipoleDerived dipoles;
  double slit_q = 0.0;  // cm
  /// Electron arrivals per unit dynamics time (g q times the time unit).
  double arrival_rate = 0.0;

  double sigma0_over_q() const { return dipoles.sigma0 / slit_q; }
  /// sigma(p2) / q.
  double deflection_probability(double p2) const;
};

/// Seconds per dynamics time unit such that T_lr of the setup equals the config's T_lr.
/// Throws InfiniteFuzzinessError when delta_d = 0 and ConfigError when kappa = 0.
double matched_time_unit(const ScatteringSetup& setup, const MeasurementConfig& config);

/// Arrival rate g q (from the flux formula) expressed per dynamics time unit.
EventModel make_event_model(const ScatteringSetup& setup, double time_unit_seconds);

/// c_n -> a_n c_n with a_1 = (d0 - dd)/d, a_2 = (d0 + dd)/d; exactly normalized for a
/// normalized input.
AtomState deflection_update(const AtomState& state, const DipoleDerived& derived);

/// Factors (a_1, a_2) of the first-order no-deflection operator before renormalization.
std::array<double, 2> no_deflection_factors(const DipoleDerived& derived, double sigma, double q);

/// Applies no_deflection_factors and renormalizes. Throws ConfigError if sigma >= q.
AtomState no_deflection_update(const AtomState& state, const DipoleDerived& derived, double sigma,
                               double q);

/// Exact rotating-frame Rabi evolution exp(-i theta sigma_x) with theta = v0 * (time in pulse).
void rabi_rotate(std::array<complex, 2>& c, double theta);

struct ScatteringEvent {
  double t = 0.0;
  bool deflected = false;
  double p2_before = 0.0;
  double p2_after = 0.0;
};

struct EventTrajectory {
  TimeGrid grid;
  /// Normalized P2 at the grid points.
  std::vector<double> populations;
  /// Arrivals and deflections in each grid interval [t_k, t_k+1).
  std::vector<std::uint32_t> arrivals;
  std::vector<std::uint32_t> deflections;
  /// Full log; filled only when requested.
  std::vector<ScatteringEvent> events;
  AtomState final_state;
  /// Largest | |c1|^2 + |c2|^2 - 1 | seen right after an update.
  double max_norm_defect = 0.0;
};

/// Simulates one trajectory with stream `stream` of `seed`.
EventTrajectory run_event_trajectory(const MeasurementConfig& config, const EventModel& model,
                                     std::uint64_t seed, std::uint64_t stream = 0,
                                     bool record_events = false);

struct EventEnsemble {
  MeasurementConfig config;
  EventModel model;
  std::uint64_t seed = 0;
  std::vector<EventTrajectory> trajectories;

  std::vector<double> mean_population() const;
  std::vector<double> final_populations() const;
};

/// n independent trajectories; events are logged for the first `logged` ones.
EventEnsemble run_event_ensemble(const MeasurementConfig& config, const EventModel& model,
                                 std::size_t n, std::uint64_t seed, unsigned threads = 0,
                                 std::size_t logged = 0);

struct ReconstructedSample {
  double t = 0.0;
  std::uint64_t n = 0;
  std::uint64_t n1 = 0;
  double sigma_hat = 0.0;  // cm
  double e_hat = 0.0;      // energy units of the config
  bool valid = false;
};

struct ReconstructedReadout {
  double window = 0.0;
  std::vector<ReconstructedSample> samples;
};

/// Sliding centered window of duration W (rounded to whole grid intervals, truncated at the
/// ends) on the dynamics grid; sigma_hat = q N1 / N, invalid when N < n_min. e_hat uses the
/// config's levels and is NaN for invalid samples. Throws UsageError unless W > 0.
ReconstructedReadout estimate_sigma(const EventTrajectory& trajectory, const EventModel& model,
                                    const MeasurementConfig& config, double window,
                                    std::uint64_t n_min = 20);

/// Valid samples only: E = E-bar + Delta E (q / 2 chi)(N1/N - sigma0/q).
/// Throws DegenerateMeasurementError if chi = 0.
ReadoutSamples energy_readout_from_events(const ReconstructedReadout& readout,
                                          const EventModel& model, double e1, double e2);

}  // namespace fuzzwatch
