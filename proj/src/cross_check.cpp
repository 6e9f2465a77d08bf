#include "fuzzwatch/cross_check.hpp"

#include <limits>

#include "fuzzwatch/stats.hpp"

namespace fuzzwatch {

std::uint64_t event_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

CrossCheck run_cross_check(const MeasurementConfig& config, const ReadoutProcess& process,
                           const EnsembleOptions& options, const ScatteringSetup& setup,
                           std::size_t n, std::uint64_t seed, std::size_t logged,
                           double time_unit_seconds) {
  CrossCheck cc;
  MeasurementConfig matched = config;
  if (time_unit_seconds > 0.0) {
    cc.time_unit_seconds = time_unit_seconds;
    const DipoleDerived derived = derived_dipoles(setup);
    if (derived.delta_d == 0.0) {
      matched.set_level_resolution_time(std::numeric_limits<double>::infinity());
    } else {
      const Flux flux = scattered_flux(setup, derived.sigma0);
      matched.set_level_resolution_time(level_resolution_time(setup, derived, flux.g) /
                                        time_unit_seconds);
    }
  } else {
    cc.time_unit_seconds = matched_time_unit(setup, config);
  }
  const EventModel model = make_event_model(setup, cc.time_unit_seconds);
  cc.events = run_event_ensemble(matched, model, n, event_seed(seed), options.threads, logged);
  cc.rpi = run_ensemble(matched, process, n, seed, options);
  cc.event_mean = cc.events.mean_population();
  cc.rpi_mean = mean_population(cc.rpi);
  cc.rms = rms_difference(cc.event_mean, cc.rpi_mean);
  const auto [values, weights] = final_populations(cc.rpi);
  cc.ks = ks_distance(values, weights, cc.events.final_populations());
  return cc;
}

}  // namespace fuzzwatch
