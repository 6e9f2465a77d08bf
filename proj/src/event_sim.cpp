#include "fuzzwatch/event_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/parallel.hpp"
#include "fuzzwatch/random.hpp"
#include "fuzzwatch/stats.hpp"

namespace fuzzwatch {

double EventModel::deflection_probability(double p2) const {
  return sigma_of_state(dipoles, p2).sigma / slit_q;
}

double matched_time_unit(const ScatteringSetup& setup, const MeasurementConfig& config) {
  if (!(config.kappa > 0.0)) throw ConfigError("matching needs kappa > 0 in the run config");
  const DipoleDerived derived = derived_dipoles(setup);
  const Flux flux = scattered_flux(setup, derived.sigma0);
  const double tlr_seconds = level_resolution_time(setup, derived, flux.g);
  return tlr_seconds / config.level_resolution_time();
}

EventModel make_event_model(const ScatteringSetup& setup, double time_unit_seconds) {
  if (!(time_unit_seconds > 0.0)) throw ConfigError("time unit must be positive");
  EventModel model;
  model.dipoles = derived_dipoles(setup);
  model.slit_q = setup.slit_q;
  if (model.dipoles.sigma0 + std::abs(model.dipoles.chi) >= setup.slit_q) {
    throw ConfigError("sigma0 + |chi| must be smaller than slit_q");
  }
  model.arrival_rate = scattered_flux(setup, model.dipoles.sigma0).incoming * time_unit_seconds;
  return model;
}

AtomState deflection_update(const AtomState& state, const DipoleDerived& derived) {
  const double p2 = std::norm(state.c2) / state.norm_squared();
  const double d = std::sqrt(dipole_squared(derived, p2));
  return {state.c1 * ((derived.d0 - derived.delta_d) / d),
          state.c2 * ((derived.d0 + derived.delta_d) / d), state.t};
}

std::array<double, 2> no_deflection_factors(const DipoleDerived& derived, double sigma, double q) {
  if (!(sigma < q)) throw ConfigError("no-deflection update needs sigma < q");
  // sigma / d^2 is state independent.
  const double per_d2 = derived.sigma0 / (derived.d0 * derived.d0 + derived.delta_d * derived.delta_d);
  const double d_sq = sigma / per_d2;
  const double lo = derived.d0 - derived.delta_d;
  const double hi = derived.d0 + derived.delta_d;
  const double denom = std::sqrt(1.0 - sigma / q);
  return {(1.0 - sigma * lo * lo / (2.0 * q * d_sq)) / denom,
          (1.0 - sigma * hi * hi / (2.0 * q * d_sq)) / denom};
}

AtomState no_deflection_update(const AtomState& state, const DipoleDerived& derived, double sigma,
                               double q) {
  const auto a = no_deflection_factors(derived, sigma, q);
  const AtomState raw{state.c1 * a[0], state.c2 * a[1], state.t};
  return raw.normalized();
}

void rabi_rotate(std::array<complex, 2>& c, double theta) {
  const double cs = std::cos(theta), sn = std::sin(theta);
  const complex minus_i_sin{0.0, -sn};
  const complex c1 = cs * c[0] + minus_i_sin * c[1];
  const complex c2 = minus_i_sin * c[0] + cs * c[1];
  c = {c1, c2};
}

EventTrajectory run_event_trajectory(const MeasurementConfig& config, const EventModel& model,
                                     std::uint64_t seed, std::uint64_t stream, bool record_events) {
  if (!(model.arrival_rate >= 0.0) || !std::isfinite(model.arrival_rate)) {
    throw ConfigError("arrival rate must be finite and non-negative");
  }
  const TimeGrid grid = config.grid();
  const DipoleDerived& dip = model.dipoles;
  // Deflection probability is affine in p2; both update operators are constant diagonals up to
  // normalization.
  const double p_level1 = model.deflection_probability(0.0);
  const double p_level2 = model.deflection_probability(1.0);
  const double defl1 = dip.d0 - dip.delta_d;
  const double defl2 = dip.d0 + dip.delta_d;
  const auto keep = no_deflection_factors(dip, dip.sigma0, model.slit_q);

  RandomStream rng(seed, stream);
  std::exponential_distribution<double> gap(model.arrival_rate > 0.0 ? model.arrival_rate : 1.0);
  const auto next_gap = [&] {
    return model.arrival_rate > 0.0 ? gap(rng.engine) : std::numeric_limits<double>::infinity();
  };

  EventTrajectory out;
  out.grid = grid;
  out.populations.resize(grid.size());
  out.arrivals.assign(grid.intervals, 0);
  out.deflections.assign(grid.intervals, 0);

  const AtomState start = config.initial_state.normalized();
  std::array<complex, 2> c{start.c1, start.c2};
  out.populations[0] = std::norm(c[1]);

  const double ps = config.pulse_start, pe = config.pulse_end;
  const auto evolve_free = [&](double ta, double tb) {
    const double overlap = std::min(tb, pe) - std::max(ta, ps);
    if (overlap > 0.0) rabi_rotate(c, config.v0 * overlap);
  };

  double t = grid.start;
  double next = t + next_gap();
  for (std::size_t k = 0; k < grid.intervals; ++k) {
    const double tb = grid.at(k + 1);
    while (next < tb) {
      evolve_free(t, next);
      t = next;
      const double p2 = std::norm(c[1]);
      const double p = p_level1 + (p_level2 - p_level1) * p2;
      const bool deflected = rng.unit() < p;
      if (deflected) {
        c[0] *= defl1;
        c[1] *= defl2;
        ++out.deflections[k];
      } else {
        c[0] *= keep[0];
        c[1] *= keep[1];
      }
      ++out.arrivals[k];
      const double norm = std::norm(c[0]) + std::norm(c[1]);
      const double s = 1.0 / std::sqrt(norm);
      c[0] *= s;
      c[1] *= s;
      const double defect = std::abs(std::norm(c[0]) + std::norm(c[1]) - 1.0);
      out.max_norm_defect = std::max(out.max_norm_defect, defect);
      if (record_events) out.events.push_back({t, deflected, p2, std::norm(c[1])});
      next = t + next_gap();
    }
    evolve_free(t, tb);
    t = tb;
    out.populations[k + 1] = std::norm(c[1]);
  }
  out.final_state = {c[0], c[1], t};
  return out;
}

std::vector<double> EventEnsemble::mean_population() const {
  if (trajectories.empty()) throw UsageError("empty event ensemble");
  const std::size_t m = trajectories.front().populations.size();
  std::vector<CompensatedSum> sums(m);
  for (const auto& tr : trajectories) {
    for (std::size_t k = 0; k < m; ++k) sums[k].add(tr.populations[k]);
  }
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = sums[k].value() / static_cast<double>(trajectories.size());
  return out;
}

std::vector<double> EventEnsemble::final_populations() const {
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& tr : trajectories) out.push_back(tr.populations.back());
  return out;
}

EventEnsemble run_event_ensemble(const MeasurementConfig& config, const EventModel& model,
                                 std::size_t n, std::uint64_t seed, unsigned threads,
                                 std::size_t logged) {
  if (n < 1) throw UsageError("event ensemble size must be at least 1");
  (void)config.validate();
  EventEnsemble ens;
  ens.config = config;
  ens.model = model;
  ens.seed = seed;
  ens.trajectories.resize(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    ens.trajectories[i] = run_event_trajectory(config, model, seed, i, i < logged);
  });
  return ens;
}

ReconstructedReadout estimate_sigma(const EventTrajectory& trajectory, const EventModel& model,
                                    const MeasurementConfig& config, double window,
                                    std::uint64_t n_min) {
  if (!(window > 0.0)) throw UsageError("reconstruction window must be positive");
  const TimeGrid& grid = trajectory.grid;
  const std::size_t intervals = grid.intervals;
  const auto half = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.5 * window / grid.step)));
  std::vector<std::uint64_t> cum_n(intervals + 1, 0), cum_n1(intervals + 1, 0);
  for (std::size_t j = 0; j < intervals; ++j) {
    cum_n[j + 1] = cum_n[j] + trajectory.arrivals[j];
    cum_n1[j + 1] = cum_n1[j] + trajectory.deflections[j];
  }
  const double e_mid = config.mid_energy();
  const double gap = config.level_gap();
  const double chi = model.dipoles.chi;

  ReconstructedReadout out;
  out.window = 2.0 * static_cast<double>(half) * grid.step;
  out.samples.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(intervals, k + half);
    ReconstructedSample s;
    s.t = grid.at(k);
    s.n = cum_n[hi] - cum_n[lo];
    s.n1 = cum_n1[hi] - cum_n1[lo];
    s.valid = s.n >= n_min && s.n > 0;
    if (s.n > 0) {
      const double ratio = static_cast<double>(s.n1) / static_cast<double>(s.n);
      s.sigma_hat = model.slit_q * ratio;
      s.e_hat = chi != 0.0 ? e_mid + gap * model.slit_q / (2.0 * chi) * (ratio - model.sigma0_over_q())
                           : std::numeric_limits<double>::quiet_NaN();
    } else {
      s.sigma_hat = std::numeric_limits<double>::quiet_NaN();
      s.e_hat = std::numeric_limits<double>::quiet_NaN();
    }
    if (!s.valid) s.e_hat = std::numeric_limits<double>::quiet_NaN();
    out.samples.push_back(s);
  }
  return out;
}

ReadoutSamples energy_readout_from_events(const ReconstructedReadout& readout,
                                          const EventModel& model, double e1, double e2) {
  if (model.dipoles.chi == 0.0) {
    throw DegenerateMeasurementError("chi = 0: scattering carries no level information");
  }
  ReadoutSamples out;
  const double e_mid = 0.5 * (e1 + e2);
  const double gap = e2 - e1;
  for (const auto& s : readout.samples) {
    if (!s.valid) continue;
    const double ratio = static_cast<double>(s.n1) / static_cast<double>(s.n);
    out.times.push_back(s.t);
    out.values.push_back(e_mid + gap * model.slit_q / (2.0 * model.dipoles.chi) *
                                     (ratio - model.sigma0_over_q()));
  }
  return out;
}

}  // namespace fuzzwatch
