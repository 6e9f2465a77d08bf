#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fuzzwatch/dynamics.hpp"
#include "fuzzwatch/readout.hpp"

namespace fwtest {

/// Default problem with 4 pi T_lr / T_R = ratio.
inline fuzzwatch::MeasurementConfig config_with_ratio(double ratio) {
  fuzzwatch::MeasurementConfig c;
  c.set_tlr_ratio(ratio);
  return c;
}

/// Zero-length pulse: v = 0 everywhere.
inline fuzzwatch::MeasurementConfig undriven(double kappa) {
  fuzzwatch::MeasurementConfig c;
  c.pulse_start = c.pulse_end = 0.0;
  c.kappa = kappa;
  return c;
}

inline fuzzwatch::ReadoutCurve random_readout(const fuzzwatch::MeasurementConfig& c, std::uint64_t seed) {
  fuzzwatch::RandomStream rng(seed, 0);
  return fuzzwatch::sample_readout(fuzzwatch::ReadoutProcess::defaults_for(c), c.grid(), rng);
}

}  // namespace fwtest
