#include "fuzzwatch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/readout.hpp"

namespace fuzzwatch {

namespace {

using Pair = std::array<complex, 2>;

// Largest rate * h of one RK4 sub-step.
constexpr double kMaxStepRate = 0.05;

inline Pair twolevel_rhs(const Pair& c, double v, double damp1, double damp2) {
  const complex minus_i{0.0, -1.0};
  return {minus_i * v * c[1] - damp1 * c[0], minus_i * v * c[0] - damp2 * c[1]};
}

inline Pair axpy(const Pair& c, double h, const Pair& k) {
  return {c[0] + h * k[0], c[1] + h * k[1]};
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

AtomState AtomState::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0.0)) throw IntegrationError("cannot normalize a zero state");
  return {c1 / n, c2 / n, t};
}

double AtomState::excited_population() const {
  const double n = norm_squared();
  if (!(n > 0.0)) throw IntegrationError("cannot normalize a zero state");
  return std::norm(c2) / n;
}

TimeGrid TimeGrid::spanning(double t1, double t2, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive and finite");
  if (!(t2 > t1)) throw ConfigError("t2 must be greater than t1");
  const double ratio = (t2 - t1) / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("dt = " + format_double(dt) + " does not divide [t1, t2] = [" +
                      format_double(t1) + ", " + format_double(t2) + "] into whole steps");
  }
  TimeGrid g;
  g.start = t1;
  g.intervals = static_cast<std::size_t>(rounded);
  g.step = (t2 - t1) / rounded;
  return g;
}

bool TimeGrid::same_as(const TimeGrid& other) const {
  const double tol = 1e-12 * std::max({1.0, std::abs(start), std::abs(end())});
  return intervals == other.intervals && std::abs(start - other.start) <= tol &&
         std::abs(step - other.step) <= 1e-12 * std::max(1.0, step);
}

double MeasurementConfig::rabi_period() const { return std::numbers::pi / v0; }

double MeasurementConfig::level_resolution_time() const {
  if (kappa == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (kappa * level_gap() * level_gap());
}

double MeasurementConfig::tlr_ratio() const {
  return 4.0 * std::numbers::pi * level_resolution_time() / rabi_period();
}

void MeasurementConfig::set_level_resolution_time(double tlr) {
  if (std::isinf(tlr) && tlr > 0) {
    kappa = 0.0;
    return;
  }
  if (!(tlr > 0.0)) throw ConfigError("level resolution time must be positive");
  kappa = 1.0 / (tlr * level_gap() * level_gap());
}

void MeasurementConfig::set_tlr_ratio(double ratio) {
  if (std::isinf(ratio) && ratio > 0) {
    kappa = 0.0;
    return;
  }
  if (!(ratio > 0.0)) throw ConfigError("tlr_ratio must be positive");
  set_level_resolution_time(ratio * rabi_period() / (4.0 * std::numbers::pi));
}

std::vector<std::string> MeasurementConfig::validate() const {
  std::vector<std::string> warnings;
  const auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(e1) && finite(e2) && finite(v0) && finite(pulse_start) && finite(pulse_end) &&
        finite(t1) && finite(t2) && finite(kappa) && finite(dt))) {
    throw ConfigError("measurement parameters must be finite");
  }
  if (!(e2 > e1)) throw ConfigError("e2 must be greater than e1");
  if (!(v0 > 0.0)) throw ConfigError("v0 must be positive (T_R = pi / v0)");
  if (kappa < 0.0) throw ConfigError("kappa must be non-negative");
  if (!(t1 <= pulse_start && pulse_start <= pulse_end && pulse_end <= t2)) {
    throw ConfigError("require t1 <= pulse_start <= pulse_end <= t2");
  }
  if (dt > rabi_period() / 200.0 * (1.0 + 1e-12)) {
    throw ConfigError("dt = " + format_double(dt) + " exceeds T_R/200 = " +
                      format_double(rabi_period() / 200.0));
  }
  (void)grid();
  if (!(initial_state.norm_squared() > 0.0) || !std::isfinite(initial_state.norm_squared())) {
    throw ConfigError("initial state must have a positive finite norm");
  }
  const double half_period = 0.5 * rabi_period();
  if (std::abs(pulse_duration() - half_period) > 1e-9 * half_period) {
    warnings.push_back("pulse length " + format_double(pulse_duration()) +
                       " is not a pi-pulse (T_R/2 = " + format_double(half_period) + ")");
  }
  if (t1 > 0.0 || t2 < pulse_end) {
    warnings.push_back("observation window does not contain the pulse");
  }
  return warnings;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    }
  }
  return true;
}

std::vector<complex> rpi_rhs_general(std::span<const complex> psi, std::span<const double> h0_diag,
                                     const ComplexMatrix& v, double kappa, double e_readout) {
  const std::size_t n = psi.size();
  if (h0_diag.size() != n || v.n != n) {
    throw ConfigError("rpi_rhs_general: dimension mismatch (psi " + std::to_string(n) + ", H0 " +
                      std::to_string(h0_diag.size()) + ", V " + std::to_string(v.n) + ")");
  }
  if (!v.is_hermitian()) throw ConfigError("rpi_rhs_general: V must be Hermitian");
  const complex minus_i{0.0, -1.0};
  std::vector<complex> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    complex hv = h0_diag[i] * psi[i];
    for (std::size_t j = 0; j < n; ++j) hv += v(i, j) * psi[j];
    const double offset = h0_diag[i] - e_readout;
    out[i] = minus_i * hv - kappa * offset * offset * psi[i];
  }
  return out;
}

std::array<complex, 2> rpi_rhs_twolevel(const AtomState& state, const MeasurementConfig& config,
                                        double t, double e_readout) {
  const double d1 = config.e1 - e_readout;
  const double d2 = config.e2 - e_readout;
  return twolevel_rhs({state.c1, state.c2}, config.drive(t), config.kappa * d1 * d1,
                      config.kappa * d2 * d2);
}

void advance_interval(std::array<complex, 2>& c, const MeasurementConfig& config, double ta,
                      double tb, double ea, double eb) {
  const double span = tb - ta;
  if (!(span > 0.0)) return;

  // Split at pulse edges; v is constant on each piece.
  double cuts[4] = {ta, 0.0, 0.0, tb};
  std::size_t ncuts = 1;
  for (double edge : {config.pulse_start, config.pulse_end}) {
    if (edge > ta && edge < tb) cuts[ncuts++] = edge;
  }
  if (ncuts == 3 && cuts[1] > cuts[2]) std::swap(cuts[1], cuts[2]);
  cuts[ncuts] = tb;

  const double slope = (eb - ea) / span;
  const auto readout = [&](double t) { return ea + slope * (t - ta); };
  const auto damping = [&](double level, double e) {
    const double d = level - e;
    return config.kappa * d * d;
  };

  for (std::size_t piece = 0; piece < ncuts; ++piece) {
    const double sa = cuts[piece];
    const double sb = cuts[piece + 1];
    if (!(sb > sa)) continue;
    const double v = config.drive(0.5 * (sa + sb));
    // The readout is linear on the piece, so the damping peaks at an end point.
    const double rate = v + std::max({damping(config.e1, readout(sa)), damping(config.e1, readout(sb)),
                                      damping(config.e2, readout(sa)), damping(config.e2, readout(sb))}) +
                        std::abs(slope) * std::sqrt(2.0 * config.kappa);
    const auto steps =
        static_cast<std::size_t>(std::max(1.0, std::ceil((sb - sa) * rate / kMaxStepRate)));
    const double h = (sb - sa) / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s) {
      const double t0 = sa + h * static_cast<double>(s);
      const double tm = t0 + 0.5 * h;
      const double t1 = t0 + h;
      const double e0 = readout(t0), em = readout(tm), e1 = readout(t1);
      const double a0 = damping(config.e1, e0), b0 = damping(config.e2, e0);
      const double am = damping(config.e1, em), bm = damping(config.e2, em);
      const double a1 = damping(config.e1, e1), b1 = damping(config.e2, e1);
      const Pair k1 = twolevel_rhs(c, v, a0, b0);
      const Pair k2 = twolevel_rhs(axpy(c, 0.5 * h, k1), v, am, bm);
      const Pair k3 = twolevel_rhs(axpy(c, 0.5 * h, k2), v, am, bm);
      const Pair k4 = twolevel_rhs(axpy(c, h, k3), v, a1, b1);
      for (int i = 0; i < 2; ++i) c[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
}

Trajectory evolve(const MeasurementConfig& config, const ReadoutCurve& readout) {
  const TimeGrid grid = config.grid();
  if (!grid.same_as(readout.grid) || readout.values.size() != grid.size()) {
    throw ConfigError("readout grid does not match the configuration grid");
  }
  Trajectory traj;
  traj.grid = grid;
  traj.amplitudes.reserve(grid.size());
  traj.norms.reserve(grid.size());
  traj.populations.reserve(grid.size());

  // The state is carried normalized; `log_scale` holds log of the true squared norm.
  std::array<complex, 2> c{config.initial_state.c1, config.initial_state.c2};
  double log_scale = 0.0;
  const auto record = [&](std::size_t k) {
    const double n = std::norm(c[0]) + std::norm(c[1]);
    if (!std::isfinite(n) || !(n > 0.0)) {
      throw IntegrationError("integration failed at t = " + format_double(grid.at(k)));
    }
    log_scale += std::log(n);
    const double s = std::sqrt(n);
    c[0] /= s;
    c[1] /= s;
    const double amplitude = std::exp(0.5 * log_scale);
    traj.amplitudes.push_back({c[0] * amplitude, c[1] * amplitude, grid.at(k)});
    traj.norms.push_back(std::exp(log_scale));
    traj.populations.push_back(std::norm(c[1]));
  };

  record(0);
  for (std::size_t k = 0; k < grid.intervals; ++k) {
    advance_interval(c, config, grid.at(k), grid.at(k + 1), readout.values[k],
                     readout.values[k + 1]);
    record(k + 1);
  }
  traj.log_final_norm = log_scale;
  return traj;
}

double readout_probability(const Trajectory& trajectory) {
  if (trajectory.norms.empty()) throw UsageError("empty trajectory");
  return trajectory.norms.back();
}

double log_readout_probability(const Trajectory& trajectory) {
  if (trajectory.norms.empty()) throw UsageError("empty trajectory");
  return trajectory.log_final_norm;
}

std::vector<std::vector<complex>> evolve_lab_frame(const LabFrameProblem& problem,
                                                   std::vector<complex> psi,
                                                   const ReadoutCurve& readout,
                                                   std::size_t substeps) {
  if (!problem.drive) throw ConfigError("lab-frame problem has no drive");
  if (psi.size() != problem.h0_diag.size()) throw ConfigError("initial state dimension mismatch");
  substeps = std::max<std::size_t>(1, substeps);
  const TimeGrid& grid = readout.grid;
  const std::size_t n = psi.size();
  std::vector<std::vector<complex>> out;
  out.reserve(grid.size());
  out.push_back(psi);

  // Stage times are clamped a relative 1e-9 inside the sub-step.
  double lo = 0.0, hi = 0.0;
  const auto rhs = [&](const std::vector<complex>& y, double t, double e) {
    const double td = std::clamp(t, lo, hi);
    return rpi_rhs_general(y, problem.h0_diag, problem.drive(td), problem.kappa, e);
  };
  const auto shifted = [n](const std::vector<complex>& y, double h, const std::vector<complex>& k) {
    std::vector<complex> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] + h * k[i];
    return r;
  };

  for (std::size_t k = 0; k < grid.intervals; ++k) {
    const double ta = grid.at(k);
    const double ea = readout.values[k];
    const double slope = (readout.values[k + 1] - ea) / grid.step;
    const double h = grid.step / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
      const double t0 = ta + h * static_cast<double>(s);
      lo = t0 + 1e-9 * h;
      hi = t0 + h - 1e-9 * h;
      const auto e = [&](double t) { return ea + slope * (t - ta); };
      const auto k1 = rhs(psi, t0, e(t0));
      const auto k2 = rhs(shifted(psi, 0.5 * h, k1), t0 + 0.5 * h, e(t0 + 0.5 * h));
      const auto k3 = rhs(shifted(psi, 0.5 * h, k2), t0 + 0.5 * h, e(t0 + 0.5 * h));
      const auto k4 = rhs(shifted(psi, h, k3), t0 + h, e(t0 + h));
      for (std::size_t i = 0; i < n; ++i) {
        psi[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    out.push_back(psi);
  }
  return out;
}

}  // namespace fuzzwatch
