#pragma once

// Restricted-path-integral dynamics of a measured, driven atom.
//
// Units: hbar = 1. Defaults put Delta E = 1 and T_R = 1, so v0 = pi, the pi-pulse lasts
// T = 1/2 and kappa = 1/T_lr.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fuzzwatch {

using complex = std::complex<double>;

/// Amplitudes (C1, C2) at time t. Generally unnormalized: the squared norm is the weight of the
/// readout seen so far.
struct AtomState {
  complex c1{1.0, 0.0};
  complex c2{0.0, 0.0};
  double t = 0.0;

  double norm_squared() const { return std::norm(c1) + std::norm(c2); }
  AtomState normalized() const;
  /// |c2|^2 after normalization.
  double excited_population() const;
};

/// Uniform sampling of [start, start + intervals * step].
struct TimeGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t intervals = 0;

  std::size_t size() const { return intervals + 1; }
  double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
  double end() const { return at(intervals); }

  /// Grid with spacing `dt` covering [t1, t2] exactly; (t2 - t1) / dt must be an integer.
  static TimeGrid spanning(double t1, double t2, double dt);
  bool same_as(const TimeGrid& other) const;
};

/// Physical and numerical parameters of one measurement problem.
struct MeasurementConfig {
  double e1 = -0.5;
  double e2 = 0.5;
  double v0 = 3.14159265358979323846;
  double pulse_start = 0.0;
  double pulse_end = 0.5;
  double t1 = -0.25;
  double t2 = 0.75;
  double kappa = 0.0;
  double dt = 1.0 / 400.0;
  AtomState initial_state{};

  double level_gap() const { return e2 - e1; }
  double mid_energy() const { return 0.5 * (e1 + e2); }
  double rabi_period() const;
  double pulse_duration() const { return pulse_end - pulse_start; }
  /// 1 / (kappa * Delta E^2); +inf without measurement.
  double level_resolution_time() const;
  /// 4 pi T_lr / T_R, the dimensionless measurement regime; +inf without measurement.
  double tlr_ratio() const;
  void set_level_resolution_time(double tlr);
  void set_tlr_ratio(double ratio);

  /// Coupling v(t): v0 inside [pulse_start, pulse_end), zero outside.
  double drive(double t) const { return (t >= pulse_start && t < pulse_end) ? v0 : 0.0; }

  TimeGrid grid() const { return TimeGrid::spanning(t1, t2, dt); }

  /// Throws ConfigError on hard violations; returns human-readable warnings otherwise.
  std::vector<std::string> validate() const;
};

/// Integrated solution on the configuration grid.
struct Trajectory {
  TimeGrid grid;
  std::vector<AtomState> amplitudes;
  /// |C1|^2 + |C2|^2 at each grid point.
  std::vector<double> norms;
  /// Normalized |c2(t)|^2.
  std::vector<double> populations;
  /// log of the final norm; finite even when the norm underflows.
  double log_final_norm = 0.0;
};

/// Dense n x n complex matrix, row major.
struct ComplexMatrix {
  std::size_t n = 0;
  std::vector<complex> data;

  explicit ComplexMatrix(std::size_t dim = 0) : n(dim), data(dim * dim) {}
  complex& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  const complex& operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  bool is_hermitian(double tol = 1e-12) const;
};

/// Right-hand side of the effective Schroedinger equation in the lab frame,
///   d psi/dt = (-i (H0 + V) - kappa (H0 - E)^2) psi,
/// with H0 = diag(h0_diag). Throws ConfigError on dimension mismatch or non-Hermitian V.
std::vector<complex> rpi_rhs_general(std::span<const complex> psi, std::span<const double> h0_diag,
                                     const ComplexMatrix& v, double kappa, double e_readout);

/// Resonant two-level reduction in the rotating frame.
std::array<complex, 2> rpi_rhs_twolevel(const AtomState& state, const MeasurementConfig& config,
                                        double t, double e_readout);

/// Advances amplitudes across one grid interval [ta, tb] with the readout varying linearly from
/// ea to eb. RK4 sub-steps are split at pulse edges; their length h satisfies
/// h (v + max kappa (E_n - E)^2 + |dE/dt| sqrt(2 kappa)) <= 0.05.
void advance_interval(std::array<complex, 2>& c, const MeasurementConfig& config, double ta,
                      double tb, double ea, double eb);

struct ReadoutCurve;

/// Fixed-grid RK4 integration from t1 to t2 for the given readout.
Trajectory evolve(const MeasurementConfig& config, const ReadoutCurve& readout);

/// P[E] = |C1(T2)|^2 + |C2(T2)|^2.
double readout_probability(const Trajectory& trajectory);
double log_readout_probability(const Trajectory& trajectory);

/// General N-level problem in the lab frame; the drive is sampled per RK4 stage, from inside
/// each sub-step.
struct LabFrameProblem {
  std::vector<double> h0_diag;
  double kappa = 0.0;
  /// V(t); must be Hermitian.
  std::function<ComplexMatrix(double)> drive;
};

/// RK4 for the general equation with `substeps` equal steps per readout interval. Returns the
/// state vector at every readout grid point.
std::vector<std::vector<complex>> evolve_lab_frame(const LabFrameProblem& problem,
                                                   std::vector<complex> psi0,
                                                   const ReadoutCurve& readout,
                                                   std::size_t substeps = 1);

}  // namespace fuzzwatch
