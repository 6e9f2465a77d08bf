#pragma once

// Electron scattering on a polarized two-level atom: dipole model, 2D Born cross sections,
// flux and the resulting measurement parameters. All quantities are Gaussian CGS.

#include <string>
#include <vector>

namespace fuzzwatch {

struct ScatteringSetup {
  double d1 = 0.0;               // statC cm
  double alpha1 = 0.0;           // cm^3
  double alpha2 = 0.0;           // cm^3
  double field_e0 = 0.0;         // statV/cm
  double distance_l = 0.0;       // cm
  double electron_energy = 0.0;  // erg, the selected energy E'_e
  double energy_spread = 0.0;    // erg
  double slit_q = 0.0;           // cm
  double slit_ratio = 0.0;       // q / l
  double attenuation_s = 0.0;
  double surface_density = 0.0;  // cm^-2
  /// Optional (0 = unset): physical pulse length T and spontaneous lifetime, seconds.
  double pulse_duration = 0.0;
  double spontaneous_lifetime = 0.0;

  /// Throws ConfigError for non-positive required fields; returns warnings.
  std::vector<std::string> validate() const;
};

struct DipoleDerived {
  double d0 = 0.0;
  double delta_d = 0.0;
  double chi = 0.0;     // cm
  double sigma0 = 0.0;  // cm
};

/// d0 = d1 + (alpha1 + alpha2) E0 / 2, delta_d = (alpha2 - alpha1) E0 / 2, with sigma0 and chi.
/// Throws ConfigError if d0 <= 0.
DipoleDerived derived_dipoles(const ScatteringSetup& setup);

/// sigma0 / (d0^2 + delta_d^2): the factor K in sigma = K d^2 for small gamma.
double sigma_per_dipole_squared(const ScatteringSetup& setup);

/// d^2 = d0^2 + delta_d^2 + 2 d0 delta_d (2 p2 - 1).
double dipole_squared(const DipoleDerived& derived, double p2);

struct BetaGamma {
  double beta = 0.0;  // cm
  double gamma = 0.0;
};

/// beta = 2 pi m^(3/2) e^2 d^2 / (hbar^3 sqrt(2 E)), gamma = 4 L sqrt(2 E m) / hbar, with E the
/// selected electron energy.
BetaGamma beta_gamma(const ScatteringSetup& setup, double d_squared);
BetaGamma beta_gamma(double d_squared, double electron_energy, double distance_l);

/// d sigma / d theta = beta exp(-gamma sin(theta / 2)).
double differential_cross_section(double beta, double gamma, double theta);

/// I0(gamma) - L0(gamma) from pi (I0 - L0) = int_0^pi exp(-gamma sin u) du. Throws DomainError
/// for gamma < 0 and IntegrationError if the quadrature misses 1e-10 relative.
double bessel_i0_minus_struve_l0(double gamma);

/// 2 pi beta (I0(gamma) - L0(gamma)).
double total_cross_section_exact(double beta, double gamma);

/// (4 beta / gamma)(1 - exp(-pi gamma / 2)); series below gamma = 1e-6.
double total_cross_section_approx(double beta, double gamma);

struct StateCrossSection {
  double sigma = 0.0;
  double delta_sigma = 0.0;
};

/// sigma = sigma0 + chi (2 p2 - 1). Throws ConfigError if sigma <= 0.
StateCrossSection sigma_of_state(const DipoleDerived& derived, double p2);

/// Ratio of the two sides of the Born condition, e d m / (hbar sqrt(2 m E) L).
double born_validity(const ScatteringSetup& setup, double d);

struct Flux {
  double scattered = 0.0;  // F, s^-1
  double incoming = 0.0;   // g q, s^-1
  double g = 0.0;          // F / sigma, cm^-1 s^-1
};

/// F = (q/l) s sigma n_e sqrt(2 E'/m) = g sigma.
Flux scattered_flux(const ScatteringSetup& setup, double sigma);

/// E-bar + (Delta E / 2 chi)(sigma - sigma0). Throws DegenerateMeasurementError if chi = 0.
double energy_from_sigma(double sigma, const DipoleDerived& derived, double e1, double e2);

/// T_lr = (d0 / delta_d)^2 (1 - sigma0 / q) / (4 g sigma0), seconds.
/// Throws InfiniteFuzzinessError if delta_d = 0 and ConfigError if sigma0 >= q.
double level_resolution_time(const ScatteringSetup& setup, const DipoleDerived& derived, double g);

/// Everything the feasibility report prints.
struct FeasibilityReport {
  DipoleDerived derived;
  BetaGamma at_sigma0;  // beta, gamma with d^2 = d0^2 + delta_d^2
  double sigma_exact = 0.0;
  double sigma_approx = 0.0;
  double born_ratio = 0.0;
  Flux flux;                      // evaluated at sigma0
  double level_resolution = 0.0;  // seconds; +inf when delta_d = 0
  double flux_times_pulse = 0.0;  // F T; 0 when T is unset
  /// Factor to the nearest end of [1e6, 1e7] s^-1; 1 inside.
  double flux_discrepancy = 1.0;

  bool born_ok = false;
  bool small_dipole_ok = false;
  bool slit_ok = false;
  bool flux_pulse_ok = false;
  bool lifetime_ok = true;
  bool informative = false;
  std::vector<std::string> warnings;
};

/// Throws ConfigError on an invalid setup (including sigma0 >= q).
FeasibilityReport feasibility(const ScatteringSetup& setup);
std::string format_feasibility(const FeasibilityReport& report, const ScatteringSetup& setup);

}  // namespace fuzzwatch
