#pragma once

// Gaussian CGS constants and SI <-> CGS conversions.

namespace fuzzwatch::units {

inline constexpr double kElectronCharge = 4.80320425e-10;  // statC
inline constexpr double kElectronMass = 9.1093837e-28;     // g
inline constexpr double kHbar = 1.054571817e-27;           // erg s
inline constexpr double kSpeedOfLightCgs = 2.99792458e10;  // cm/s

inline constexpr double kCoulombToStatC = 2.99792458e9;
inline constexpr double kMetreToCm = 100.0;
inline constexpr double kJouleToErg = 1e7;
inline constexpr double kElectronVoltToJoule = 1.602176634e-19;
/// 1 / (4 pi epsilon_0) in SI units (m/F).
inline constexpr double kCoulombConstant = 8.9875517923e9;

// Dipole moment: C m -> statC cm.
inline constexpr double dipole_si_to_cgs(double d) { return d * kCoulombToStatC * kMetreToCm; }
inline constexpr double dipole_cgs_to_si(double d) { return d / (kCoulombToStatC * kMetreToCm); }

// Polarizability: C m^2 / V -> cm^3 (alpha_cgs = alpha_si / (4 pi epsilon_0), in cm^3).
inline constexpr double polarizability_si_to_cgs(double a) {
  return a * kCoulombConstant * kMetreToCm * kMetreToCm * kMetreToCm;
}
inline constexpr double polarizability_cgs_to_si(double a) {
  return a / (kCoulombConstant * kMetreToCm * kMetreToCm * kMetreToCm);
}

// Electric field: V/m -> statV/cm.
inline constexpr double field_si_to_cgs(double e) { return e * 1e6 / kSpeedOfLightCgs; }
inline constexpr double field_cgs_to_si(double e) { return e * kSpeedOfLightCgs / 1e6; }

// Energy: J -> erg, eV -> erg.
inline constexpr double energy_si_to_cgs(double e) { return e * kJouleToErg; }
inline constexpr double energy_cgs_to_si(double e) { return e / kJouleToErg; }
inline constexpr double ev_to_erg(double e) { return e * kElectronVoltToJoule * kJouleToErg; }
inline constexpr double erg_to_ev(double e) { return e / (kElectronVoltToJoule * kJouleToErg); }

// Length and areal density.
inline constexpr double length_si_to_cgs(double x) { return x * kMetreToCm; }
inline constexpr double length_cgs_to_si(double x) { return x / kMetreToCm; }
inline constexpr double areal_density_si_to_cgs(double n) { return n / (kMetreToCm * kMetreToCm); }
inline constexpr double areal_density_cgs_to_si(double n) { return n * kMetreToCm * kMetreToCm; }

}  // namespace fuzzwatch::units
