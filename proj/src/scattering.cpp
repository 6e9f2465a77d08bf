#include "fuzzwatch/scattering.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fuzzwatch/errors.hpp"
#include "fuzzwatch/units.hpp"

namespace fuzzwatch {

namespace {

using std::numbers::pi;

double born_prefactor(double electron_energy) {
  const double m = units::kElectronMass;
  const double e = units::kElectronCharge;
  const double hbar = units::kHbar;
  return 2.0 * pi * std::pow(m, 1.5) * e * e / (hbar * hbar * hbar * std::sqrt(2.0 * electron_energy));
}

std::string sci(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::scientific << x;
  return os.str();
}

}  // namespace

std::vector<std::string> ScatteringSetup::validate() const {
  const auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be positive and finite");
    }
  };
  const auto non_negative = [](const char* name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be non-negative and finite");
    }
  };
  non_negative("dipole_d1", d1);
  non_negative("alpha1", alpha1);
  non_negative("alpha2", alpha2);
  non_negative("field_e0", field_e0);
  positive("distance_l", distance_l);
  positive("electron_energy", electron_energy);
  positive("energy_spread", energy_spread);
  positive("slit_q", slit_q);
  positive("slit_ratio", slit_ratio);
  positive("attenuation_s", attenuation_s);
  positive("surface_density", surface_density);
  non_negative("pulse_duration", pulse_duration);
  non_negative("spontaneous_lifetime", spontaneous_lifetime);

  std::vector<std::string> warnings;
  const double spread_ratio = energy_spread / electron_energy;
  if (attenuation_s > 2.0 * spread_ratio || attenuation_s < 0.5 * spread_ratio) {
    warnings.push_back("attenuation_s = " + sci(attenuation_s, 3) +
                       " differs from energy_spread/electron_energy = " + sci(spread_ratio, 3) +
                       " by more than a factor 2");
  }
  return warnings;
}

double sigma_per_dipole_squared(const ScatteringSetup& setup) {
  return 2.0 * pi * born_prefactor(setup.electron_energy);
}

DipoleDerived derived_dipoles(const ScatteringSetup& setup) {
  DipoleDerived d;
  d.d0 = setup.d1 + 0.5 * (setup.alpha2 + setup.alpha1) * setup.field_e0;
  d.delta_d = 0.5 * (setup.alpha2 - setup.alpha1) * setup.field_e0;
  if (!(d.d0 > 0.0)) throw ConfigError("mean dipole d0 must be positive");
  const double sum_sq = d.d0 * d.d0 + d.delta_d * d.delta_d;
  d.sigma0 = sigma_per_dipole_squared(setup) * sum_sq;
  d.chi = d.sigma0 * 2.0 * d.d0 * d.delta_d / sum_sq;
  return d;
}

double dipole_squared(const DipoleDerived& derived, double p2) {
  const double d0 = derived.d0, dd = derived.delta_d;
  return d0 * d0 + dd * dd + 2.0 * d0 * dd * (2.0 * p2 - 1.0);
}

BetaGamma beta_gamma(double d_squared, double electron_energy, double distance_l) {
  BetaGamma bg;
  bg.beta = born_prefactor(electron_energy) * d_squared;
  bg.gamma = 4.0 * distance_l * std::sqrt(2.0 * electron_energy * units::kElectronMass) / units::kHbar;
  return bg;
}

BetaGamma beta_gamma(const ScatteringSetup& setup, double d_squared) {
  return beta_gamma(d_squared, setup.electron_energy, setup.distance_l);
}

double differential_cross_section(double beta, double gamma, double theta) {
  return beta * std::exp(-gamma * std::sin(0.5 * theta));
}

double bessel_i0_minus_struve_l0(double gamma) {
  if (gamma < 0.0 || std::isnan(gamma)) throw DomainError("gamma must be >= 0");
  if (gamma == 0.0) return 1.0;
  if (std::isinf(gamma)) return 0.0;
  const auto f = [gamma](double u) { return std::exp(-gamma * std::sin(u)); };
  double error = 0.0;
  // The integrand is symmetric about pi/2.
  const double half = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, 0.5 * pi, 20, 1e-13, &error);
  if (!(error <= 1e-10 * half)) {
    throw IntegrationError("I0 - L0 quadrature did not converge at gamma = " + sci(gamma));
  }
  return 2.0 * half / pi;
}

double total_cross_section_exact(double beta, double gamma) {
  return 2.0 * pi * beta * bessel_i0_minus_struve_l0(gamma);
}

double total_cross_section_approx(double beta, double gamma) {
  if (gamma < 0.0 || std::isnan(gamma)) throw DomainError("gamma must be >= 0");
  if (gamma < 1e-6) {
    // 1 - exp(-x) = x - x^2/2 + ..., x = pi gamma / 2.
    return 2.0 * pi * beta * (1.0 - 0.25 * pi * gamma);
  }
  return 4.0 * beta / gamma * -std::expm1(-0.5 * pi * gamma);
}

StateCrossSection sigma_of_state(const DipoleDerived& derived, double p2) {
  StateCrossSection s;
  s.delta_sigma = derived.chi * (2.0 * p2 - 1.0);
  s.sigma = derived.sigma0 + s.delta_sigma;
  if (!(s.sigma > 0.0)) throw ConfigError("cross section is not positive; require |delta_d| < d0");
  return s;
}

double born_validity(const ScatteringSetup& setup, double d) {
  const double m = units::kElectronMass;
  return units::kElectronCharge * d * m /
         (units::kHbar * std::sqrt(2.0 * m * setup.electron_energy) * setup.distance_l);
}

Flux scattered_flux(const ScatteringSetup& setup, double sigma) {
  Flux f;
  f.g = setup.slit_ratio * setup.attenuation_s * setup.surface_density *
        std::sqrt(2.0 * setup.electron_energy / units::kElectronMass);
  f.scattered = f.g * sigma;
  f.incoming = f.g * setup.slit_q;
  return f;
}

double energy_from_sigma(double sigma, const DipoleDerived& derived, double e1, double e2) {
  if (derived.chi == 0.0) {
    throw DegenerateMeasurementError("chi = 0: the levels give identical cross sections");
  }
  return 0.5 * (e1 + e2) + (e2 - e1) / (2.0 * derived.chi) * (sigma - derived.sigma0);
}

double level_resolution_time(const ScatteringSetup& setup, const DipoleDerived& derived, double g) {
  if (derived.sigma0 >= setup.slit_q) {
    throw ConfigError("sigma0 = " + sci(derived.sigma0) + " cm must be smaller than slit_q = " +
                      sci(setup.slit_q) + " cm");
  }
  if (derived.delta_d == 0.0) {
    throw InfiniteFuzzinessError("delta_d = 0: the level resolution time is infinite");
  }
  if (!(g > 0.0)) throw ConfigError("incoming flux density g must be positive");
  const double r = derived.d0 / derived.delta_d;
  return r * r * (1.0 - derived.sigma0 / setup.slit_q) / (4.0 * g * derived.sigma0);
}

FeasibilityReport feasibility(const ScatteringSetup& setup) {
  FeasibilityReport r;
  r.warnings = setup.validate();
  r.derived = derived_dipoles(setup);
  const DipoleDerived& d = r.derived;
  if (d.sigma0 >= setup.slit_q) {
    throw ConfigError("sigma0 = " + sci(d.sigma0) + " cm is not smaller than slit_q = " +
                      sci(setup.slit_q) + " cm");
  }
  const double d_sq = d.d0 * d.d0 + d.delta_d * d.delta_d;
  r.at_sigma0 = beta_gamma(setup, d_sq);
  r.sigma_exact = total_cross_section_exact(r.at_sigma0.beta, r.at_sigma0.gamma);
  r.sigma_approx = total_cross_section_approx(r.at_sigma0.beta, r.at_sigma0.gamma);
  r.born_ratio = born_validity(setup, std::sqrt(d_sq));
  r.flux = scattered_flux(setup, d.sigma0);
  r.informative = d.delta_d != 0.0;
  if (r.informative) {
    r.level_resolution = level_resolution_time(setup, d, r.flux.g);
  } else {
    r.level_resolution = std::numeric_limits<double>::infinity();
    r.warnings.push_back("delta_d = 0: measurement conveys no information");
  }
  if (setup.pulse_duration > 0.0) r.flux_times_pulse = r.flux.scattered * setup.pulse_duration;

  constexpr double kFluxLow = 1e6, kFluxHigh = 1e7;
  if (r.flux.scattered < kFluxLow) {
    r.flux_discrepancy = kFluxLow / r.flux.scattered;
  } else if (r.flux.scattered > kFluxHigh) {
    r.flux_discrepancy = r.flux.scattered / kFluxHigh;
  }

  r.born_ok = r.born_ratio < 0.3;
  r.small_dipole_ok = std::abs(d.delta_d) < 0.3 * d.d0;
  r.slit_ok = setup.slit_ratio * r.at_sigma0.gamma < 0.3;
  r.flux_pulse_ok = r.flux_times_pulse >= 10.0;
  if (setup.pulse_duration > 0.0 && setup.spontaneous_lifetime > 0.0) {
    r.lifetime_ok = setup.pulse_duration < 0.1 * setup.spontaneous_lifetime;
  }
  if (!r.born_ok) {
    r.warnings.push_back("Born ratio " + sci(r.born_ratio, 3) +
                         " >= 0.3: cross sections are rough estimates only");
  }
  if (!r.small_dipole_ok) r.warnings.push_back("|delta_d| / d0 >= 0.3: measurement is not fuzzy");
  if (!r.slit_ok) r.warnings.push_back("q/l is not small compared with 1/gamma");
  if (setup.pulse_duration <= 0.0) {
    r.warnings.push_back("pulse_duration unset: F*T not checked");
  } else if (!r.flux_pulse_ok) {
    r.warnings.push_back("F*T = " + sci(r.flux_times_pulse, 3) + " is not >> 1");
  }
  if (!r.lifetime_ok) r.warnings.push_back("pulse is not short compared with the spontaneous lifetime");
  return r;
}

std::string format_feasibility(const FeasibilityReport& r, const ScatteringSetup& setup) {
  std::ostringstream os;
  const auto flag = [](bool ok) { return ok ? "pass" : "WARN"; };
  const DipoleDerived& d = r.derived;
  os << "d0: " << sci(units::dipole_cgs_to_si(d.d0)) << " C m\n";
  os << "delta_d: " << sci(units::dipole_cgs_to_si(d.delta_d)) << " C m\n";
  os << "sigma0: " << sci(units::length_cgs_to_si(d.sigma0)) << " m\n";
  os << "chi: " << sci(units::length_cgs_to_si(d.chi)) << " m\n";
  os << "beta: " << sci(units::length_cgs_to_si(r.at_sigma0.beta)) << " m\n";
  os << "gamma: " << sci(r.at_sigma0.gamma) << "\n";
  os << "sigma_exact: " << sci(units::length_cgs_to_si(r.sigma_exact)) << " m\n";
  os << "sigma_approx: " << sci(units::length_cgs_to_si(r.sigma_approx)) << " m\n";
  os << "sigma0_over_q: " << sci(d.sigma0 / setup.slit_q) << "\n";
  os << "born_ratio: " << sci(r.born_ratio) << "\n";
  os << "flux_F: " << sci(r.flux.scattered) << " 1/s\n";
  os << "flux_discrepancy_factor: " << sci(r.flux_discrepancy, 3) << "\n";
  os << "incoming_rate_gq: " << sci(r.flux.incoming) << " 1/s\n";
  os << "level_resolution_time: " << sci(r.level_resolution) << " s\n";
  if (setup.pulse_duration > 0.0) {
    os << "pulse_duration: " << sci(setup.pulse_duration) << " s\n";
    os << "F_times_T: " << sci(r.flux_times_pulse) << "\n";
  }
  os << "check born_condition: " << flag(r.born_ok) << "\n";
  os << "check small_dipole_difference: " << flag(r.small_dipole_ok) << "\n";
  os << "check slit_ratio_vs_gamma: " << flag(r.slit_ok) << "\n";
  os << "check flux_times_pulse: " << (setup.pulse_duration > 0.0 ? flag(r.flux_pulse_ok) : "skip")
     << "\n";
  os << "check spontaneous_lifetime: "
     << (setup.pulse_duration > 0.0 && setup.spontaneous_lifetime > 0.0 ? flag(r.lifetime_ok) : "skip")
     << "\n";
  os << "check informative: " << flag(r.informative) << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace fuzzwatch
