#pragma once

// Physical constants (CODATA 2018) and unit conversions. Everything inside the
// library is SI; eV, um and fs only appear at API boundaries.

#include <numbers>

namespace ptun {

struct PhysicalConstants {
  double electron_mass;      // kg
  double elementary_charge;  // C
  double planck;             // J s
  double reduced_planck;     // J s
  double speed_of_light;     // m / s
  double ev_per_joule;

  static const PhysicalConstants& codata2018();
};

namespace units {

inline constexpr double kElectronMass = 9.1093837015e-31;
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kReducedPlanck = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kMicrometre = 1e-6;
inline constexpr double kFemtosecond = 1e-15;

constexpr double ev_to_joule(double ev) { return ev * kElementaryCharge; }
constexpr double joule_to_ev(double joule) { return joule / kElementaryCharge; }
constexpr double um_to_m(double um) { return um * kMicrometre; }
constexpr double m_to_um(double m) { return m / kMicrometre; }
constexpr double fs_to_s(double fs) { return fs * kFemtosecond; }

/// Photon energy h c / lambda, in eV. Throws std::invalid_argument for lambda <= 0.
double photon_energy(double wavelength_m);

/// Photon momentum h / lambda, in kg m / s. Throws for lambda <= 0; an
/// infinite wavelength gives zero.
double photon_momentum(double wavelength_m);

/// Recoil energy (h / lambda)^2 / 2m, in eV.
double recoil_energy(double wavelength_m);

}  // namespace units
}  // namespace ptun
