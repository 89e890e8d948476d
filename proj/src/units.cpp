#include "ptun/units.hpp"

#include <cmath>
#include <stdexcept>

namespace ptun {

const PhysicalConstants& PhysicalConstants::codata2018() {
  static const PhysicalConstants constants{
      units::kElectronMass,  units::kElementaryCharge, units::kPlanck,
      units::kReducedPlanck, units::kSpeedOfLight,     1.0 / units::kElementaryCharge,
  };
  return constants;
}

namespace units {

namespace {
void require_wavelength(double wavelength_m) {
  if (!(wavelength_m > 0.0)) {
    throw std::invalid_argument("wavelength must be positive");
  }
}
}  // namespace

double photon_energy(double wavelength_m) {
  require_wavelength(wavelength_m);
  return joule_to_ev(kPlanck * kSpeedOfLight / wavelength_m);
}

double photon_momentum(double wavelength_m) {
  require_wavelength(wavelength_m);
  if (std::isinf(wavelength_m)) return 0.0;
  return kPlanck / wavelength_m;
}

double recoil_energy(double wavelength_m) {
  const double p = photon_momentum(wavelength_m);
  return joule_to_ev(p * p / (2.0 * kElectronMass));
}

}  // namespace units
}  // namespace ptun
