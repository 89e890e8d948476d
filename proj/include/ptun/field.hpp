#pragma once

// Gaussian beam, ponderomotive potential and the slow-envelope (WKB) electron
// dynamics inside it. Energies passed between functions are in joules; the
// configuration structs carry eV / metres as a user would write them.

#include <complex>
#include <optional>
#include <vector>

#include "ptun/grid.hpp"

namespace ptun {

using cplx = std::complex<double>;

struct LaserConfig {
  double wavelength = 1.064e-6;        // m
  double sigma = 6e-6;                 // m, FWHM-style width of f(x, y)
  double peak_ponderomotive_ev = 0.0;  // U_p at focus, eV

  static LaserConfig from_ratio(double wavelength, double sigma, double up_ratio);

  double photon_energy_ev() const;
  double photon_energy() const;  // J
  double photon_momentum() const;
  double wavenumber() const;
  double peak_ponderomotive() const;  // J
  /// u_p = U_p / (hbar omega) at the focus.
  double up_ratio() const;
  void validate() const;
};

struct ElectronConfig {
  double initial_energy_ev = 0.54;
  double transverse_momentum = 0.0;  // P_y, kg m / s

  double initial_energy() const;  // J
  double p_xi() const;
  double velocity() const;
  double de_broglie_wavelength() const;
  void validate() const;
};

/// How the interaction time T entering epsilon = hbar / T and the 4/T prefactor is chosen.
struct TransitTime {
  enum class Mode { formula, paper, explicit_seconds };
  static constexpr double kPaperValue = 6.9e-11;  // s

  Mode mode = Mode::formula;
  double seconds = 0.0;  // used by explicit_seconds

  static TransitTime formula() { return {}; }
  static TransitTime paper() { return {Mode::paper, 0.0}; }
  static TransitTime explicit_value(double s) { return {Mode::explicit_seconds, s}; }
};

/// Everything that fixes the physics of one run.
struct OperatingPoint {
  LaserConfig laser;
  ElectronConfig electron;
  TransitTime transit;

  /// Throws std::invalid_argument, including when sigma is not much larger
  /// than the electron de Broglie wavelength.
  void validate() const;
  double transit_time() const;
  /// epsilon = hbar / T, J.
  double epsilon() const;
};

struct SqueezeDiagnostics {
  double chi = 0.0;
  /// Coefficient of the x-momentum operator in delta, s / (kg m).
  double delta_coefficient = 0.0;
  double c_energy = 0.0;  // J
};

namespace field {

/// f(x, y) = exp(-4 ln2 (x^2 + y^2) / sigma^2).
double profile(double x, double y, const LaserConfig& laser);

/// U_p f^2(x, 0), eV.
double ponderomotive_potential(double x, const LaserConfig& laser);
/// Same in joules.
double ponderomotive_energy(double x, const LaserConfig& laser);
/// Non-negative x at which the ponderomotive energy equals `energy` (J):
/// 0 at or above the peak, +infinity for energy <= 0.
double position_at_energy(double energy, const LaserConfig& laser);

/// sqrt(2m (E_x - U(x))), continued to +i|.| in the forbidden region.
cplx local_momentum(double x, double channel_energy_x, const LaserConfig& laser);

/// Local momentum from the energy surplus E_x - U(x) directly.
cplx momentum_from_surplus(double surplus);

/// Prefactor momentum with |P| clamped from below at floor (phase kept).
cplx clamp_momentum(cplx p, double floor);

struct BesselArguments {
  cplx eta;
  double up_local;
};

/// eta(x) = sqrt(2) sqrt(2 m U(x)) P_x(x) / (m hbar omega), u_p(x) = U(x) / (hbar omega).
BesselArguments bessel_arguments(double x, double channel_energy_x, const LaserConfig& laser);

/// eta / P_x at x (real, non-negative).
double eta_per_momentum(double x, const LaserConfig& laser);

SqueezeDiagnostics squeeze_parameters(double ratio, const LaserConfig& laser);

/// WKB wave X(x) = P_x^{-1/2} exp(i int_{x_min}^x P_x dx' / hbar), normalised to
/// unit incident flux at the left edge of the grid. The phase table is built
/// once on adaptive panels and shared read-only.
class WkbWave {
 public:
  WkbWave(const LaserConfig& laser, double channel_energy_x, const AmplitudeGrid& grid,
          double clamp_floor);

  /// Natural log of X(x): real part ln|X|, imaginary part the phase.
  cplx log_value(double x) const;
  cplx value(double x) const;
  /// Accumulated int_{x_min}^x P dx (complex, J s / m * m).
  cplx action(double x) const;
  /// True when the prefactor at x was clamped.
  bool regularized(double x) const;
  /// True when any panel contained a clamped sample.
  bool any_regularized() const { return any_regularized_; }
  std::size_t panel_count() const { return breakpoints_.size() - 1; }

 private:
  cplx momentum(double x) const;

  LaserConfig laser_;
  double energy_;
  double clamp_floor_;
  std::vector<double> breakpoints_;
  std::vector<cplx> action_at_breakpoints_;
  bool any_regularized_ = false;
};

}  // namespace field
}  // namespace ptun
