#include "ptun/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ptun/quadrature.hpp"
#include "ptun/units.hpp"

namespace ptun {

namespace {

constexpr double kHbar = units::kReducedPlanck;
constexpr double kMass = units::kElectronMass;
constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

}  // namespace

LaserConfig LaserConfig::from_ratio(double wavelength, double sigma, double up_ratio) {
  LaserConfig laser;
  laser.wavelength = wavelength;
  laser.sigma = sigma;
  laser.peak_ponderomotive_ev = up_ratio * units::photon_energy(wavelength);
  return laser;
}

double LaserConfig::photon_energy_ev() const { return units::photon_energy(wavelength); }
double LaserConfig::photon_energy() const { return units::ev_to_joule(photon_energy_ev()); }
double LaserConfig::photon_momentum() const { return units::photon_momentum(wavelength); }
double LaserConfig::wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }
double LaserConfig::peak_ponderomotive() const { return units::ev_to_joule(peak_ponderomotive_ev); }
double LaserConfig::up_ratio() const { return peak_ponderomotive_ev / photon_energy_ev(); }

void LaserConfig::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw std::invalid_argument("laser wavelength must be positive and finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("beam width sigma must be positive");
  if (!(peak_ponderomotive_ev >= 0.0) || !std::isfinite(peak_ponderomotive_ev))
    throw std::invalid_argument("ponderomotive energy must be non-negative");
}

double ElectronConfig::initial_energy() const { return units::ev_to_joule(initial_energy_ev); }
double ElectronConfig::p_xi() const { return std::sqrt(2.0 * kMass * initial_energy()); }
double ElectronConfig::velocity() const { return p_xi() / kMass; }
double ElectronConfig::de_broglie_wavelength() const { return units::kPlanck / p_xi(); }

void ElectronConfig::validate() const {
  if (!(initial_energy_ev > 0.0) || !std::isfinite(initial_energy_ev))
    throw std::invalid_argument("electron energy must be positive");
  if (!std::isfinite(transverse_momentum)) throw std::invalid_argument("transverse momentum must be finite");
}

void OperatingPoint::validate() const {
  laser.validate();
  electron.validate();
  if (!(laser.sigma > 100.0 * electron.de_broglie_wavelength()))
    throw std::invalid_argument("beam width must be much larger than the electron de Broglie wavelength");
  if (transit.mode == TransitTime::Mode::explicit_seconds && !(transit.seconds > 0.0 && std::isfinite(transit.seconds)))
    throw std::invalid_argument("explicit interaction time must be positive");
}

double OperatingPoint::transit_time() const {
  switch (transit.mode) {
    case TransitTime::Mode::paper:
      return TransitTime::kPaperValue;
    case TransitTime::Mode::explicit_seconds:
      return transit.seconds;
    case TransitTime::Mode::formula:
      break;
  }
  return 2.0 * laser.sigma / electron.velocity();
}

double OperatingPoint::epsilon() const { return kHbar / transit_time(); }

namespace field {

double profile(double x, double y, const LaserConfig& laser) {
  return std::exp(-kFourLn2 * (x * x + y * y) / (laser.sigma * laser.sigma));
}

double ponderomotive_energy(double x, const LaserConfig& laser) {
  const double f = profile(x, 0.0, laser);
  return laser.peak_ponderomotive() * f * f;
}

double position_at_energy(double energy, const LaserConfig& laser) {
  const double peak = laser.peak_ponderomotive();
  if (energy <= 0.0) return std::numeric_limits<double>::infinity();
  if (energy >= peak) return 0.0;
  return laser.sigma * std::sqrt(std::log(peak / energy) / (2.0 * kFourLn2));
}

double ponderomotive_potential(double x, const LaserConfig& laser) {
  const double f = profile(x, 0.0, laser);
  return laser.peak_ponderomotive_ev * f * f;
}

cplx momentum_from_surplus(double surplus) {
  // +0 imaginary part selects the +i branch when the surplus is negative.
  return std::sqrt(cplx(2.0 * kMass * surplus, 0.0));
}

cplx local_momentum(double x, double channel_energy_x, const LaserConfig& laser) {
  return momentum_from_surplus(channel_energy_x - ponderomotive_energy(x, laser));
}

cplx clamp_momentum(cplx p, double floor) {
  const double m = std::abs(p);
  if (m >= floor) return p;
  if (m == 0.0) return cplx(floor, 0.0);
  return p * (floor / m);
}

double eta_per_momentum(double x, const LaserConfig& laser) {
  const double u = ponderomotive_energy(x, laser);
  return std::numbers::sqrt2 * std::sqrt(2.0 * kMass * u) / (kMass * laser.photon_energy());
}

BesselArguments bessel_arguments(double x, double channel_energy_x, const LaserConfig& laser) {
  const cplx p = local_momentum(x, channel_energy_x, laser);
  return {eta_per_momentum(x, laser) * p, ponderomotive_energy(x, laser) / laser.photon_energy()};
}

SqueezeDiagnostics squeeze_parameters(double ratio, const LaserConfig& laser) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("squeeze ratio must be non-negative");
  const double hw = laser.photon_energy();
  SqueezeDiagnostics d;
  d.chi = 0.5 * std::atanh(-ratio / (1.0 + ratio));
  const double c2 = std::cosh(2.0 * d.chi);
  const double s2 = std::sinh(2.0 * d.chi);
  d.c_energy = 0.5 * hw * c2 + 0.5 * ratio * hw * (s2 + c2);
  // hbar e g f / (m c) = sqrt(r hbar omega / m) once the photon number is
  // eliminated through r = 2 U_p(x) / (n hbar omega).
  d.delta_coefficient = -std::sqrt(ratio * hw / kMass) * std::exp(d.chi) / (2.0 * d.c_energy);
  return d;
}

// ---------------------------------------------------------------------------

WkbWave::WkbWave(const LaserConfig& laser, double channel_energy_x, const AmplitudeGrid& grid, double clamp_floor)
    : laser_(laser), energy_(channel_energy_x), clamp_floor_(clamp_floor) {
  grid.validate();
  const auto& rule = quad::PanelRule::instance();
  constexpr int kN = quad::PanelRule::kNodes;
  constexpr int kMaxDepth = 30;

  breakpoints_.push_back(grid.x_min);
  action_at_breakpoints_.push_back(cplx{});

  // Depth-first bisection, left to right, so the running action is exact at
  // every accepted breakpoint.
  struct Pending {
    double b;
    int depth;
  };
  const double base_h = grid.length() / grid.base_panel_count;
  std::vector<Pending> stack;
  for (int p = grid.base_panel_count; p >= 1; --p)
    stack.push_back({p == grid.base_panel_count ? grid.x_max : grid.x_min + p * base_h, 0});

  // Resolution is judged against the largest |P| on the window so that the
  // square-root cusps at turning points do not trigger endless bisection.
  const double scale = std::max(std::sqrt(2.0 * kMass * std::abs(channel_energy_x)),
                                std::sqrt(2.0 * kMass * laser.peak_ponderomotive()));
  auto max_abs = [](const std::array<cplx, kN>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
  };
  std::array<cplx, kN> samples{};
  while (!stack.empty()) {
    const Pending top = stack.back();
    const double a = breakpoints_.back();
    const double b = top.b;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    bool clamped = false;
    for (int i = 0; i < kN; ++i) {
      samples[i] = momentum(c + h * rule.nodes()[i]);
      if (std::abs(samples[i]) < clamp_floor_) clamped = true;
    }
    if (top.depth < kMaxDepth && rule.tail_ratio(samples) * max_abs(samples) > 1e-12 * scale) {
      stack.push_back({c, top.depth + 1});
      continue;
    }
    stack.pop_back();
    cplx integral{};
    for (int i = 0; i < kN; ++i) integral += rule.weights()[i] * samples[i];
    breakpoints_.push_back(b);
    action_at_breakpoints_.push_back(action_at_breakpoints_.back() + h * integral);
    any_regularized_ = any_regularized_ || clamped;
  }
}

cplx WkbWave::momentum(double x) const { return local_momentum(x, energy_, laser_); }

cplx WkbWave::action(double x) const {
  if (x <= breakpoints_.front()) return momentum(x) * (x - breakpoints_.front());
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  if (it == breakpoints_.end()) {
    return action_at_breakpoints_.back() + momentum(x) * (x - breakpoints_.back());
  }
  const std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  const double a = breakpoints_[k];
  const double c = 0.5 * (a + x);
  const double h = 0.5 * (x - a);
  const auto& rule = quad::PanelRule::instance();
  cplx integral{};
  for (int i = 0; i < quad::PanelRule::kNodes; ++i) integral += rule.weights()[i] * momentum(c + h * rule.nodes()[i]);
  return action_at_breakpoints_[k] + h * integral;
}

cplx WkbWave::log_value(double x) const {
  const cplx p = clamp_momentum(momentum(x), clamp_floor_);
  return -0.5 * std::log(p) + cplx(0.0, 1.0) * action(x) / kHbar;
}

cplx WkbWave::value(double x) const { return std::exp(log_value(x)); }

bool WkbWave::regularized(double x) const { return std::abs(momentum(x)) < clamp_floor_; }

}  // namespace field
}  // namespace ptun
