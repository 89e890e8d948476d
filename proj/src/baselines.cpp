#include "ptun/baselines.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ptun/quadrature.hpp"
#include "ptun/units.hpp"

namespace ptun::baselines {

namespace {

constexpr double kHbar = units::kReducedPlanck;
constexpr double kMass = units::kElectronMass;

void require_positive_energy(double energy_ev) {
  if (!(energy_ev > 0.0) || !std::isfinite(energy_ev)) throw std::invalid_argument("energy must be positive");
}

}  // namespace

double turning_point(double energy_ev, const LaserConfig& laser) {
  require_positive_energy(energy_ev);
  if (energy_ev >= laser.peak_ponderomotive_ev) return std::numeric_limits<double>::quiet_NaN();
  return field::position_at_energy(units::ev_to_joule(energy_ev), laser);
}

StaticTransmission transfer_matrix(double e, const std::function<double(double)>& potential, double x0, double x1,
                                   int steps) {
  if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("energy must be positive");
  if (steps < 1) throw std::invalid_argument("transfer matrix needs at least one slice");
  if (!(x1 > x0)) throw std::invalid_argument("transfer matrix interval is empty");
  using cplx = std::complex<double>;
  const double h = (x1 - x0) / steps;
  const cplx k_out = std::sqrt(2.0 * kMass * e) / kHbar;

  // Transmitted wave e^{ikx} at the right edge; the overall phase is irrelevant.
  cplx psi = 1.0;
  cplx dpsi = cplx(0.0, 1.0) * k_out;
  double log_norm = 0.0;
  for (int n = steps - 1; n >= 0; --n) {
    const double u = potential(x0 + (n + 0.5) * h);
    const cplx k = std::sqrt(cplx(2.0 * kMass * (e - u), 0.0)) / kHbar;
    const cplx c = std::cos(k * h);
    const cplx s_over_k = std::abs(k) > 0.0 ? std::sin(k * h) / k : cplx(h);
    const cplx ks = k * std::sin(k * h);
    const cplx psi_left = c * psi - s_over_k * dpsi;
    const cplx dpsi_left = ks * psi + c * dpsi;
    psi = psi_left;
    dpsi = dpsi_left;
    const double norm = std::abs(psi) + std::abs(dpsi) / std::abs(k_out);
    log_norm += std::log(norm);
    psi /= norm;
    dpsi /= norm;
  }
  // psi = A e^{ikx} + B e^{-ikx} at the left edge; T = 1 / |A|^2 (same k on both sides).
  const cplx a = 0.5 * (psi + dpsi / (cplx(0.0, 1.0) * k_out));
  StaticTransmission t;
  t.log_t = -2.0 * (std::log(std::abs(a)) + log_norm);
  t.log10_t = t.log_t / std::numbers::ln10;
  t.steps = steps;
  return t;
}

StaticTransmission static_transmission_exact(double energy_ev, const LaserConfig& laser, double half_width, int steps) {
  require_positive_energy(energy_ev);
  laser.validate();
  if (half_width <= 0.0) half_width = 4.0 * laser.sigma;
  return transfer_matrix(
      units::ev_to_joule(energy_ev), [&](double x) { return field::ponderomotive_energy(x, laser); }, -half_width,
      half_width, steps);
}

StaticTransmission static_transmission_wkb(double energy_ev, const LaserConfig& laser) {
  require_positive_energy(energy_ev);
  laser.validate();
  StaticTransmission t;
  const double xt = turning_point(energy_ev, laser);
  if (std::isnan(xt)) return t;
  const double e = units::ev_to_joule(energy_ev);
  // x = x_t sin(phi) removes the square-root endpoint behaviour.
  const quad::GaussLegendre gl(64);
  constexpr int kPanels = 64;
  double action = 0.0;
  const double dphi = std::numbers::pi / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double c = -0.5 * std::numbers::pi + (p + 0.5) * dphi;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double phi = c + 0.5 * dphi * gl.nodes[i];
      const double x = xt * std::sin(phi);
      const double deficit = std::max(field::ponderomotive_energy(x, laser) - e, 0.0);
      action += 0.5 * dphi * gl.weights[i] * std::sqrt(2.0 * kMass * deficit) * xt * std::cos(phi);
    }
  }
  t.log_t = -2.0 * action / kHbar;
  t.log10_t = t.log_t / std::numbers::ln10;
  t.steps = kPanels * static_cast<int>(gl.nodes.size());
  return t;
}

ClassicalTrajectory classical_deflection(const OperatingPoint& op, double steps_per_transit) {
  op.validate();
  if (!(steps_per_transit >= 1.0)) throw std::invalid_argument("steps per transit must be >= 1");
  const auto& laser = op.laser;
  const double v0 = op.electron.velocity();
  const double transit = 2.0 * laser.sigma / v0;
  const double dt = transit / steps_per_transit;
  const double x_start = -3.5 * laser.sigma;
  const double exit_distance = 3.5 * laser.sigma;
  const double e0 = 0.5 * kMass * v0 * v0 + field::ponderomotive_energy(x_start, laser);

  auto force = [&](double x) {
    // -dU/dx with U = U_p exp(-8 ln2 x^2 / sigma^2)
    const double u = field::ponderomotive_energy(x, laser);
    return 16.0 * std::numbers::ln2 * x / (laser.sigma * laser.sigma) * u;
  };

  ClassicalTrajectory traj;
  traj.turning_point = std::numeric_limits<double>::quiet_NaN();
  double x = x_start;
  double v = v0;
  double a = force(x) / kMass;
  // Generous cap: slow passages near the barrier top take many transits.
  const long max_steps = static_cast<long>(2000.0 * steps_per_transit);
  double closest = std::abs(x);
  for (long n = 0; n < max_steps; ++n) {
    v += 0.5 * dt * a;
    x += dt * v;
    a = force(x) / kMass;
    v += 0.5 * dt * a;
    ++traj.steps;
    const double e = 0.5 * kMass * v * v + field::ponderomotive_energy(x, laser);
    traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(e - e0) / e0);
    closest = std::min(closest, std::abs(x));
    if (x > exit_distance || x < x_start) break;
  }
  traj.elapsed = traj.steps * dt;
  traj.final_velocity = v;
  traj.reflected = v < 0.0;
  if (traj.reflected) traj.turning_point = -closest;
  return traj;
}

}  // namespace ptun::baselines
