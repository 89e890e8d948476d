#pragma once

// Reference models without photon exchange: quantum transmission through the
// static ponderomotive barrier (exact and WKB) and classical motion in it.

#include <functional>

#include "ptun/field.hpp"

namespace ptun {

struct StaticTransmission {
  double log_t = 0.0;    // natural log of the transmission probability
  double log10_t = 0.0;
  int steps = 0;
};

struct ClassicalTrajectory {
  bool reflected = false;
  double final_velocity = 0.0;      // m / s, signed
  double max_energy_drift = 0.0;    // max |E(t) - E(0)| / E(0)
  double turning_point = 0.0;       // m, closest approach to the centre (NaN if transmitted)
  double elapsed = 0.0;             // s
  long steps = 0;
};

namespace baselines {

/// Transfer-matrix transmission of a particle of kinetic energy `energy`
/// (J) through `potential` (J) on [x0, x1], sampled at slice midpoints; the
/// potential must vanish outside the interval.
StaticTransmission transfer_matrix(double energy, const std::function<double(double)>& potential, double x0, double x1,
                                   int steps);

/// Transfer-matrix transmission through U_p f^2(x) on [-half_width, half_width]
/// with `steps` piecewise-constant slices, marched right to left with
/// logarithmic renormalisation so that deep barriers do not underflow.
StaticTransmission static_transmission_exact(double energy_ev, const LaserConfig& laser, double half_width = 0.0,
                                             int steps = 400000);

/// -2 / hbar times the action under the barrier between the analytic turning
/// points; 0 when the energy clears the barrier.
StaticTransmission static_transmission_wkb(double energy_ev, const LaserConfig& laser);

/// Classical turning point x_t = sigma sqrt(ln(U_p / E) / (8 ln 2)); NaN when E >= U_p.
double turning_point(double energy_ev, const LaserConfig& laser);

/// Velocity-Verlet motion of an electron launched from x < -3 sigma towards
/// the beam with kinetic energy E_0. The step is T / steps_per_transit with
/// T = 2 sigma / v_0.
ClassicalTrajectory classical_deflection(const OperatingPoint& op, double steps_per_transit = 1e5);

}  // namespace baselines
}  // namespace ptun
