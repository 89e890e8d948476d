#pragma once

namespace ptun {

/// Spatial window and off-shell energy band used to evaluate the bra-kets.
struct AmplitudeGrid {
  double x_min = -18e-6;  // m
  double x_max = 18e-6;   // m
  int base_panel_count = 256;
  int refinement_limit = 40;
  double convergence_tol = 1e-6;
  double energy_band_halfwidth = 10.0;  // in units of epsilon
  int energy_point_count = 201;

  /// Window of +-half_width_sigmas * sigma with the remaining defaults.
  static AmplitudeGrid for_beam(double sigma, double half_width_sigmas = 3.0);

  double length() const { return x_max - x_min; }
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

}  // namespace ptun
