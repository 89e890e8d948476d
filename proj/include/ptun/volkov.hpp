#pragma once

// Photon-exchange channels of the Gaussian-beam Volkov state: indices,
// asymptotic kinematics, truncation of the Bessel expansions, and the
// Bessel-product factor itself.

#include <complex>
#include <span>
#include <vector>

#include "ptun/field.hpp"
#include "ptun/grid.hpp"

namespace ptun {

/// j: photons absorbed on entry; j_pp: net photons exchanged on exit.
/// j' = j - j_pp, j1 = j - 2 j2, j1' = j' - 2 j2'.
struct Channel {
  int j = 0;
  int j_pp = 0;
  int j2 = 0;
  int j2p = 0;

  int j_prime() const { return j - j_pp; }
  int j1() const { return j - 2 * j2; }
  int j1p() const { return j_prime() - 2 * j2p; }
};

struct ChannelKinematics {
  double p_z_inside = 0.0;  // (j - u_p) hbar k, kg m / s
  double p_zf = 0.0;        // j_pp hbar k
  double entry_energy_x = 0.0;  // J, x-energy of the entry channel at Delta E = 0
  double final_energy = 0.0;    // J, E_0 + j_pp hbar omega
  double p_xf = 0.0;            // outgoing x-momentum (0 when closed)
  bool entry_open = false;
  bool exit_open = false;
};

struct TruncationPolicy {
  int margin_1 = 10;
  int margin_2 = 10;
  /// Double both margins until every reported rate changes by less than
  /// cauchy_tolerance (relative).
  bool auto_double = true;
  double cauchy_tolerance = 1e-6;
  int max_doublings = 3;
};

/// |j1| <= max_j1, |j2| <= max_j2 and the resulting window of net orders.
struct TruncationBounds {
  int max_j1 = 0;
  int max_j2 = 0;
  double eta_max = 0.0;
  int max_order() const { return max_j1 + 2 * max_j2; }
};

struct ChannelSet {
  TruncationBounds bounds;
  std::vector<int> entry;  // open entry channels j
  std::vector<int> exit;   // open exit channels j_pp with |j_pp| <= max_order
};

namespace volkov {

/// (-i)^n, exactly.
std::complex<double> minus_i_power(int n);

/// x-energy of entry channel j, shifted by the off-shell offset delta_e (J).
double channel_energy_x(int j, double delta_e, const OperatingPoint& op);

ChannelKinematics channel_kinematics(const Channel& ch, const OperatingPoint& op);

/// Outgoing x-momentum of exit channel j_pp, or 0 when it is closed.
double exit_momentum(int j_pp, const OperatingPoint& op);

/// Largest |eta(x)| over the grid for the entry channel with j photons.
double eta_max(int j, const OperatingPoint& op, const AmplitudeGrid& grid);

/// Bounds from the policy margins. The j1 bound is found self-consistently:
/// it must cover eta for the highest channel it admits.
TruncationBounds truncation_bounds(const OperatingPoint& op, const AmplitudeGrid& grid, int margin_1,
                                   int margin_2);

ChannelSet enumerate_channels(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationPolicy& policy);

/// (-i)^{j1} J_{j1}(eta) J_{j2}(-u_p(x)/2) for the entrance indices of ch.
std::complex<double> volkov_bessel_factor(const Channel& ch, double x, double channel_energy_x,
                                          const LaserConfig& laser);

/// Net factor of order n summed over the second-harmonic index:
/// sum_{|j2| <= max_j2, |n - 2 j2| <= max_j1} (-i)^{n-2j2} J_{n-2j2}(eta) J_{j2}(-u/2).
std::complex<double> summed_factor(int n, std::complex<double> eta, double up_local, const TruncationBounds& bounds);

}  // namespace volkov
}  // namespace ptun
