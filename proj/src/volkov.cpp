#include "ptun/volkov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ptun/bessel.hpp"
#include "ptun/units.hpp"

namespace ptun::volkov {

namespace {

constexpr double kMass = units::kElectronMass;
constexpr int kEtaSamples = 4001;
constexpr int kMaxFixedPointIterations = 64;

}  // namespace

std::complex<double> minus_i_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, -1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, 1.0};
  }
}

double channel_energy_x(int j, double delta_e, const OperatingPoint& op) {
  const double hk = op.laser.photon_momentum();
  const double pz = (j - op.laser.up_ratio()) * hk;
  const double py = op.electron.transverse_momentum;
  return op.electron.initial_energy() + j * op.laser.photon_energy() + delta_e - (pz * pz + py * py) / (2.0 * kMass);
}

double exit_momentum(int j_pp, const OperatingPoint& op) {
  const double pz = j_pp * op.laser.photon_momentum();
  const double py = op.electron.transverse_momentum;
  const double ex = op.electron.initial_energy() + j_pp * op.laser.photon_energy() - (pz * pz + py * py) / (2.0 * kMass);
  return ex > 0.0 ? std::sqrt(2.0 * kMass * ex) : 0.0;
}

ChannelKinematics channel_kinematics(const Channel& ch, const OperatingPoint& op) {
  ChannelKinematics k;
  const double hk = op.laser.photon_momentum();
  k.p_z_inside = (ch.j - op.laser.up_ratio()) * hk;
  k.p_zf = ch.j_pp * hk;
  k.entry_energy_x = channel_energy_x(ch.j, 0.0, op);
  k.final_energy = op.electron.initial_energy() + ch.j_pp * op.laser.photon_energy();
  k.p_xf = exit_momentum(ch.j_pp, op);
  k.entry_open = k.entry_energy_x > 0.0;
  k.exit_open = k.p_xf > 0.0;
  return k;
}

double eta_max(int j, const OperatingPoint& op, const AmplitudeGrid& grid) {
  if (op.laser.peak_ponderomotive_ev == 0.0) return 0.0;
  const double e = channel_energy_x(j, 0.0, op);
  double best = 0.0;
  for (int i = 0; i < kEtaSamples; ++i) {
    const double x = grid.x_min + grid.length() * i / (kEtaSamples - 1);
    best = std::max(best, std::abs(field::bessel_arguments(x, e, op.laser).eta));
  }
  return best;
}

TruncationBounds truncation_bounds(const OperatingPoint& op, const AmplitudeGrid& grid, int margin_1, int margin_2) {
  if (margin_1 < 0 || margin_2 < 0) throw std::invalid_argument("truncation margins must be non-negative");
  TruncationBounds b;
  if (op.laser.peak_ponderomotive_ev == 0.0) return b;
  b.max_j2 = static_cast<int>(std::ceil(op.laser.up_ratio() / 2.0)) + margin_2;
  b.max_j1 = margin_1;
  // eta grows with the channel energy, which grows with the admitted order.
  for (int iter = 0; iter < kMaxFixedPointIterations; ++iter) {
    b.eta_max = eta_max(b.max_order(), op, grid);
    const int next = static_cast<int>(std::ceil(b.eta_max)) + margin_1;
    if (next <= b.max_j1) break;
    b.max_j1 = next;
  }
  return b;
}

ChannelSet enumerate_channels(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationPolicy& policy) {
  op.validate();
  ChannelSet set;
  set.bounds = truncation_bounds(op, grid, policy.margin_1, policy.margin_2);
  const int n = set.bounds.max_order();
  for (int j = -n; j <= n; ++j) {
    if (channel_energy_x(j, 0.0, op) > 0.0) set.entry.push_back(j);
    if (exit_momentum(j, op) > 0.0) set.exit.push_back(j);
  }
  return set;
}

std::complex<double> summed_factor(int n, std::complex<double> eta, double up_local, const TruncationBounds& bounds) {
  std::complex<double> sum{};
  for (int j2 = -bounds.max_j2; j2 <= bounds.max_j2; ++j2) {
    const int j1 = n - 2 * j2;
    if (std::abs(j1) > bounds.max_j1) continue;
    sum += minus_i_power(j1) * bessel::j(j1, eta) * bessel::j(j2, -0.5 * up_local);
  }
  return sum;
}

std::complex<double> volkov_bessel_factor(const Channel& ch, double x, double channel_energy_x,
                                          const LaserConfig& laser) {
  const auto args = field::bessel_arguments(x, channel_energy_x, laser);
  return minus_i_power(ch.j1()) * bessel::j(ch.j1(), args.eta) * bessel::j(ch.j2, -0.5 * args.up_local);
}

}  // namespace ptun::volkov
