#pragma once

// Moller amplitudes, transition rates and the derived observables: energy
// spectrum, diffraction by exchanged photon momentum, and resonance sweeps
// over the ponderomotive ratio.

#include <complex>
#include <span>
#include <vector>

#include "ptun/amplitude.hpp"
#include "ptun/field.hpp"
#include "ptun/grid.hpp"
#include "ptun/volkov.hpp"

namespace ptun {

enum class SpectralMode { onshell, band };

struct RateOptions {
  AmplitudeGrid grid;
  TruncationPolicy policy;
  SpectralMode mode = SpectralMode::band;
  EngineSettings engine;
  int threads = 1;
};

struct ChannelRate {
  int j_pp = 0;
  double final_energy_ev = 0.0;
  double p_zf = 0.0;          // kg m / s
  cplx amplitude{};           // Moller amplitude, free passage = 1
  double rate = 0.0;          // 1 / s
  double error_estimate = 0.0;  // absolute, on the amplitude
  double noise_amplitude = 0.0;  // accuracy floor of the amplitude
  bool converged = false;
  /// |amplitude| is below the round-off floor of the bra-kets: the rate is
  /// reported but carries no significant digits.
  bool below_noise = false;
  bool open = true;
};

struct SpectrumResult {
  std::vector<ChannelRate> lines;  // ascending j_pp
  TruncationBounds bounds;
  int margin_1 = 0;
  int margin_2 = 0;
  int doublings = 0;
  /// Whether margin doubling was run; truncation_converged is meaningful only then.
  bool truncation_checked = false;
  bool truncation_converged = false;
  bool quadrature_converged = false;
  double transit_time = 0.0;
  double epsilon = 0.0;
  double total_rate = 0.0;
  int entry_channels = 0;
  int panels = 0;
  int fallback_panels = 0;

  const ChannelRate* find(int j_pp) const;
  /// Quadrature converged and, when it was checked, truncation too.
  bool converged() const { return quadrature_converged && (!truncation_checked || truncation_converged); }
};

struct ResonancePoint {
  double up_ratio = 0.0;
  double total_rate = 0.0;
  double inelastic_rate = 0.0;
  bool converged = false;
  SpectrumResult spectrum;
};

namespace rate {

/// w(Delta E) = (eps^2 + i eps Delta E) / (Delta E^2 + eps^2).
cplx spectral_weight(double delta_e, double epsilon);

/// Off-shell offsets (J) and trapezoid-times-spectral weights of the band.
struct BandQuadrature {
  std::vector<double> offsets;
  std::vector<cplx> weights;
};
BandQuadrature band_quadrature(const OperatingPoint& op, const RateOptions& options);

/// Amplitudes for all open exit channels at fixed truncation margins.
SpectrumResult spectrum_at_margins(const OperatingPoint& op, const RateOptions& options, int margin_1, int margin_2);

/// Moller amplitude of one exit channel (free passage normalised to 1).
cplx moller_amplitude(int j_pp, const OperatingPoint& op, const RateOptions& options);

/// (4 / T) |Omega|^2.
double transition_rate(int j_pp, const OperatingPoint& op, const RateOptions& options);

/// All open exit channels, with automatic margin doubling when the policy asks for it.
SpectrumResult energy_spectrum(const OperatingPoint& op, const RateOptions& options);

/// Rates for j_pp in [-N, N] (N the truncation order), closed channels with
/// rate 0 and open = false.
std::vector<ChannelRate> diffraction_distribution(const OperatingPoint& op, const RateOptions& options);
/// The same table built from an already computed spectrum.
std::vector<ChannelRate> diffraction_distribution(const SpectrumResult& spectrum, const OperatingPoint& op);

std::vector<ResonancePoint> resonance_sweep(const OperatingPoint& base, std::span<const double> up_ratios,
                                            const RateOptions& options);

}  // namespace rate
}  // namespace ptun
