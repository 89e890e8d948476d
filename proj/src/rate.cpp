#include "ptun/rate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ptun/units.hpp"

namespace ptun {

const ChannelRate* SpectrumResult::find(int j_pp) const {
  for (const auto& l : lines)
    if (l.j_pp == j_pp) return &l;
  return nullptr;
}

namespace rate {

namespace {

// A line is flagged when its amplitude is within this factor of the
// accumulated absolute accuracy of the bra-kets (refinement error plus
// round-off of sums whose terms are O(1)).
constexpr double kNoiseMargin = 100.0;
constexpr double kRoundoff = 1e-14;

struct EntryResult {
  std::vector<cplx> contribution;  // per exit
  std::vector<double> error;       // per exit, absolute on the contribution
  std::vector<double> noise;       // per exit
  bool converged = true;
  int panels = 0;
  int fallback_panels = 0;
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
/// only its own slot, so the result does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

EntryResult run_entry(const OperatingPoint& op, const RateOptions& options, const TruncationBounds& bounds, int j,
                      const std::vector<int>& exits, const BandQuadrature& band) {
  const double halfwidth = band.offsets.empty() ? 0.0 : std::abs(band.offsets.front());
  const ChannelEngine engine(op, options.grid, bounds, j, exits, halfwidth, 0.0, options.engine);
  const auto values = engine.evaluate(band.offsets);
  const auto check = engine.refinement_check();
  const std::size_t K = band.offsets.size();
  const std::size_t center = K / 2;
  double weight_l1 = 0.0;
  for (const auto& w : band.weights) weight_l1 += std::abs(w);

  EntryResult out;
  out.panels = engine.panel_count();
  out.fallback_panels = values.fallback_panels;
  const double floor = engine.noise_floor();
  const double tol = options.grid.convergence_tol;
  const cplx in0 = values.entrance[center];
  const bool in_ok = check.entrance_error <= tol * std::abs(in0) || check.entrance_error <= floor;
  for (std::size_t r = 0; r < exits.size(); ++r) {
    cplx sum{};
    for (std::size_t k = 0; k < K; ++k) sum += band.weights[k] * values.entrance[k] * values.exits[r * K + k];
    out.contribution.push_back(sum);
    const cplx out0 = values.exits[r * K + center];
    out.error.push_back(weight_l1 * (std::abs(in0) * check.exit_errors[r] + std::abs(out0) * check.entrance_error));
    // Measured refinement error plus the round-off of the O(1)-sized sums.
    out.noise.push_back(out.error.back() + weight_l1 * kRoundoff * (std::abs(in0) + std::abs(out0)));
    const bool out_ok = check.exit_errors[r] <= tol * std::abs(out0) || check.exit_errors[r] <= floor;
    out.converged = out.converged && in_ok && out_ok;
  }
  return out;
}

cplx free_normalisation(const OperatingPoint& op, const RateOptions& options, const BandQuadrature& band) {
  OperatingPoint free = op;
  free.laser.peak_ponderomotive_ev = 0.0;
  const auto result = run_entry(free, options, TruncationBounds{}, 0, {0}, band);
  return result.contribution[0];
}

}  // namespace

cplx spectral_weight(double delta_e, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("spectral width must be positive");
  return cplx(epsilon * epsilon, epsilon * delta_e) / (delta_e * delta_e + epsilon * epsilon);
}

BandQuadrature band_quadrature(const OperatingPoint& op, const RateOptions& options) {
  BandQuadrature q;
  const double eps = op.epsilon();
  if (options.mode == SpectralMode::onshell || options.grid.energy_point_count == 1 ||
      options.grid.energy_band_halfwidth == 0.0) {
    q.offsets = {0.0};
    q.weights = {cplx(1.0)};
    return q;
  }
  const int n = options.grid.energy_point_count;
  const double half = options.grid.energy_band_halfwidth * eps;
  const double step = 2.0 * half / (n - 1);
  for (int k = 0; k < n; ++k) {
    // Symmetric construction keeps the centre offset exactly zero.
    const double de = (k - (n - 1) / 2) * step;
    const double trapezoid = (k == 0 || k == n - 1) ? 0.5 * step : step;
    q.offsets.push_back(de);
    q.weights.push_back(trapezoid * spectral_weight(de, eps));
  }
  return q;
}

SpectrumResult spectrum_at_margins(const OperatingPoint& op, const RateOptions& options, int margin_1, int margin_2) {
  op.validate();
  options.grid.validate();
  TruncationPolicy policy = options.policy;
  policy.margin_1 = margin_1;
  policy.margin_2 = margin_2;
  const ChannelSet set = volkov::enumerate_channels(op, options.grid, policy);
  const BandQuadrature band = band_quadrature(op, options);
  const cplx norm = free_normalisation(op, options, band);

  std::vector<EntryResult> entries(set.entry.size());
  parallel_for(set.entry.size(), options.threads, [&](std::size_t i) {
    entries[i] = run_entry(op, options, set.bounds, set.entry[i], set.exit, band);
  });

  SpectrumResult result;
  result.bounds = set.bounds;
  result.margin_1 = margin_1;
  result.margin_2 = margin_2;
  result.transit_time = op.transit_time();
  result.epsilon = op.epsilon();
  result.entry_channels = static_cast<int>(set.entry.size());
  result.quadrature_converged = true;
  for (const auto& e : entries) {
    result.quadrature_converged = result.quadrature_converged && e.converged;
    result.panels += e.panels;
    result.fallback_panels += e.fallback_panels;
  }
  const double prefactor = 4.0 / op.transit_time();
  const double hk = op.laser.photon_momentum();
  for (std::size_t r = 0; r < set.exit.size(); ++r) {
    ChannelRate line;
    line.j_pp = set.exit[r];
    line.final_energy_ev = op.electron.initial_energy_ev + line.j_pp * op.laser.photon_energy_ev();
    line.p_zf = line.j_pp * hk;
    cplx sum{};
    double err = 0.0, noise = 0.0;
    bool converged = true;
    // Fixed summation order over entry channels.
    for (const auto& e : entries) {
      sum += e.contribution[r];
      err += e.error[r];
      noise += e.noise[r];
      converged = converged && e.converged;
    }
    line.amplitude = sum / norm;
    line.error_estimate = err / std::abs(norm);
    line.noise_amplitude = noise / std::abs(norm);
    line.below_noise = std::abs(line.amplitude) <= kNoiseMargin * line.noise_amplitude;
    line.converged = converged;
    line.rate = prefactor * std::norm(line.amplitude);
    result.total_rate += line.rate;
    result.lines.push_back(line);
  }
  return result;
}

namespace {

bool rates_agree(const SpectrumResult& coarse, const SpectrumResult& fine, double tol) {
  for (const auto& l : fine.lines) {
    const ChannelRate* c = coarse.find(l.j_pp);
    if (l.below_noise) continue;
    if (c == nullptr) return false;
    if (std::abs(l.rate - c->rate) > tol * l.rate) return false;
  }
  return true;
}

}  // namespace

SpectrumResult energy_spectrum(const OperatingPoint& op, const RateOptions& options) {
  int m1 = options.policy.margin_1;
  int m2 = options.policy.margin_2;
  SpectrumResult current = spectrum_at_margins(op, options, m1, m2);
  if (op.laser.peak_ponderomotive_ev == 0.0) {
    // No field: the expansion is exact with a single term.
    current.truncation_checked = true;
    current.truncation_converged = true;
    return current;
  }
  if (!options.policy.auto_double) return current;
  current.truncation_checked = true;
  for (int d = 1; d <= options.policy.max_doublings; ++d) {
    m1 *= 2;
    m2 *= 2;
    SpectrumResult next = spectrum_at_margins(op, options, std::max(m1, 1), std::max(m2, 1));
    next.doublings = d;
    next.truncation_checked = true;
    const bool agree = rates_agree(current, next, options.policy.cauchy_tolerance);
    current = std::move(next);
    if (agree) {
      current.truncation_converged = true;
      return current;
    }
  }
  current.truncation_converged = false;
  return current;
}

cplx moller_amplitude(int j_pp, const OperatingPoint& op, const RateOptions& options) {
  const auto s = energy_spectrum(op, options);
  const ChannelRate* line = s.find(j_pp);
  if (line == nullptr) throw std::invalid_argument("exit channel " + std::to_string(j_pp) + " is closed or truncated");
  return line->amplitude;
}

double transition_rate(int j_pp, const OperatingPoint& op, const RateOptions& options) {
  return 4.0 / op.transit_time() * std::norm(moller_amplitude(j_pp, op, options));
}

std::vector<ChannelRate> diffraction_distribution(const OperatingPoint& op, const RateOptions& options) {
  return diffraction_distribution(energy_spectrum(op, options), op);
}

std::vector<ChannelRate> diffraction_distribution(const SpectrumResult& s, const OperatingPoint& op) {
  const int n = s.bounds.max_order();
  std::vector<ChannelRate> out;
  const double hk = op.laser.photon_momentum();
  for (int jpp = -n; jpp <= n; ++jpp) {
    if (const ChannelRate* l = s.find(jpp)) {
      out.push_back(*l);
    } else {
      ChannelRate closed;
      closed.j_pp = jpp;
      closed.final_energy_ev = op.electron.initial_energy_ev + jpp * op.laser.photon_energy_ev();
      closed.p_zf = jpp * hk;
      closed.open = false;
      closed.converged = true;
      out.push_back(closed);
    }
  }
  return out;
}

std::vector<ResonancePoint> resonance_sweep(const OperatingPoint& base, std::span<const double> up_ratios,
                                            const RateOptions& options) {
  std::vector<ResonancePoint> out;
  for (double u : up_ratios) {
    if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("ponderomotive ratio must be non-negative");
    OperatingPoint op = base;
    op.laser.peak_ponderomotive_ev = u * op.laser.photon_energy_ev();
    ResonancePoint p;
    p.up_ratio = u;
    p.spectrum = energy_spectrum(op, options);
    p.total_rate = p.spectrum.total_rate;
    for (const auto& l : p.spectrum.lines)
      if (l.j_pp != 0) p.inelastic_rate += l.rate;
    p.converged = p.spectrum.converged();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rate
}  // namespace ptun
