#include "ptun/amplitude.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ptun/bessel.hpp"
#include "ptun/kernels.hpp"
#include "ptun/quadrature.hpp"
#include "ptun/units.hpp"

namespace ptun {

namespace {

constexpr int kN = quad::PanelRule::kNodes;
constexpr int kOrders = 3;  // F, F', F''/2
constexpr double kHbar = units::kReducedPlanck;
constexpr double kMass = units::kElectronMass;
// Band offsets checked during panel acceptance: half-width * 4^-level.
constexpr int kBandTestLevels = 7;
// Turning-point zones cover energy surpluses within this many band
// half-widths of zero.
constexpr double kZoneSurplusFactor = 2.0;
// Initial panels per zone for the per-offset integration.
constexpr int kZoneBasePanels = 4;
constexpr cplx kI{0.0, 1.0};

using NodeRow = std::array<cplx, kN>;

double max_abs(const NodeRow& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

/// F_n, dF_n/d eta and (1/2) d^2F_n/d eta^2 from the two order ladders.
void summed_derivatives(int n, const bessel::SymmetricLadder<cplx>& jeta, const bessel::SymmetricLadder<double>& ju,
                        const TruncationBounds& bounds, std::array<cplx, kOrders>& out) {
  out = {};
  for (int j2 = -bounds.max_j2; j2 <= bounds.max_j2; ++j2) {
    const int j1 = n - 2 * j2;
    if (std::abs(j1) > bounds.max_j1) continue;
    const cplx phase = volkov::minus_i_power(j1) * ju.at(j2);
    const cplx jm2 = jeta.at_or_zero(j1 - 2), jm1 = jeta.at_or_zero(j1 - 1), j0 = jeta.at(j1);
    const cplx jp1 = jeta.at_or_zero(j1 + 1), jp2 = jeta.at_or_zero(j1 + 2);
    out[0] += phase * j0;
    out[1] += phase * 0.5 * (jm1 - jp1);
    out[2] += phase * 0.125 * (jm2 - 2.0 * j0 + jp2);
  }
}

cplx summed_value(int n, const bessel::SymmetricLadder<cplx>& jeta, const bessel::SymmetricLadder<double>& ju,
                  const TruncationBounds& bounds) {
  cplx sum{};
  for (int j2 = -bounds.max_j2; j2 <= bounds.max_j2; ++j2) {
    const int j1 = n - 2 * j2;
    if (std::abs(j1) > bounds.max_j1) continue;
    sum += volkov::minus_i_power(j1) * ju.at(j2) * jeta.at(j1);
  }
  return sum;
}

}  // namespace

struct ChannelEngine::Sampled {
  double a = 0.0, b = 0.0, c = 0.0, h = 0.0;
  std::array<double, kN> x{}, surplus{}, kappa{}, up_local{};
  NodeRow p0{}, sqrt_p0c{}, resid{};
  cplx s_a{}, s_b{};
  double re_p_center = 0.0, re_s_center = 0.0, log_scale = 0.0;
  bool clamped = false;
};

namespace {

/// WKB modulus/phase change at offset de relative to the reference energy:
/// factor_i = sqrt(P0c / P1c) exp(i dS_i / hbar), delta_i = kappa_i (P1 - P0).
struct Shift {
  NodeRow factor{};
  NodeRow delta{};
  cplx ds_b{};
};

template <typename S>
Shift band_shift(const S& s, double de, cplx ds_a, double clamp_floor) {
  const auto& rule = quad::PanelRule::instance();
  Shift out;
  if (de == 0.0) {
    out.factor.fill(cplx(1.0));
    out.delta.fill(cplx{});
    out.ds_b = ds_a;
    return out;
  }
  NodeRow dp{};
  NodeRow p1{};
  for (int i = 0; i < kN; ++i) {
    p1[i] = field::momentum_from_surplus(s.surplus[i] + de);
    const cplx sum = p1[i] + s.p0[i];
    dp[i] = std::abs(sum) > 0.0 ? 2.0 * kMass * de / sum : p1[i] - s.p0[i];
  }
  cplx total{};
  for (int m = 0; m < kN; ++m) total += rule.weights()[m] * dp[m];
  out.ds_b = ds_a + s.h * total;
  for (int i = 0; i < kN; ++i) {
    cplx ds{};
    for (int m = 0; m < kN; ++m) ds += rule.cumulative(i, m) * dp[m];
    ds = ds_a + s.h * ds;
    const cplx p1c = field::clamp_momentum(p1[i], clamp_floor);
    out.factor[i] = s.sqrt_p0c[i] / std::sqrt(p1c) * std::exp(kI * ds / kHbar);
    out.delta[i] = s.kappa[i] * dp[i];
  }
  return out;
}

}  // namespace

ChannelEngine::ChannelEngine(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationBounds& bounds, int j,
                             std::vector<int> exits, double band_halfwidth, double reference_offset,
                             const EngineSettings& settings)
    : op_(op),
      grid_(grid),
      bounds_(bounds),
      settings_(settings),
      j_(j),
      exits_(std::move(exits)),
      energy_x_(volkov::channel_energy_x(j, reference_offset, op)),
      band_halfwidth_(band_halfwidth),
      p_incident_(op.electron.p_xi()) {
  op_.validate();
  grid_.validate();
  if (!(band_halfwidth_ >= 0.0)) throw std::invalid_argument("band half-width must be non-negative");
  for (int jpp : exits_) {
    const double pf = volkov::exit_momentum(jpp, op_);
    if (!(pf > 0.0)) throw std::invalid_argument("exit channel " + std::to_string(jpp) + " is closed");
    exit_momenta_.push_back(pf);
  }
  clamp_floor_ = settings_.clamp_fraction * p_incident_;
  const cplx p_left = field::clamp_momentum(field::local_momentum(grid_.x_min, energy_x_, op_.laser), clamp_floor_);
  amplitude_scale_ = 1.0 / std::sqrt(std::abs(p_left));
  table_ = build_adaptive(grid_.x_min, grid_.x_max, grid_.base_panel_count, cplx{}, energy_x_, band_halfwidth_ > 0.0,
                          find_zones());
}

std::vector<ChannelEngine::Zone> ChannelEngine::find_zones() const {
  std::vector<Zone> zones;
  if (!(band_halfwidth_ > 0.0) || op_.laser.peak_ponderomotive_ev == 0.0) return zones;
  // Surplus E - U(x) lies in [-w, w] where U(x) is in [E - w, E + w]; U is
  // even in x and decreasing in |x|.
  const double w = kZoneSurplusFactor * band_halfwidth_;
  if (energy_x_ - w >= op_.laser.peak_ponderomotive()) return zones;
  const double inner = field::position_at_energy(energy_x_ + w, op_.laser);
  const double outer = std::min(field::position_at_energy(energy_x_ - w, op_.laser),
                                std::max(std::abs(grid_.x_min), std::abs(grid_.x_max)));
  auto add = [&](double a, double b) {
    a = std::max(a, grid_.x_min);
    b = std::min(b, grid_.x_max);
    if (b > a) zones.push_back({a, b});
  };
  if (inner == 0.0) {
    add(-outer, outer);
  } else {
    add(-outer, -inner);
    add(inner, outer);
  }
  return zones;
}

double ChannelEngine::noise_floor() const {
  return 10.0 * settings_.resolution_tolerance * std::sqrt(p_incident_) * amplitude_scale_;
}

int ChannelEngine::skipped_panel_count() const {
  return static_cast<int>(std::count_if(table_.panels.begin(), table_.panels.end(), [](const Panel& p) { return p.skip; }));
}

ChannelEngine::Sampled ChannelEngine::sample_panel(double a, double b, cplx s_a, double energy) const {
  const auto& rule = quad::PanelRule::instance();
  Sampled s;
  s.a = a;
  s.b = b;
  s.c = 0.5 * (a + b);
  s.h = 0.5 * (b - a);
  const double hw = op_.laser.photon_energy();
  for (int i = 0; i < kN; ++i) {
    const double x = s.c + s.h * rule.nodes()[i];
    const double u = field::ponderomotive_energy(x, op_.laser);
    s.x[i] = x;
    s.surplus[i] = energy - u;
    s.kappa[i] = std::numbers::sqrt2 * std::sqrt(2.0 * kMass * u) / (kMass * hw);
    s.up_local[i] = u / hw;
    s.p0[i] = field::momentum_from_surplus(s.surplus[i]);
    const cplx pc = field::clamp_momentum(s.p0[i], clamp_floor_);
    s.clamped = s.clamped || std::abs(s.p0[i]) < clamp_floor_;
    s.sqrt_p0c[i] = std::sqrt(pc);
  }
  cplx total{}, center{};
  for (int m = 0; m < kN; ++m) {
    total += rule.weights()[m] * s.p0[m];
    center += rule.cumulative_center(m) * s.p0[m];
  }
  s.s_a = s_a;
  s.s_b = s_a + s.h * total;
  const cplx s_c = s_a + s.h * center;
  const cplx p_c = field::local_momentum(s.c, energy, op_.laser);
  s.re_p_center = p_c.real();
  s.re_s_center = s_c.real();
  s.log_scale = -s_c.imag() / kHbar;
  // Residual after removing the linear phase, formed from panel-local
  // actions so that no large absolute phases are subtracted.
  const cplx local_c = s.h * center;
  for (int i = 0; i < kN; ++i) {
    cplx local_i{};
    for (int m = 0; m < kN; ++m) local_i += rule.cumulative(i, m) * s.p0[m];
    local_i *= s.h;
    const cplx d = local_i - local_c;
    const double phase = (d.real() - s.re_p_center * s.h * rule.nodes()[i]) / kHbar;
    s.resid[i] = std::exp(cplx(-d.imag() / kHbar, phase)) / s.sqrt_p0c[i];
  }
  return s;
}

void ChannelEngine::append(Table& table, const Sampled& s) const {
  Panel p;
  p.a = s.a;
  p.h = s.h;
  p.re_p_center = s.re_p_center;
  p.re_s_center = s.re_s_center;
  p.log_scale = s.log_scale;
  p.s_a = s.s_a;
  p.s_b = s.s_b;
  for (std::size_t z = 0; z < table.zones.size(); ++z)
    if (s.c > table.zones[z].a && s.c < table.zones[z].b) p.zone = static_cast<int>(z);
  p.skip = s.log_scale + std::log(std::max(max_abs(s.resid), 1e-300)) < settings_.log_underflow;
  table.panels.push_back(p);
  for (int i = 0; i < kN; ++i) {
    table.x.push_back(s.x[i]);
    table.energy_surplus.push_back(s.surplus[i]);
    table.kappa.push_back(s.kappa[i]);
    table.up_local.push_back(s.up_local[i]);
    table.p0.push_back(s.p0[i]);
    table.sqrt_p0c.push_back(s.sqrt_p0c[i]);
    table.b.push_back(s.resid[i]);
  }
  table.regularized = table.regularized || s.clamped;
}

ChannelEngine::Table ChannelEngine::build_adaptive(double x0, double x1, int base_panels, cplx s_start, double energy,
                                                   bool band, std::vector<Zone> zones) const {
  const auto& rule = quad::PanelRule::instance();
  Table table;
  table.zones = std::move(zones);
  struct Pending {
    double b;
    int depth;
  };
  // Uniform breakpoints plus the zone boundaries, right to left on the stack.
  std::vector<double> cuts;
  const double step = (x1 - x0) / base_panels;
  for (int p = 1; p < base_panels; ++p) cuts.push_back(x0 + p * step);
  for (const auto& z : table.zones) {
    cuts.push_back(z.a);
    cuts.push_back(z.b);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Pending> stack{{x1, 0}};
  for (auto it = cuts.rbegin(); it != cuts.rend(); ++it)
    if (*it > x0 && *it < stack.back().b && stack.back().b - *it > 1e-9 * step) stack.push_back({*it, 0});
  // The error budget is per unit width of the main window's base panels.
  const double base_h = grid_.length() / grid_.base_panel_count;
  auto in_zone = [&](double c) {
    for (const auto& z : table.zones)
      if (c > z.a && c < z.b) return true;
    return false;
  };

  bessel::SymmetricLadder<cplx> jeta(bounds_.max_j1 + 2);
  bessel::SymmetricLadder<double> ju(bounds_.max_j2);
  const double tol = settings_.resolution_tolerance * amplitude_scale_;

  // Test offsets: the band edges and a geometric ladder towards the centre.
  // Near a turning point the phase shift varies on the scale where the local
  // energy surplus is comparable to the offset, so every scale in the band
  // must be resolved, not only the widest one.
  std::vector<double> tests;
  if (band) {
    for (int level = 0; level < kBandTestLevels; ++level) {
      const double de = band_halfwidth_ * std::pow(0.25, level);
      tests.push_back(de);
      tests.push_back(-de);
    }
  }

  double a = x0;
  cplx s_a = s_start;
  std::vector<cplx> ds_a(tests.size());
  std::vector<Shift> edges(tests.size());
  while (!stack.empty()) {
    const Pending top = stack.back();
    const Sampled s = sample_panel(a, top.b, s_a, energy);
    const bool band_here = band && !in_zone(s.c);
    if (band_here)
      for (std::size_t t = 0; t < tests.size(); ++t) edges[t] = band_shift(s, tests[t], ds_a[t], clamp_floor_);
    bool accept = top.depth >= grid_.refinement_limit;
    const double magnitude = std::exp(s.log_scale);
    if (!accept) {
      accept = s.log_scale + std::log(std::max(max_abs(s.resid), 1e-300)) < settings_.log_underflow;
    }
    if (!accept) {
      // Each panel may contribute an integration error of tol * (base width):
      // the estimate is tail * peak * width, so singular-but-integrable cusps
      // at turning points are refined only until their share is negligible.
      const double width_ratio = s.h / (0.5 * base_h);
      auto resolved = [&](const NodeRow& g, double limit) {
        return rule.tail_ratio(g) * max_abs(g) * width_ratio <= limit;
      };
      NodeRow entrance{}, eta{};
      for (int i = 0; i < kN; ++i) {
        eta[i] = s.kappa[i] * s.p0[i];
        jeta.evaluate(eta[i]);
        ju.evaluate(-0.5 * s.up_local[i]);
        entrance[i] = s.resid[i] * summed_value(j_, jeta, ju, bounds_);
      }
      accept = resolved(s.resid, tol / magnitude) && resolved(entrance, tol / magnitude) && resolved(eta, 1e-11);
      if (accept && band_here) {
        for (const auto& e : edges) {
          NodeRow g{};
          for (int i = 0; i < kN; ++i) g[i] = s.resid[i] * e.factor[i];
          accept = accept && resolved(g, tol / magnitude);
        }
      }
    }
    if (!accept) {
      stack.push_back({s.c, top.depth + 1});
      continue;
    }
    stack.pop_back();
    append(table, s);
    a = top.b;
    s_a = s.s_b;
    // Inside zones the test offsets are not tracked; their phase shifts are
    // only needed to judge resolution, which restarts at zero beyond.
    for (std::size_t t = 0; t < tests.size(); ++t) ds_a[t] = band_here ? edges[t].ds_b : cplx{};
  }
  return table;
}

ChannelEngine::Table ChannelEngine::bisect(const Table& base) const {
  Table table;
  table.zones = base.zones;
  cplx s_a{};
  for (const auto& p : base.panels) {
    const double c = p.a + p.h;
    const Sampled left = sample_panel(p.a, c, s_a, energy_x_);
    const Sampled right = sample_panel(c, p.a + 2.0 * p.h, left.s_b, energy_x_);
    append(table, left);
    append(table, right);
    s_a = right.s_b;
  }
  return table;
}

ChannelEngine::Band ChannelEngine::integrate(const Table& table, std::span<const double> offsets) const {
  const auto& rule = quad::PanelRule::instance();
  const std::size_t K = offsets.size();
  const std::size_t R = exits_.size();
  const std::size_t M = static_cast<std::size_t>(kN) * kOrders;

  std::vector<int> orders{j_};
  for (int jpp : exits_) orders.push_back(j_ - jpp);

  std::vector<double> in_re(K, 0.0), in_im(K, 0.0), ex_re(R * K, 0.0), ex_im(R * K, 0.0);
  std::vector<double> a_in_re(M), a_in_im(M), a_ex_re(R * M), a_ex_im(R * M);
  std::vector<double> v_in_re(M * K), v_in_im(M * K), v_ex_re(M * K), v_ex_im(M * K);
  std::vector<cplx> ds_a(K);
  std::vector<Shift> shifts(K);

  // F^{(q)}_{orders[o]} at node i: f[(o * kN + i) * kOrders + q]
  std::vector<std::array<cplx, kOrders>> f(orders.size() * kN);
  bessel::SymmetricLadder<cplx> jeta(bounds_.max_j1 + 2);
  bessel::SymmetricLadder<double> ju(bounds_.max_j2);

  std::vector<std::array<cplx, kN>> w_ex(R);
  std::vector<cplx> phase_ex(R);
  std::array<cplx, kN> w_in{};

  const double norm = std::sqrt(p_incident_) / grid_.length();
  Band band;
  band.offsets.assign(offsets.begin(), offsets.end());
  cplx zone_start{};

  for (std::size_t p = 0; p < table.panels.size(); ++p) {
    const Panel& panel = table.panels[p];
    const std::size_t base = p * kN;
    Sampled s;  // node data of this panel in the layout band_shift expects
    s.h = panel.h;
    for (int i = 0; i < kN; ++i) {
      s.surplus[i] = table.energy_surplus[base + i];
      s.kappa[i] = table.kappa[base + i];
      s.p0[i] = table.p0[base + i];
      s.sqrt_p0c[i] = table.sqrt_p0c[base + i];
    }
    double max_delta = 0.0;
    if (panel.zone < 0) {
      for (std::size_t k = 0; k < K; ++k) {
        shifts[k] = band_shift(s, offsets[k], ds_a[k], clamp_floor_);
        ds_a[k] = shifts[k].ds_b;
        max_delta = std::max(max_delta, max_abs(shifts[k].delta));
      }
    } else {
      // The zone panels carry the zero offset; the others are integrated
      // separately once the end of the zone is reached.
      for (std::size_t k = 0; k < K; ++k) {
        if (offsets[k] == 0.0) {
          shifts[k] = band_shift(s, 0.0, ds_a[k], clamp_floor_);
        } else {
          shifts[k].factor.fill(cplx{});
          shifts[k].delta.fill(cplx{});
        }
      }
      const bool first = p == 0 || table.panels[p - 1].zone != panel.zone;
      if (first) zone_start = panel.s_a;
      const bool last = p + 1 == table.panels.size() || table.panels[p + 1].zone != panel.zone;
      if (last) {
        const Zone& zone = table.zones[static_cast<std::size_t>(panel.zone)];
        for (std::size_t k = 0; k < K; ++k) {
          if (offsets[k] == 0.0) continue;
          const ZoneResult z = integrate_zone(zone, offsets[k], zone_start + ds_a[k]);
          in_re[k] += z.entrance.real();
          in_im[k] += z.entrance.imag();
          for (std::size_t r = 0; r < R; ++r) {
            ex_re[r * K + k] += z.exits[r].real();
            ex_im[r * K + k] += z.exits[r].imag();
          }
          ds_a[k] = z.s_b - panel.s_b;
        }
        ++band.zone_count;
      }
    }
    if (panel.skip) continue;

    const double scale = norm * panel.h * std::exp(panel.log_scale);
    const double c = panel.a + panel.h;
    const double theta_in = (panel.re_p_center - p_incident_) * panel.h / kHbar;
    const cplx phase_in = scale * std::polar(1.0, (panel.re_s_center - p_incident_ * c) / kHbar);
    rule.filon_weights(theta_in, w_in);
    for (std::size_t r = 0; r < R; ++r) {
      const double pf = exit_momenta_[r];
      rule.filon_weights((pf - panel.re_p_center) * panel.h / kHbar, w_ex[r]);
      phase_ex[r] = scale * std::polar(1.0, (pf * c - panel.re_s_center) / kHbar);
    }

    if (max_delta > settings_.taylor_limit) {
      // Bessel factors evaluated exactly at every offset.
      ++band.fallback_panels;
      std::vector<cplx> values(orders.size());
      for (int i = 0; i < kN; ++i) {
        ju.evaluate(-0.5 * table.up_local[base + i]);
        const cplx eta0 = table.kappa[base + i] * table.p0[base + i];
        const cplx b = table.b[base + i];
        for (std::size_t k = 0; k < K; ++k) {
          jeta.evaluate(eta0 + shifts[k].delta[i]);
          for (std::size_t o = 0; o < orders.size(); ++o) values[o] = summed_value(orders[o], jeta, ju, bounds_);
          const cplx v = b * shifts[k].factor[i];
          const cplx ein = phase_in * w_in[i] * values[0] * v;
          in_re[k] += ein.real();
          in_im[k] += ein.imag();
          for (std::size_t r = 0; r < R; ++r) {
            const cplx eo = phase_ex[r] * w_ex[r][i] * values[r + 1] * std::conj(v);
            ex_re[r * K + k] += eo.real();
            ex_im[r * K + k] += eo.imag();
          }
        }
      }
      continue;
    }

    for (int i = 0; i < kN; ++i) {
      jeta.evaluate(table.kappa[base + i] * table.p0[base + i]);
      ju.evaluate(-0.5 * table.up_local[base + i]);
      for (std::size_t o = 0; o < orders.size(); ++o)
        summed_derivatives(orders[o], jeta, ju, bounds_, f[o * kN + static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < kN; ++i) {
      for (int q = 0; q < kOrders; ++q) {
        const std::size_t m = static_cast<std::size_t>(i) * kOrders + static_cast<std::size_t>(q);
        const cplx ain = phase_in * w_in[i] * f[static_cast<std::size_t>(i)][q];
        a_in_re[m] = ain.real();
        a_in_im[m] = ain.imag();
        for (std::size_t r = 0; r < R; ++r) {
          const cplx aex = phase_ex[r] * w_ex[r][i] * f[(r + 1) * kN + static_cast<std::size_t>(i)][q];
          a_ex_re[r * M + m] = aex.real();
          a_ex_im[r * M + m] = aex.imag();
        }
      }
      const cplx b = table.b[base + i];
      for (std::size_t k = 0; k < K; ++k) {
        const cplx v = b * shifts[k].factor[i];
        const cplx d = shifts[k].delta[i];
        cplx vin = v, vex = std::conj(v);
        for (int q = 0; q < kOrders; ++q) {
          const std::size_t m = static_cast<std::size_t>(i) * kOrders + static_cast<std::size_t>(q);
          v_in_re[m * K + k] = vin.real();
          v_in_im[m * K + k] = vin.imag();
          v_ex_re[m * K + k] = vex.real();
          v_ex_im[m * K + k] = vex.imag();
          vin *= d;
          vex *= d;
        }
      }
    }
    kernels::contract({a_in_re.data(), a_in_im.data(), 1, M, v_in_re.data(), v_in_im.data(), K, in_re.data(), in_im.data()});
    if (R > 0)
      kernels::contract({a_ex_re.data(), a_ex_im.data(), R, M, v_ex_re.data(), v_ex_im.data(), K, ex_re.data(), ex_im.data()});
  }

  band.entrance.resize(K);
  band.exits.resize(R * K);
  for (std::size_t k = 0; k < K; ++k) band.entrance[k] = {in_re[k], in_im[k]};
  for (std::size_t i = 0; i < R * K; ++i) band.exits[i] = {ex_re[i], ex_im[i]};
  return band;
}

ChannelEngine::ZoneResult ChannelEngine::integrate_zone(const Zone& zone, double offset, cplx s_start) const {
  const Table table =
      build_adaptive(zone.a, zone.b, kZoneBasePanels, s_start, energy_x_ + offset, false, {});
  const std::array<double, 1> zero{0.0};
  const Band band = integrate(table, zero);
  ZoneResult z;
  z.entrance = band.entrance[0];
  z.exits = band.exits;
  z.s_b = table.panels.back().s_b;
  return z;
}

ChannelEngine::Band ChannelEngine::evaluate(std::span<const double> offsets) const {
  for (double de : offsets)
    if (std::abs(de) > band_halfwidth_ * (1.0 + 1e-12))
      throw std::invalid_argument("offset outside the band the engine was resolved for");
  return integrate(table_, offsets);
}

ChannelEngine::RefinementCheck ChannelEngine::refinement_check() const {
  const std::array<double, 1> zero{0.0};
  const Band coarse = integrate(table_, zero);
  const Table fine_table = bisect(table_);
  const Band fine = integrate(fine_table, zero);
  RefinementCheck check;
  check.panels = static_cast<int>(fine_table.panels.size());
  check.entrance = fine.entrance[0];
  check.entrance_error = std::abs(fine.entrance[0] - coarse.entrance[0]);
  check.exits = fine.exits;
  for (std::size_t r = 0; r < exits_.size(); ++r) check.exit_errors.push_back(std::abs(fine.exits[r] - coarse.exits[r]));
  return check;
}

namespace amplitude {

namespace {

bool within(double error, cplx value, double tol, double floor) {
  return error <= tol * std::abs(value) || error <= floor;
}

}  // namespace

BraketValue entrance_braket(const Channel& ch, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                            const TruncationBounds& bounds) {
  const ChannelEngine engine(op, grid, bounds, ch.j, {}, 0.0, delta_e);
  const auto check = engine.refinement_check();
  BraketValue v;
  v.value = check.entrance;
  v.error_estimate = check.entrance_error;
  v.panels = check.panels;
  v.converged = within(v.error_estimate, v.value, grid.convergence_tol, engine.noise_floor());
  return v;
}

BraketValue exit_braket(const Channel& ch, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                        const TruncationBounds& bounds) {
  const ChannelEngine engine(op, grid, bounds, ch.j, {ch.j_pp}, 0.0, delta_e);
  const auto check = engine.refinement_check();
  BraketValue v;
  v.value = check.exits[0];
  v.error_estimate = check.exit_errors[0];
  v.panels = check.panels;
  v.converged = within(v.error_estimate, v.value, grid.convergence_tol, engine.noise_floor());
  return v;
}

MatrixElement matrix_element(int j, int j_pp, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                             const TruncationPolicy& policy) {
  const auto bounds = volkov::truncation_bounds(op, grid, policy.margin_1, policy.margin_2);
  const ChannelEngine engine(op, grid, bounds, j, {j_pp}, 0.0, delta_e);
  const auto check = engine.refinement_check();
  MatrixElement m;
  m.j = j;
  m.j_pp = j_pp;
  m.energy_offset = delta_e;
  m.entrance = check.entrance;
  m.exit = check.exits[0];
  m.value = m.entrance * m.exit;
  m.error_estimate = std::abs(m.entrance) * check.exit_errors[0] + std::abs(m.exit) * check.entrance_error;
  m.panels = check.panels;
  m.regularized = engine.regularized();
  m.converged = within(check.entrance_error, m.entrance, grid.convergence_tol, engine.noise_floor()) &&
                within(check.exit_errors[0], m.exit, grid.convergence_tol, engine.noise_floor());
  return m;
}

}  // namespace amplitude
}  // namespace ptun
