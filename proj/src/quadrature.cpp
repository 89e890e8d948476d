#include "ptun/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptun {

AmplitudeGrid AmplitudeGrid::for_beam(double sigma, double half_width_sigmas) {
  AmplitudeGrid grid;
  grid.x_min = -half_width_sigmas * sigma;
  grid.x_max = half_width_sigmas * sigma;
  return grid;
}

void AmplitudeGrid::validate() const {
  if (!(x_min < 0.0 && 0.0 < x_max)) throw std::invalid_argument("grid must satisfy x_min < 0 < x_max");
  if (base_panel_count < 1) throw std::invalid_argument("base_panel_count must be positive");
  if (refinement_limit < 0) throw std::invalid_argument("refinement_limit must be non-negative");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  if (!(energy_band_halfwidth >= 0.0)) throw std::invalid_argument("energy band half-width must be >= 0");
  if (energy_point_count < 1 || energy_point_count % 2 == 0)
    throw std::invalid_argument("energy_point_count must be odd so the on-shell point is sampled");
}

}  // namespace ptun

namespace ptun::quad {

GaussLegendre::GaussLegendre(int n) : nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n)) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      derivative = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / derivative;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - t * t) * derivative * derivative);
    nodes[static_cast<std::size_t>(i)] = -t;
    nodes[static_cast<std::size_t>(n - 1 - i)] = t;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

void legendre_values(double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = t;
  for (std::size_t k = 2; k < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    out[k] = ((2.0 * kd - 1.0) * t * out[k - 1] - (kd - 1.0) * out[k - 2]) / kd;
  }
}

void spherical_bessel(double x, std::span<double> out) {
  const int count = static_cast<int>(out.size());
  if (count == 0) return;
  const double sign_flip = x < 0.0 ? -1.0 : 1.0;
  const double a = std::abs(x);
  if (a < 1e-3) {
    double power = 1.0;  // a^k / (2k+1)!!
    for (int k = 0; k < count; ++k) {
      if (k > 0) power *= a / (2.0 * k + 1.0);
      const double c1 = a * a / (2.0 * (2.0 * k + 3.0));
      const double c2 = a * a * a * a / (8.0 * (2.0 * k + 3.0) * (2.0 * k + 5.0));
      out[static_cast<std::size_t>(k)] = power * (1.0 - c1 + c2);
    }
  } else {
    // Forward recurrence is stable while k < a; above that a backward sweep is
    // normalised on the forward values (or on j_0 alone when a < 1).
    const int forward_top = a < 1.0 ? 0 : std::min(count - 1, static_cast<int>(a));
    std::vector<double> f(static_cast<std::size_t>(std::max(forward_top, 1)) + 1);
    f[0] = std::sin(a) / a;
    f[1] = std::sin(a) / (a * a) - std::cos(a) / a;
    for (int k = 1; k < forward_top; ++k)
      f[static_cast<std::size_t>(k + 1)] = (2.0 * k + 1.0) / a * f[static_cast<std::size_t>(k)] - f[static_cast<std::size_t>(k - 1)];
    for (int k = 0; k <= forward_top; ++k) out[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k)];
    if (count - 1 > forward_top) {
      const int start = count + 30 + static_cast<int>(a);
      std::vector<double> b(static_cast<std::size_t>(start) + 2, 0.0);
      b[static_cast<std::size_t>(start)] = 1e-300;
      for (int k = start; k >= 1; --k) {
        b[static_cast<std::size_t>(k - 1)] = (2.0 * k + 1.0) / a * b[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k + 1)];
        if (std::abs(b[static_cast<std::size_t>(k - 1)]) > 1e250) {
          for (int i = k - 1; i <= start; ++i) b[static_cast<std::size_t>(i)] *= 1e-250;
        }
      }
      double scale;
      if (forward_top == 0) {
        scale = f[0] / b[0];
      } else {
        const double norm = std::max(std::abs(b[static_cast<std::size_t>(forward_top)]),
                                     std::abs(b[static_cast<std::size_t>(forward_top - 1)]));
        const double bt = b[static_cast<std::size_t>(forward_top)] / norm;
        const double bl = b[static_cast<std::size_t>(forward_top - 1)] / norm;
        const double ft = f[static_cast<std::size_t>(forward_top)];
        const double fl = f[static_cast<std::size_t>(forward_top - 1)];
        scale = (ft * bt + fl * bl) / (bt * bt + bl * bl) / norm;
      }
      for (int k = forward_top + 1; k < count; ++k) out[static_cast<std::size_t>(k)] = scale * b[static_cast<std::size_t>(k)];
    }
  }
  if (sign_flip < 0.0) {
    for (int k = 1; k < count; k += 2) out[static_cast<std::size_t>(k)] = -out[static_cast<std::size_t>(k)];
  }
}

const PanelRule& PanelRule::instance() {
  static const PanelRule rule;
  return rule;
}

PanelRule::PanelRule() {
  const GaussLegendre gl(kNodes);
  std::copy(gl.nodes.begin(), gl.nodes.end(), nodes_.begin());
  std::copy(gl.weights.begin(), gl.weights.end(), weights_.begin());

  std::array<double, kNodes + 1> p{};
  for (int i = 0; i < kNodes; ++i) {
    legendre_values(nodes_[i], p);
    for (int k = 0; k < kNodes; ++k) legendre_[k][i] = (2.0 * k + 1.0) / 2.0 * weights_[i] * p[k];
  }
  // int_{-1}^{t} P_k = (P_{k+1}(t) - P_{k-1}(t)) / (2k+1), and t + 1 for k = 0.
  for (int i = 0; i < kNodes; ++i) {
    legendre_values(nodes_[i], p);
    std::array<double, kNodes> antiderivative{};
    antiderivative[0] = nodes_[i] + 1.0;
    for (int k = 1; k < kNodes; ++k) antiderivative[k] = (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
    for (int m = 0; m < kNodes; ++m) {
      double s = 0.0;
      for (int k = 0; k < kNodes; ++k) s += antiderivative[k] * legendre_[k][m];
      cumulative_[i][m] = s;
    }
  }
  legendre_values(0.0, p);
  std::array<double, kNodes> center{};
  center[0] = 1.0;
  for (int k = 1; k < kNodes; ++k) center[k] = (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
  for (int m = 0; m < kNodes; ++m) {
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) s += center[k] * legendre_[k][m];
    cumulative_center_[m] = s;
  }
}

void PanelRule::filon_weights(double theta, std::span<cplx, kNodes> out) const {
  std::array<double, kNodes> sph{};
  spherical_bessel(theta, sph);
  // mu_k = 2 i^k j_k(theta)
  std::array<cplx, kNodes> mu{};
  static constexpr std::array<cplx, 4> kIPowers{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  for (int k = 0; k < kNodes; ++k) mu[k] = 2.0 * sph[k] * kIPowers[k % 4];
  for (int i = 0; i < kNodes; ++i) {
    cplx w{};
    for (int k = 0; k < kNodes; ++k) w += legendre_[k][i] * mu[k];
    out[i] = w;
  }
}

double PanelRule::tail_ratio(std::span<const cplx, kNodes> samples) const {
  double peak = 0.0;
  double tail = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    cplx a{};
    for (int i = 0; i < kNodes; ++i) a += legendre_[k][i] * samples[i];
    const double m = std::abs(a);
    peak = std::max(peak, m);
    if (k >= kNodes - 2) tail = std::max(tail, m);
  }
  return peak == 0.0 ? 0.0 : tail / peak;
}

namespace {

struct Sweep {
  cplx value{};
  double l1 = 0.0;
};

Sweep composite(const std::function<cplx(double)>& f, double a, double b, long panels) {
  const auto& rule = PanelRule::instance();
  const double h = (b - a) / static_cast<double>(panels);
  Sweep s;
  for (long p = 0; p < panels; ++p) {
    const double c = a + (static_cast<double>(p) + 0.5) * h;
    cplx acc{};
    double l1 = 0.0;
    for (int i = 0; i < PanelRule::kNodes; ++i) {
      const cplx v = f(c + 0.5 * h * rule.nodes()[i]);
      acc += rule.weights()[i] * v;
      l1 += rule.weights()[i] * std::abs(v);
    }
    s.value += 0.5 * h * acc;
    s.l1 += 0.5 * h * l1;
  }
  return s;
}

}  // namespace

OscillatoryResult oscillatory_integral(const std::function<cplx(double)>& integrand, const AmplitudeGrid& grid) {
  if (!(grid.x_min < grid.x_max)) throw std::invalid_argument("empty integration window");
  constexpr long kMaxPanels = 1L << 22;
  long panels = std::max(1, grid.base_panel_count);
  Sweep previous = composite(integrand, grid.x_min, grid.x_max, panels);
  OscillatoryResult result;
  result.value = previous.value;
  result.panels = static_cast<int>(panels);
  result.error_estimate = std::abs(previous.value);
  for (int level = 0; level < grid.refinement_limit && panels * 2 <= kMaxPanels; ++level) {
    panels *= 2;
    const Sweep next = composite(integrand, grid.x_min, grid.x_max, panels);
    const double diff = std::abs(next.value - previous.value);
    result.value = next.value;
    result.panels = static_cast<int>(panels);
    result.error_estimate = diff;
    const double scale = std::max(std::abs(next.value), 1e-13 * next.l1);
    if (diff <= grid.convergence_tol * scale) {
      result.converged = true;
      return result;
    }
    previous = next;
  }
  return result;
}

}  // namespace ptun::quad
