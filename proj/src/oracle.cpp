#include "ptun/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ptun/amplitude.hpp"
#include "ptun/bessel.hpp"
#include "ptun/quadrature.hpp"
#include "ptun/units.hpp"

namespace ptun::oracle {

Brakets brute_force(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationBounds& bounds, int j,
                    int j_pp, double panels_per_wavelength) {
  if (!(panels_per_wavelength > 0.0)) throw std::invalid_argument("oracle density must be positive");
  const double hbar = units::kReducedPlanck;
  const double pi = op.electron.p_xi();
  const double pf = volkov::exit_momentum(j_pp, op);
  const double e = volkov::channel_energy_x(j, 0.0, op);
  const EngineSettings settings;
  const field::WkbWave wave(op.laser, e, grid, settings.clamp_fraction * pi);
  const quad::GaussLegendre gl(16);
  const double wavelength = 2.0 * std::numbers::pi * hbar / std::max(pi, pf);

  std::vector<double> cuts{grid.x_min};
  const double xt = field::position_at_energy(e, op.laser);
  if (e > 0.0 && xt > 0.0 && xt < grid.x_max) {
    cuts.push_back(-xt);
    cuts.push_back(xt);
  }
  cuts.push_back(grid.x_max);

  bessel::SymmetricLadder<cplx> jeta(bounds.max_j1);
  bessel::SymmetricLadder<double> ju(bounds.max_j2);
  auto factor = [&](int n) {
    cplx sum{};
    for (int j2 = -bounds.max_j2; j2 <= bounds.max_j2; ++j2) {
      const int j1 = n - 2 * j2;
      if (std::abs(j1) > bounds.max_j1) continue;
      sum += volkov::minus_i_power(j1) * jeta.at(j1) * ju.at(j2);
    }
    return sum;
  };
  Brakets o;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double a = cuts[seg];
    const double len = cuts[seg + 1] - a;
    // The cosine map stretches by pi/2 at the segment centre.
    const int panels = static_cast<int>(std::ceil(panels_per_wavelength * len / wavelength));
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = (p + 0.5) * h;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = c + 0.5 * h * gl.nodes[i];
        const double x = a + 0.5 * len * (1.0 - std::cos(std::numbers::pi * t));
        const double w = 0.5 * h * gl.weights[i] * 0.5 * len * std::numbers::pi * std::sin(std::numbers::pi * t);
        const auto args = field::bessel_arguments(x, e, op.laser);
        jeta.evaluate(args.eta);
        ju.evaluate(-0.5 * args.up_local);
        const cplx xj = wave.value(x);
        o.entrance += w * std::polar(1.0, -pi * x / hbar) * factor(j) * xj;
        o.exit += w * std::polar(1.0, pf * x / hbar) * factor(j - j_pp) * std::conj(xj);
      }
    }
  }
  const double norm = std::sqrt(pi) / grid.length();
  o.entrance *= norm;
  o.exit *= norm;
  return o;
}

}  // namespace ptun::oracle
