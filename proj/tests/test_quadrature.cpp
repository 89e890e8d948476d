#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ptun/quadrature.hpp"

using namespace ptun;
using quad::cplx;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int n : {1, 2, 5, 16, 33}) {
    const quad::GaussLegendre gl(n);
    for (int p = 0; p < 2 * n; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += gl.weights[static_cast<std::size_t>(i)] * std::pow(gl.nodes[static_cast<std::size_t>(i)], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("spherical Bessel functions against closed forms") {
  for (double x : {-7.3, -0.2, 1e-4, 0.3, 0.999, 1.0, 2.5, 17.0, 150.0}) {
    std::array<double, 16> j{};
    quad::spherical_bessel(x, j);
    if (std::abs(x) >= 1.0) {
      const double s = std::sin(x), c = std::cos(x);
      CHECK(j[0] == doctest::Approx(s / x).epsilon(1e-13));
      CHECK(j[1] == doctest::Approx(s / (x * x) - c / x).epsilon(1e-12));
    }
    for (int k = 0; k < 16; ++k) {
      const double ref = std::sph_bessel(static_cast<unsigned>(k), std::abs(x)) * ((x < 0 && k % 2) ? -1.0 : 1.0);
      CHECK(std::abs(j[static_cast<std::size_t>(k)] - ref) <= 1e-13);
    }
  }
}

TEST_CASE("Filon weights reproduce exp(i theta t) moments") {
  const auto& rule = quad::PanelRule::instance();
  for (double theta : {0.0, 0.3, -2.0, 12.0, 80.0, -500.0}) {
    std::array<cplx, 16> w{};
    rule.filon_weights(theta, w);
    // g = 1 and g = t
    cplx s0{}, s1{};
    for (int i = 0; i < 16; ++i) {
      s0 += w[static_cast<std::size_t>(i)];
      s1 += w[static_cast<std::size_t>(i)] * rule.nodes()[i];
    }
    const cplx exact0 = theta == 0.0 ? cplx(2.0) : cplx(2.0 * std::sin(theta) / theta);
    CHECK(std::abs(s0 - exact0) <= 1e-13);
    const double j1 = theta == 0.0 ? 0.0 : std::sin(theta) / (theta * theta) - std::cos(theta) / theta;
    CHECK(std::abs(s1 - cplx(0.0, 2.0 * j1)) <= 1e-13);
  }
}

TEST_CASE("cumulative integration matrix integrates polynomials") {
  const auto& rule = quad::PanelRule::instance();
  for (int i = 0; i < 16; ++i) {
    const double t = rule.nodes()[i];
    double s2 = 0.0;
    for (int m = 0; m < 16; ++m) s2 += rule.cumulative(i, m) * rule.nodes()[m] * rule.nodes()[m];
    CHECK(s2 == doctest::Approx((t * t * t + 1.0) / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("tail ratio separates smooth from under-resolved samples") {
  const auto& rule = quad::PanelRule::instance();
  std::array<cplx, 16> smooth{}, rough{};
  for (int i = 0; i < 16; ++i) {
    smooth[static_cast<std::size_t>(i)] = std::exp(cplx(0.0, 2.0 * rule.nodes()[i]));
    rough[static_cast<std::size_t>(i)] = std::exp(cplx(0.0, 40.0 * rule.nodes()[i]));
  }
  CHECK(rule.tail_ratio(smooth) < 1e-10);
  CHECK(rule.tail_ratio(rough) > 1e-2);
}

TEST_CASE("oscillatory integral of analytic test functions") {
  AmplitudeGrid grid;
  grid.x_min = -1.0;
  grid.x_max = 1.0;
  grid.base_panel_count = 4;
  grid.convergence_tol = 1e-12;

  auto one = quad::oscillatory_integral([](double) { return cplx(1.0); }, grid);
  CHECK(one.converged);
  CHECK(std::abs(one.value - 2.0) < 1e-14);

  const double q = 150.0;
  auto wave = quad::oscillatory_integral([q](double x) { return std::exp(cplx(0.0, q * x)); }, grid);
  CHECK(wave.converged);
  CHECK(std::abs(wave.value - 2.0 * std::sin(q) / q) < 1e-12);

  auto gauss = quad::oscillatory_integral([](double x) { return cplx(std::exp(-x * x * 50.0)); }, grid);
  CHECK(gauss.converged);
  const double exact = std::sqrt(std::numbers::pi / 50.0) * std::erf(std::sqrt(50.0));
  CHECK(std::abs(gauss.value - exact) < 1e-13);
}

TEST_CASE("grid validation") {
  AmplitudeGrid g;
  CHECK_NOTHROW(g.validate());
  g.energy_point_count = 200;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = AmplitudeGrid::for_beam(6e-6, 4.0);
  CHECK(g.x_max == doctest::Approx(24e-6));
  g.x_min = 1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
