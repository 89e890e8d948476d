#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ptun/field.hpp"
#include "ptun/units.hpp"

using namespace ptun;

namespace {

LaserConfig laser_at(double up_ev) {
  LaserConfig l;
  l.wavelength = 1.064e-6;
  l.sigma = 6e-6;
  l.peak_ponderomotive_ev = up_ev;
  return l;
}

}  // namespace

TEST_CASE("profile is unity at focus and one half at half width") {
  const auto l = laser_at(1.0);
  CHECK(field::profile(0.0, 0.0, l) == 1.0);
  CHECK(field::profile(3e-6, 0.0, l) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(field::profile(0.0, -3e-6, l) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(field::ponderomotive_potential(3e-6, l) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(field::ponderomotive_potential(-5e-6, l) == field::ponderomotive_potential(5e-6, l));
}

TEST_CASE("local momentum takes the +i branch under the barrier") {
  const auto l = laser_at(2.9);
  const double e = units::ev_to_joule(0.54);
  const auto inside = field::local_momentum(0.0, e, l);
  CHECK(inside.real() == 0.0);
  CHECK(inside.imag() > 0.0);
  const auto outside = field::local_momentum(17e-6, e, l);
  CHECK(outside.imag() == 0.0);
  CHECK(outside.real() == doctest::Approx(std::sqrt(2.0 * units::kElectronMass * e)).epsilon(1e-6));
}

TEST_CASE("momentum clamp keeps phase and floors the modulus") {
  const auto p = field::clamp_momentum({0.0, 1e-30}, 1e-28);
  CHECK(p.real() == 0.0);
  CHECK(p.imag() == doctest::Approx(1e-28));
  CHECK(field::clamp_momentum({0.0, 0.0}, 2.0) == std::complex<double>(2.0, 0.0));
  CHECK(field::clamp_momentum({3.0, 4.0}, 1.0) == std::complex<double>(3.0, 4.0));
}

TEST_CASE("Bessel arguments at focus") {
  const auto l = laser_at(0.3);
  const double e = units::ev_to_joule(1.0);
  const auto a = field::bessel_arguments(0.0, e, l);
  const double hw = l.photon_energy();
  const double up = l.peak_ponderomotive();
  CHECK(a.eta.real() == doctest::Approx(2.0 * std::numbers::sqrt2 * std::sqrt(up * (e - up)) / hw).epsilon(1e-13));
  CHECK(a.up_local == doctest::Approx(l.up_ratio()).epsilon(1e-14));
  CHECK(field::bessel_arguments(0.0, e, laser_at(0.0)).eta == std::complex<double>(0.0, 0.0));
}

TEST_CASE("squeeze parameters") {
  const auto l = laser_at(1.0);
  const auto zero = field::squeeze_parameters(0.0, l);
  CHECK(zero.chi == 0.0);
  CHECK(zero.delta_coefficient == 0.0);
  CHECK(zero.c_energy == doctest::Approx(0.5 * l.photon_energy()));
  const auto one = field::squeeze_parameters(1.0, l);
  CHECK(one.chi == doctest::Approx(-0.2747).epsilon(2e-4));
  CHECK(one.c_energy == doctest::Approx(0.5 * std::sqrt(3.0) * l.photon_energy()).epsilon(1e-13));
  for (double r : {0.01, 0.5, 3.0, 100.0})
    CHECK(field::squeeze_parameters(r, l).chi == doctest::Approx(-0.25 * std::log1p(2.0 * r)).epsilon(1e-12));
  CHECK_THROWS_AS(field::squeeze_parameters(-1.0, l), std::invalid_argument);
}

TEST_CASE("free WKB wave is a unit-flux plane wave") {
  const auto l = laser_at(0.0);
  const double e = units::ev_to_joule(0.54);
  const AmplitudeGrid grid;
  const double p = std::sqrt(2.0 * units::kElectronMass * e);
  const field::WkbWave wave(l, e, grid, 1e-4 * p);
  for (double x : {-18e-6, -3e-6, 0.0, 7.7e-6, 18e-6}) {
    const auto v = wave.value(x);
    CHECK(std::norm(v) * p == doctest::Approx(1.0).epsilon(1e-12));
    const double phase = p * (x - grid.x_min) / units::kReducedPlanck;
    CHECK(std::abs(wave.log_value(x).imag() - phase) <= 1e-9 * std::max(1.0, phase));
  }
  CHECK_FALSE(wave.any_regularized());
}

TEST_CASE("WKB wave decays under the barrier and keeps the phase above it") {
  const auto l = laser_at(2.9);
  const double e = units::ev_to_joule(0.54);
  const AmplitudeGrid grid;
  const double p = std::sqrt(2.0 * units::kElectronMass * e);
  const field::WkbWave wave(l, e, grid, 1e-4 * p);
  const auto at_focus = wave.log_value(0.0);
  CHECK(at_focus.real() < -100.0);
  CHECK_FALSE(wave.regularized(0.0));
  // Action along the forbidden region equals the direct integral of |P|.
  const double xt = l.sigma * std::sqrt(std::log(2.9 / 0.54) / (8.0 * std::numbers::ln2));
  const auto s = wave.action(0.0) - wave.action(-xt);
  double direct = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double phi = -0.5 * std::numbers::pi * (1.0 - (i + 0.5) / n);
    const double x = xt * std::sin(phi);
    direct += std::abs(field::local_momentum(x, e, l)) * xt * std::cos(phi) * (0.5 * std::numbers::pi / n);
  }
  CHECK(s.imag() == doctest::Approx(direct).epsilon(1e-7));
  CHECK(std::abs(s.real()) <= 1e-9 * direct);
}

TEST_CASE("operating point validation") {
  OperatingPoint op;
  op.laser = laser_at(1.0);
  CHECK_NOTHROW(op.validate());
  op.laser.sigma = 1e-9;
  CHECK_THROWS_AS(op.validate(), std::invalid_argument);
  op.laser.sigma = 6e-6;
  op.electron.initial_energy_ev = -1.0;
  CHECK_THROWS_AS(op.validate(), std::invalid_argument);
}
