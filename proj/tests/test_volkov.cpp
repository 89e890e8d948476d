#include <cmath>

#include "doctest.h"
#include "ptun/bessel.hpp"
#include "ptun/units.hpp"
#include "ptun/volkov.hpp"

using namespace ptun;

namespace {

OperatingPoint fig_point(double up_ev) {
  OperatingPoint op;
  op.laser.peak_ponderomotive_ev = up_ev;
  op.electron.initial_energy_ev = 0.54;
  return op;
}

}  // namespace

TEST_CASE("powers of -i") {
  CHECK(volkov::minus_i_power(0) == std::complex<double>(1, 0));
  CHECK(volkov::minus_i_power(1) == std::complex<double>(0, -1));
  CHECK(volkov::minus_i_power(-1) == std::complex<double>(0, 1));
  CHECK(volkov::minus_i_power(6) == std::complex<double>(-1, 0));
  CHECK(volkov::minus_i_power(-7) == std::complex<double>(0, -1));
}

TEST_CASE("channel index bookkeeping") {
  const Channel ch{5, 3, 1, -2};
  CHECK(ch.j_prime() == 2);
  CHECK(ch.j1() == 3);
  CHECK(ch.j1p() == 6);
}

TEST_CASE("channel kinematics") {
  const auto op = fig_point(2.9);
  const double hw = op.laser.photon_energy();
  const double hk = op.laser.photon_momentum();
  const auto k = volkov::channel_kinematics({3, 3, 0, 0}, op);
  CHECK(k.p_zf == doctest::Approx(3 * hk));
  CHECK(k.final_energy == doctest::Approx(op.electron.initial_energy() + 3 * hw));
  CHECK(k.exit_open);
  const double pz = (3 - op.laser.up_ratio()) * hk;
  CHECK(k.entry_energy_x == doctest::Approx(op.electron.initial_energy() + 3 * hw - pz * pz / (2 * units::kElectronMass)));
  CHECK_FALSE(volkov::channel_kinematics({-1, -1, 0, 0}, op).exit_open);
}

TEST_CASE("free field admits a single channel") {
  const auto set = volkov::enumerate_channels(fig_point(0.0), AmplitudeGrid{}, TruncationPolicy{});
  CHECK(set.bounds.max_j1 == 0);
  CHECK(set.bounds.max_j2 == 0);
  REQUIRE(set.entry.size() == 1);
  CHECK(set.entry[0] == 0);
  REQUIRE(set.exit.size() == 1);
}

TEST_CASE("truncation covers eta of the highest admitted channel") {
  const auto op = fig_point(2.9);
  const AmplitudeGrid grid;
  const auto b = volkov::truncation_bounds(op, grid, 10, 10);
  CHECK(b.max_j2 == 12);
  CHECK(b.max_j1 >= std::ceil(volkov::eta_max(b.max_order(), op, grid)) + 10);
  CHECK(b.eta_max > 10.0);
  const auto set = volkov::enumerate_channels(op, grid, TruncationPolicy{});
  for (int j : set.exit) CHECK(j >= 0);
}

TEST_CASE("summed factor reduces to a single Bessel function without the second harmonic") {
  TruncationBounds b{40, 5, 0.0};
  const std::complex<double> eta(7.3, 0.4);
  for (int n = -10; n <= 10; ++n)
    CHECK(std::abs(volkov::summed_factor(n, eta, 0.0, b) - volkov::minus_i_power(n) * bessel::j(n, eta)) < 1e-15);
}

TEST_CASE("summed factors obey the Parseval sum rule for real arguments") {
  TruncationBounds b{90, 30, 0.0};
  for (double eta : {0.5, 6.0, 25.0}) {
    for (double u : {0.3, 2.9, 8.0}) {
      double s = 0.0;
      for (int n = -140; n <= 140; ++n) s += std::norm(volkov::summed_factor(n, eta, u, b));
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("entrance factor matches its definition") {
  const auto op = fig_point(2.9);
  const double e = volkov::channel_energy_x(4, 0.0, op);
  const Channel ch{4, 1, 1, 0};
  const auto args = field::bessel_arguments(1e-6, e, op.laser);
  const auto expected = volkov::minus_i_power(2) * bessel::j(2, args.eta) * bessel::j(1, -0.5 * args.up_local);
  CHECK(std::abs(volkov::volkov_bessel_factor(ch, 1e-6, e, op.laser) - expected) < 1e-15);
}
