#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ptun/field.hpp"
#include "ptun/units.hpp"

using namespace ptun;

TEST_CASE("photon energy and momentum at 1.064 um") {
  CHECK(units::photon_energy(1.064e-6) == doctest::Approx(1.16527).epsilon(5e-6));
  CHECK(units::photon_momentum(1.064e-6) == doctest::Approx(6.2275e-28).epsilon(1e-4));
  CHECK(units::recoil_energy(1.064e-6) == doctest::Approx(1.3286e-6).epsilon(1e-4));
}

TEST_CASE("infinite wavelength carries no momentum") {
  CHECK(units::photon_momentum(INFINITY) == 0.0);
  CHECK(units::photon_energy(INFINITY) == 0.0);
}

TEST_CASE("non-positive wavelength is rejected") {
  CHECK_THROWS_AS(units::photon_energy(0.0), std::invalid_argument);
  CHECK_THROWS_AS(units::photon_momentum(-1e-6), std::invalid_argument);
  CHECK_THROWS_AS(units::recoil_energy(std::nan("")), std::invalid_argument);
}

TEST_CASE("conversions round-trip") {
  for (double v : {1e-30, 0.54, 2.9, 1e5}) {
    CHECK(units::joule_to_ev(units::ev_to_joule(v)) == doctest::Approx(v).epsilon(1e-15));
    CHECK(units::m_to_um(units::um_to_m(v)) == doctest::Approx(v).epsilon(1e-15));
  }
  CHECK(units::fs_to_s(1.0) == 1e-15);
  CHECK(PhysicalConstants::codata2018().reduced_planck == units::kReducedPlanck);
}

TEST_CASE("electron kinematics and interaction time at 0.54 eV") {
  OperatingPoint op;
  op.electron.initial_energy_ev = 0.54;
  op.laser.sigma = 6e-6;
  CHECK(op.electron.velocity() == doctest::Approx(4.358e5).epsilon(1e-3));
  CHECK(op.transit_time() == doctest::Approx(2.753e-11).epsilon(1e-3));
  op.transit = TransitTime::paper();
  CHECK(op.transit_time() == 6.9e-11);
  op.transit = TransitTime::explicit_value(1e-12);
  CHECK(op.epsilon() == doctest::Approx(units::kReducedPlanck / 1e-12));
}
