#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ptun/baselines.hpp"
#include "ptun/units.hpp"

using namespace ptun;

namespace {

// ln T for a rectangular barrier of height u0 and width w at energy e < u0.
double rectangular_log_t(double e, double u0, double w) {
  const double kappa = std::sqrt(2.0 * units::kElectronMass * (u0 - e)) / units::kReducedPlanck;
  const double s = std::sinh(kappa * w);
  return -std::log1p(u0 * u0 * s * s / (4.0 * e * (u0 - e)));
}

// Deep-barrier limit of the same expression, free of overflow.
double rectangular_log_t_deep(double e, double u0, double w) {
  const double kappa = std::sqrt(2.0 * units::kElectronMass * (u0 - e)) / units::kReducedPlanck;
  return -2.0 * kappa * w + std::log(16.0 * e * (u0 - e) / (u0 * u0));
}

LaserConfig laser_with(double up_ev) {
  LaserConfig l;
  l.peak_ponderomotive_ev = up_ev;
  return l;
}

}  // namespace

TEST_CASE("transfer matrix reproduces the rectangular barrier") {
  const double e = units::ev_to_joule(0.5);
  const double u0 = units::ev_to_joule(1.0);
  for (double w : {0.2e-9, 1e-9, 3e-9}) {
    CAPTURE(w);
    const auto barrier = [&](double x) { return std::abs(x) < 0.5 * w ? u0 : 0.0; };
    // Slices aligned with the barrier edges: piecewise constant is exact.
    const auto t = baselines::transfer_matrix(e, barrier, -w, w, 400);
    CHECK(t.log_t == doctest::Approx(rectangular_log_t(e, u0, w)).epsilon(1e-9));
  }
  const double w = 60e-9;  // ln T about -600: far below double range
  const auto t = baselines::transfer_matrix(
      e, [&](double x) { return std::abs(x) < 0.5 * w ? u0 : 0.0; }, -w, w, 4000);
  CHECK(t.log_t == doctest::Approx(rectangular_log_t_deep(e, u0, w)).epsilon(1e-9));
  CHECK(std::isfinite(t.log10_t));
}

TEST_CASE("transfer matrix transmits fully without a potential") {
  const auto t = baselines::transfer_matrix(units::ev_to_joule(0.3), [](double) { return 0.0; }, -1e-6, 1e-6, 1000);
  CHECK(std::abs(t.log_t) < 1e-10);
}

TEST_CASE("transfer matrix rejects invalid input") {
  auto zero = [](double) { return 0.0; };
  CHECK_THROWS_AS(baselines::transfer_matrix(0.0, zero, -1.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(baselines::transfer_matrix(1e-19, zero, 1.0, -1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(baselines::transfer_matrix(1e-19, zero, -1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("exact and WKB static transmission agree for deep tunnelling") {
  const auto laser = laser_with(2.9);
  for (double e : {0.54, 1.5, 2.5, 2.85}) {
    CAPTURE(e);
    const auto exact = baselines::static_transmission_exact(e, laser);
    const auto wkb = baselines::static_transmission_wkb(e, laser);
    REQUIRE(std::abs(exact.log_t) > 50.0);
    CHECK(std::abs(exact.log_t - wkb.log_t) <= 0.05 * std::abs(exact.log_t));
    CHECK(std::abs(exact.log_t - wkb.log_t) <= 1e-6 * std::abs(exact.log_t));
    CHECK(exact.log10_t == doctest::Approx(exact.log_t / std::numbers::ln10).epsilon(1e-14));
  }
}

TEST_CASE("static transmission above the barrier") {
  const auto laser = laser_with(0.3);
  CHECK(baselines::static_transmission_wkb(0.54, laser).log_t == 0.0);
  const auto exact = baselines::static_transmission_exact(0.54, laser);
  CHECK(exact.log_t <= 1e-12);
  CHECK(exact.log_t > -1e-3);
}

TEST_CASE("turning point solves U(x) = E") {
  const auto laser = laser_with(2.9);
  const double xt = baselines::turning_point(0.54, laser);
  CHECK(field::ponderomotive_potential(xt, laser) == doctest::Approx(0.54).epsilon(1e-12));
  CHECK(std::isnan(baselines::turning_point(3.0, laser)));
  CHECK_THROWS_AS(baselines::turning_point(-1.0, laser), std::invalid_argument);
}

TEST_CASE("classical electron reflects exactly when below the barrier") {
  for (double up : {0.1, 0.3, 0.5, 0.6, 1.0, 2.9}) {
    CAPTURE(up);
    OperatingPoint op;
    op.laser.peak_ponderomotive_ev = up;
    const auto traj = baselines::classical_deflection(op);
    CHECK(traj.reflected == (op.electron.initial_energy_ev < up));
    CHECK(traj.max_energy_drift < 1e-9);
    // The electron leaves the interaction region with its initial speed.
    CHECK(std::abs(traj.final_velocity) == doctest::Approx(op.electron.velocity()).epsilon(1e-9));
    if (traj.reflected) {
      CHECK(-traj.turning_point == doctest::Approx(baselines::turning_point(0.54, op.laser)).epsilon(1e-4));
    }
  }
}
