#include "doctest.h"

#include <cmath>
#include <vector>

#include "ptun/amplitude.hpp"
#include "ptun/field.hpp"
#include "ptun/kernels.hpp"
#include "ptun/oracle.hpp"
#include "ptun/volkov.hpp"

using namespace ptun;

namespace {

OperatingPoint point(double up_ev, double e0_ev = 0.54) {
  OperatingPoint op;
  op.laser.peak_ponderomotive_ev = up_ev;
  op.electron.initial_energy_ev = e0_ev;
  return op;
}

oracle::Brakets brute_force(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationBounds& bounds,
                            int j, int j_pp) {
  return oracle::brute_force(op, grid, bounds, j, j_pp);
}

void check_close(cplx value, cplx reference, double rel, double abs_floor) {
  CHECK(std::abs(value - reference) <= rel * std::abs(reference) + abs_floor);
}

}  // namespace

TEST_CASE("free passage bra-kets are unity") {
  const auto op = point(0.0);
  const AmplitudeGrid grid;
  const ChannelEngine engine(op, grid, TruncationBounds{}, 0, {0}, 0.0);
  const std::vector<double> offsets{0.0};
  const auto band = engine.evaluate(offsets);
  // The WKB phase is measured from the left edge, so each factor carries a
  // phase that cancels in the product.
  CHECK(std::abs(std::abs(band.entrance[0]) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(band.exits[0]) - 1.0) < 1e-12);
  CHECK(std::abs(band.entrance[0] * band.exits[0] - 1.0) < 1e-12);
}

TEST_CASE("bra-kets agree with a brute-force quadrature above the barrier") {
  const auto op = point(0.3);
  const AmplitudeGrid grid;
  const auto bounds = volkov::truncation_bounds(op, grid, 10, 10);
  for (int j : {0, 1, -1}) {
    for (int jpp : {0, 1, 2}) {
      CAPTURE(j);
      CAPTURE(jpp);
      const Channel ch{j, jpp, 0, 0};
      const auto in = amplitude::entrance_braket(ch, 0.0, op, grid, bounds);
      const auto out = amplitude::exit_braket(ch, 0.0, op, grid, bounds);
      const auto oracle = brute_force(op, grid, bounds, j, jpp);
      CHECK(in.converged);
      CHECK(out.converged);
      check_close(in.value, oracle.entrance, 1e-6, 1e-12);
      check_close(out.value, oracle.exit, 1e-6, 1e-12);
    }
  }
}

TEST_CASE("bra-kets agree with a brute-force quadrature for a tunnelling channel") {
  const auto op = point(1.0);
  const AmplitudeGrid grid;
  const auto bounds = volkov::truncation_bounds(op, grid, 10, 10);
  for (int j : {0, 1, 2}) {
    CAPTURE(j);
    const Channel ch{j, 1, 0, 0};
    const auto in = amplitude::entrance_braket(ch, 0.0, op, grid, bounds);
    const auto out = amplitude::exit_braket(ch, 0.0, op, grid, bounds);
    const auto oracle = brute_force(op, grid, bounds, j, 1);
    check_close(in.value, oracle.entrance, 1e-6, 1e-12);
    check_close(out.value, oracle.exit, 1e-6, 1e-12);
  }
}

TEST_CASE("band expansion matches exact evaluation at each offset") {
  // U_p = 1 eV: channel 0 tunnels, so its turning points move through the band.
  const auto op = point(1.0);
  const AmplitudeGrid grid;
  const TruncationPolicy policy;
  const auto bounds = volkov::truncation_bounds(op, grid, policy.margin_1, policy.margin_2);
  const double eps = op.epsilon();
  const double half = grid.energy_band_halfwidth * eps;
  const std::vector<double> offsets{-half, -3.0 * eps, 0.0, 0.5 * eps, 7.0 * eps, half};
  for (int j : {0, 1, 2}) {
    const ChannelEngine engine(op, grid, bounds, j, {1}, half);
    if (j == 0) CHECK(engine.evaluate(offsets).zone_count > 0);
    const auto band = engine.evaluate(offsets);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      CAPTURE(j);
      CAPTURE(k);
      const auto exact = amplitude::matrix_element(j, 1, offsets[k], op, grid, policy);
      check_close(band.entrance[k], exact.entrance, 1e-8, engine.noise_floor());
      check_close(band.exits[k], exact.exit, 1e-8, engine.noise_floor());
    }
  }
}

TEST_CASE("scalar and AVX2 contractions give the same bra-kets") {
  const auto op = point(1.0);
  const AmplitudeGrid grid;
  const auto bounds = volkov::truncation_bounds(op, grid, 10, 10);
  const double eps = op.epsilon();
  std::vector<double> offsets;
  for (int k = -10; k <= 10; ++k) offsets.push_back(k * eps);
  const ChannelEngine engine(op, grid, bounds, 1, {0, 1, 2}, 10.0 * eps);
  kernels::force_isa(kernels::Isa::scalar);
  const auto scalar = engine.evaluate(offsets);
  kernels::reset_isa();
  if (kernels::active_isa() != kernels::Isa::avx2) {
    MESSAGE("AVX2 not available; comparison skipped");
    return;
  }
  kernels::force_isa(kernels::Isa::avx2);
  const auto simd = engine.evaluate(offsets);
  kernels::reset_isa();
  for (std::size_t k = 0; k < offsets.size(); ++k) check_close(simd.entrance[k], scalar.entrance[k], 1e-13, 1e-16);
  for (std::size_t i = 0; i < simd.exits.size(); ++i) check_close(simd.exits[i], scalar.exits[i], 1e-13, 1e-16);
}

TEST_CASE("closed exit channels are rejected") {
  const auto op = point(1.0);
  const AmplitudeGrid grid;
  CHECK_THROWS_AS(ChannelEngine(op, grid, TruncationBounds{}, 0, {-1}, 0.0), std::invalid_argument);
}

TEST_CASE("refinement check reports small errors") {
  const auto op = point(1.0);
  const AmplitudeGrid grid;
  const auto bounds = volkov::truncation_bounds(op, grid, 10, 10);
  const ChannelEngine engine(op, grid, bounds, 0, {0, 1}, 0.0);
  const auto check = engine.refinement_check();
  CHECK(check.entrance_error <= std::max(1e-6 * std::abs(check.entrance), engine.noise_floor()));
  for (std::size_t r = 0; r < check.exits.size(); ++r)
    CHECK(check.exit_errors[r] <= std::max(1e-6 * std::abs(check.exits[r]), engine.noise_floor()));
  CHECK(engine.panel_count() >= grid.base_panel_count);
}
