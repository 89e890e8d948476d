#include "doctest.h"

#include <cmath>
#include <vector>

#include "ptun/rate.hpp"
#include "ptun/units.hpp"

using namespace ptun;

namespace {

OperatingPoint point(double up_ev) {
  OperatingPoint op;
  op.laser.peak_ponderomotive_ev = up_ev;
  return op;
}

RateOptions quick_options() {
  RateOptions o;
  o.mode = SpectralMode::onshell;
  o.policy.auto_double = false;
  return o;
}

}  // namespace

TEST_CASE("spectral weight is a complex Lorentzian") {
  const double eps = 2.0;
  CHECK(rate::spectral_weight(0.0, eps) == cplx(1.0, 0.0));
  for (double de : {-5.0, -1.0, 0.5, 3.0}) {
    const cplx w = rate::spectral_weight(de, eps);
    CHECK(w.real() == doctest::Approx(eps * eps / (de * de + eps * eps)).epsilon(1e-15));
    CHECK(w.imag() == doctest::Approx(eps * de / (de * de + eps * eps)).epsilon(1e-15));
    // w = eps / (eps - i dE)
    CHECK(std::abs(w - eps / cplx(eps, -de)) < 1e-15);
  }
  CHECK_THROWS_AS(rate::spectral_weight(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("band quadrature is symmetric with an exact zero centre") {
  const auto op = point(1.0);
  RateOptions o;
  const auto q = rate::band_quadrature(op, o);
  REQUIRE(q.offsets.size() == 201);
  CHECK(q.offsets[100] == 0.0);
  CHECK(q.offsets.back() == doctest::Approx(10.0 * op.epsilon()).epsilon(1e-14));
  for (std::size_t k = 0; k < q.offsets.size(); ++k) {
    CHECK(q.offsets[k] == -q.offsets[q.offsets.size() - 1 - k]);
    CHECK(q.weights[k] == std::conj(q.weights[q.offsets.size() - 1 - k]));
  }
  o.mode = SpectralMode::onshell;
  const auto single = rate::band_quadrature(op, o);
  CHECK(single.offsets == std::vector<double>{0.0});
}

TEST_CASE("free passage gives the rate 4 / T and no inelastic lines") {
  for (auto mode : {SpectralMode::onshell, SpectralMode::band}) {
    RateOptions o;
    o.mode = mode;
    const auto op = point(0.0);
    const auto s = rate::energy_spectrum(op, o);
    const ChannelRate* elastic = s.find(0);
    REQUIRE(elastic != nullptr);
    CHECK(std::abs(elastic->amplitude - 1.0) < 1e-12);
    CHECK(elastic->rate == doctest::Approx(4.0 / op.transit_time()).epsilon(1e-6));
    double inelastic = 0.0;
    for (const auto& l : s.lines)
      if (l.j_pp != 0) inelastic += l.rate;
    CHECK(inelastic < 1e-10);
    CHECK(s.quadrature_converged);
    CHECK(s.truncation_converged);
  }
}

TEST_CASE("spectrum lines have exact energies and momenta") {
  const auto op = point(0.3);
  const auto s = rate::spectrum_at_margins(op, quick_options(), 4, 4);
  REQUIRE(!s.lines.empty());
  const double hw = op.laser.photon_energy_ev();
  for (const auto& l : s.lines) {
    CHECK(l.final_energy_ev == op.electron.initial_energy_ev + l.j_pp * hw);
    CHECK(l.p_zf == l.j_pp * op.laser.photon_momentum());
    CHECK(std::isfinite(l.rate));
    CHECK(l.rate >= 0.0);
  }
  // Channels below the electron energy minus one photon are closed.
  CHECK(s.find(-1) == nullptr);
}

TEST_CASE("results do not depend on the thread count") {
  const auto op = point(0.3);
  auto o = quick_options();
  o.threads = 1;
  const auto one = rate::spectrum_at_margins(op, o, 4, 4);
  o.threads = 3;
  const auto three = rate::spectrum_at_margins(op, o, 4, 4);
  REQUIRE(one.lines.size() == three.lines.size());
  for (std::size_t i = 0; i < one.lines.size(); ++i) {
    CHECK(one.lines[i].amplitude == three.lines[i].amplitude);
    CHECK(one.lines[i].rate == three.lines[i].rate);
  }
}

TEST_CASE("diffraction distribution lists closed channels with zero rate") {
  const auto op = point(0.3);
  auto o = quick_options();
  o.policy.margin_1 = 4;
  o.policy.margin_2 = 4;
  const auto d = rate::diffraction_distribution(op, o);
  REQUIRE(!d.empty());
  CHECK(d.front().j_pp == -d.back().j_pp);
  bool saw_closed = false;
  for (const auto& l : d) {
    if (!l.open) {
      saw_closed = true;
      CHECK(l.rate == 0.0);
    }
  }
  CHECK(saw_closed);
}

TEST_CASE("resonance sweep validates its ratios") {
  const auto op = point(0.3);
  const std::vector<double> bad{-0.5};
  CHECK_THROWS_AS(rate::resonance_sweep(op, bad, quick_options()), std::invalid_argument);
}
