#pragma once

// Entrance and exit bra-kets between asymptotic plane waves and the
// Volkov-WKB state of one entry channel, evaluated on adaptive panels.
//
// Each panel factors the locally linear phase out of the integrand and
// integrates the remainder with Filon-Legendre weights, so fast plane-wave
// oscillations cost nothing extra. A whole band of off-shell energies is
// obtained from one panel table: the WKB phase shift is integrated exactly
// node by node and the Bessel factors are expanded to second order in the
// small argument shift; the final sum over nodes is a complex matrix product
// (see kernels.hpp).

#include <complex>
#include <span>
#include <vector>

#include "ptun/field.hpp"
#include "ptun/grid.hpp"
#include "ptun/volkov.hpp"

namespace ptun {

struct BraketValue {
  cplx value{};
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

/// M_{j, j''}(Delta E) = <entrance> * <exit> for one entry channel.
struct MatrixElement {
  cplx value{};
  cplx entrance{};
  cplx exit{};
  int j = 0;
  int j_pp = 0;
  double energy_offset = 0.0;  // J
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
  bool regularized = false;
};

struct EngineSettings {
  /// Prefactor momenta are clamped at this fraction of the incident momentum.
  /// The clamp removes the integrable 1/sqrt(P) peak of the WKB wave at a
  /// turning point; the integral it cuts off scales as clamp^1.5 relative to
  /// the O(1) bra-kets, so 1e-6 keeps it near 1e-9.
  double clamp_fraction = 1e-6;
  /// Panel acceptance: Legendre tail of each test function below this
  /// fraction of the incident-wave amplitude.
  double resolution_tolerance = 1e-12;
  /// Largest Bessel-argument shift handled by the Taylor band path; panels
  /// beyond it evaluate the Bessel factors exactly at every offset.
  double taylor_limit = 0.01;
  /// Panels whose log-amplitude is below this contribute nothing.
  double log_underflow = -690.0;
};

class ChannelEngine {
 public:
  struct Band {
    std::vector<double> offsets;  // J
    std::vector<cplx> entrance;   // [k]
    std::vector<cplx> exits;      // [r * offsets.size() + k]
    int fallback_panels = 0;
    int zone_count = 0;  // turning-point zones integrated offset by offset
  };

  struct RefinementCheck {
    cplx entrance{};
    std::vector<cplx> exits;
    double entrance_error = 0.0;
    std::vector<double> exit_errors;
    int panels = 0;
  };

  /// Entry channel j with its x-energy shifted by reference_offset; exit
  /// channels j_pp (all must be open). band_halfwidth (J) is the largest
  /// offset evaluate() will be asked for and is used to resolve the panels.
  ChannelEngine(const OperatingPoint& op, const AmplitudeGrid& grid, const TruncationBounds& bounds, int j,
                std::vector<int> exits, double band_halfwidth, double reference_offset = 0.0,
                const EngineSettings& settings = {});

  /// Bra-kets at x-energy offsets (relative to the reference) for the whole band.
  Band evaluate(std::span<const double> offsets) const;

  /// Re-evaluates at zero offset on a partition with every panel bisected and
  /// reports the differences to the base partition.
  RefinementCheck refinement_check() const;

  int j() const { return j_; }
  const std::vector<int>& exits() const { return exits_; }
  int panel_count() const { return static_cast<int>(table_.panels.size()); }
  int skipped_panel_count() const;
  bool regularized() const { return table_.regularized; }
  /// Absolute accuracy the panel acceptance test aims for (ten times the
  /// resolution tolerance, in bra-ket units): the floor of the convergence test.
  double noise_floor() const;

 private:
  struct Panel {
    double a = 0.0;
    double h = 0.0;  // half width
    double re_p_center = 0.0;
    double re_s_center = 0.0;
    double log_scale = 0.0;
    cplx s_a{}, s_b{};  // action at the panel ends
    int zone = -1;      // index into Table::zones, -1 outside
    bool skip = false;
  };
  /// Interval in which some offset of the band has a classical turning
  /// point. The band expansion does not apply there; every non-zero offset is
  /// integrated on its own adaptive panels instead.
  struct Zone {
    double a = 0.0;
    double b = 0.0;
  };
  struct ZoneResult {
    cplx entrance{};
    std::vector<cplx> exits;
    cplx s_b{};
  };
  struct Table {
    std::vector<Panel> panels;
    std::vector<Zone> zones;
    // per node, panel-major, PanelRule::kNodes per panel
    std::vector<double> x, energy_surplus, kappa, up_local;
    std::vector<cplx> p0, sqrt_p0c, b;
    bool regularized = false;
  };
  struct Sampled;

  Sampled sample_panel(double a, double b, cplx s_a, double energy) const;
  void append(Table& table, const Sampled& s) const;
  std::vector<Zone> find_zones() const;
  /// Adaptive partition of [x0, x1] for channel energy `energy` starting from
  /// action s_start; band offsets are resolved outside `zones` when `band` is set.
  Table build_adaptive(double x0, double x1, int base_panels, cplx s_start, double energy, bool band,
                       std::vector<Zone> zones) const;
  Table bisect(const Table& base) const;
  Band integrate(const Table& table, std::span<const double> offsets) const;
  ZoneResult integrate_zone(const Zone& zone, double offset, cplx s_start) const;

  OperatingPoint op_;
  AmplitudeGrid grid_;
  TruncationBounds bounds_;
  EngineSettings settings_;
  int j_;
  std::vector<int> exits_;
  std::vector<double> exit_momenta_;
  double energy_x_;
  double band_halfwidth_;
  double p_incident_;
  double clamp_floor_;
  double amplitude_scale_;
  Table table_;
};

namespace amplitude {

/// Bra-ket of the incident plane wave with entry channel ch.j at offset delta_e.
BraketValue entrance_braket(const Channel& ch, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                            const TruncationBounds& bounds);

/// Bra-ket of the outgoing plane wave of ch.j_pp with entry channel ch.j.
/// Throws std::invalid_argument when the exit channel is closed.
BraketValue exit_braket(const Channel& ch, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                        const TruncationBounds& bounds);

MatrixElement matrix_element(int j, int j_pp, double delta_e, const OperatingPoint& op, const AmplitudeGrid& grid,
                             const TruncationPolicy& policy);

}  // namespace amplitude
}  // namespace ptun
