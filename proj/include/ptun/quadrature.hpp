#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ptun/grid.hpp"

namespace ptun::quad {

using cplx = std::complex<double>;

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

/// Legendre polynomials P_0..P_{out.size()-1} at t.
void legendre_values(double t, std::span<double> out);

/// Spherical Bessel functions j_0..j_{out.size()-1} of real argument.
void spherical_bessel(double x, std::span<double> out);

/// Fixed 16-node panel machinery shared by the channel engine: node layout,
/// the discrete Legendre transform, cumulative (indefinite) integration, and
/// Filon weights for integrands of the form g(t) exp(i theta t).
class PanelRule {
 public:
  static constexpr int kNodes = 16;
  using Row = std::array<double, kNodes>;

  static const PanelRule& instance();

  const Row& nodes() const { return nodes_; }
  const Row& weights() const { return weights_; }

  /// legendre(k, i) = (2k+1)/2 w_i P_k(t_i): maps samples to Legendre coefficients.
  double legendre(int k, int i) const { return legendre_[k][i]; }
  /// cumulative(i, m) = int_{-1}^{t_i} l_m(t) dt for the Lagrange basis l_m.
  double cumulative(int i, int m) const { return cumulative_[i][m]; }
  /// int_{-1}^{0} l_m(t) dt.
  double cumulative_center(int m) const { return cumulative_center_[m]; }

  /// Weights w_i(theta) with sum_i w_i g(t_i) = int_{-1}^{1} p(t) e^{i theta t} dt,
  /// p the degree-15 interpolant of g.
  void filon_weights(double theta, std::span<cplx, kNodes> out) const;

  /// Relative size of the two highest Legendre coefficients of the samples.
  /// Small values mean the panel resolves the function.
  double tail_ratio(std::span<const cplx, kNodes> samples) const;

 private:
  PanelRule();
  Row nodes_{};
  Row weights_{};
  std::array<Row, kNodes> legendre_{};
  std::array<Row, kNodes> cumulative_{};
  Row cumulative_center_{};
};

struct OscillatoryResult {
  cplx value{};
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Composite 16-point Gauss-Legendre over [grid.x_min, grid.x_max] with global
/// panel halving until successive estimates agree to grid.convergence_tol
/// (relative), or grid.refinement_limit halvings have been spent.
OscillatoryResult oscillatory_integral(const std::function<cplx(double)>& integrand,
                                       const AmplitudeGrid& grid);

}  // namespace ptun::quad
