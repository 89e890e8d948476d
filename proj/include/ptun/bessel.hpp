#pragma once

// Integer-order Bessel functions of the first kind for real and complex
// argument. The production path fills a whole order ladder J_0..J_N in one
// backward (Miller) recurrence; the ascending power series is kept as an
// independent check for moderate |z|.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptun::bessel {

using cplx = std::complex<double>;

/// Raised when |Im z| is so large that J_n(z) overflows a double.
class BesselOverflow : public std::overflow_error {
 public:
  BesselOverflow(int order, cplx argument);
  int order() const noexcept { return order_; }
  cplx argument() const noexcept { return argument_; }

 private:
  int order_;
  cplx argument_;
};

/// Fills out[n] = J_n(z) for n = 0 .. out.size()-1.
void j_ladder(double z, std::span<double> out);
void j_ladder(cplx z, std::span<cplx> out);

/// Single order, negative orders through J_{-n} = (-1)^n J_n.
double j(int n, double z);
cplx j(int n, cplx z);

/// Ascending series sum_k (-z^2/4)^k / (k! (n+k)!) * (z/2)^n. Accurate to a
/// few ulps times e^{|z|} / |J_n| cancellation; intended for |z| <= 12.
cplx j_series(int n, cplx z);

/// Order needed before J_n(z) drops below ~1e-17 relative to the ladder peak.
int significant_order(double abs_z);

/// Ladder J_{-N}..J_{N} stored with an offset so that at(n) works for |n| <= N.
template <typename T>
class SymmetricLadder {
 public:
  SymmetricLadder() = default;
  explicit SymmetricLadder(int max_order) { resize(max_order); }

  void resize(int max_order) {
    max_order_ = max_order;
    values_.assign(2 * static_cast<std::size_t>(max_order) + 1, T{});
  }
  /// Evaluates J_n(z) for |n| <= max_order.
  void evaluate(T z);

  int max_order() const noexcept { return max_order_; }
  const T& at(int n) const { return values_[static_cast<std::size_t>(n + max_order_)]; }
  /// Zero outside the stored range; the caller sizes the ladder so that these
  /// orders are below double precision.
  T at_or_zero(int n) const {
    return (n < -max_order_ || n > max_order_) ? T{} : at(n);
  }

 private:
  int max_order_ = 0;
  std::vector<T> values_;
  std::vector<T> scratch_;
};

}  // namespace ptun::bessel
