#include "ptun/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

namespace ptun::bessel {

namespace {

std::string overflow_message(int order, cplx z) {
  std::ostringstream os;
  os << "Bessel J_" << order << " overflows at z = (" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

inline double imag_part(double) { return 0.0; }
inline double imag_part(cplx z) { return z.imag(); }

template <typename T>
void miller_ladder(T z, std::span<T> out) {
  if (out.empty()) return;
  const int n_max = static_cast<int>(out.size()) - 1;
  const double a = std::abs(z);
  if (a == 0.0) {
    std::fill(out.begin(), out.end(), T{});
    out[0] = T{1.0};
    return;
  }
  if (std::abs(imag_part(z)) > 700.0) throw BesselOverflow(n_max, cplx(z));

  const double reach = std::max(static_cast<double>(n_max), a);
  int start = static_cast<int>(reach) + 24 + static_cast<int>(std::sqrt(40.0 * reach));
  start += start % 2;

  constexpr double kBig = 1e250;
  constexpr double kRescale = 1e-250;
  const T two_over_z = T{2.0} / z;

  std::fill(out.begin(), out.end(), T{});
  T next{};         // J_{k+1}
  T current{1e-30};  // J_k
  T sum_ones{};      // J_0 + 2 sum J_{2k}      = 1
  T sum_cos{};       // J_0 + 2 sum (-1)^k J_2k = cos z
  for (int k = start; k >= 1; --k) {
    if (k <= n_max) out[static_cast<std::size_t>(k)] = current;
    if (k % 2 == 0) {
      sum_ones += 2.0 * current;
      sum_cos += ((k / 2) % 2 == 0 ? 2.0 : -2.0) * current;
    }
    const T previous = two_over_z * static_cast<double>(k) * current - next;
    next = current;
    current = previous;
    if (std::abs(current) > kBig) {
      current *= kRescale;
      next *= kRescale;
      sum_ones *= kRescale;
      sum_cos *= kRescale;
      for (int i = k; i <= n_max; ++i) out[static_cast<std::size_t>(i)] *= kRescale;
    }
  }
  out[0] = current;
  sum_ones += current;
  sum_cos += current;

  T scale;
  if constexpr (std::is_same_v<T, double>) {
    scale = 1.0 / sum_ones;
  } else {
    scale = std::abs(z.imag()) <= 1.0 ? T{1.0} / sum_ones : std::cos(z) / sum_cos;
  }
  for (auto& v : out) v *= scale;
}

}  // namespace

BesselOverflow::BesselOverflow(int order, cplx argument)
    : std::overflow_error(overflow_message(order, argument)), order_(order), argument_(argument) {}

void j_ladder(double z, std::span<double> out) { miller_ladder<double>(z, out); }
void j_ladder(cplx z, std::span<cplx> out) { miller_ladder<cplx>(z, out); }

double j(int n, double z) {
  const int order = std::abs(n);
  std::vector<double> ladder(static_cast<std::size_t>(order) + 1);
  j_ladder(z, ladder);
  const double v = ladder.back();
  return (n < 0 && order % 2 == 1) ? -v : v;
}

cplx j(int n, cplx z) {
  const int order = std::abs(n);
  std::vector<cplx> ladder(static_cast<std::size_t>(order) + 1);
  j_ladder(z, ladder);
  const cplx v = ladder.back();
  return (n < 0 && order % 2 == 1) ? -v : v;
}

cplx j_series(int n, cplx z) {
  const int order = std::abs(n);
  const cplx half = 0.5 * z;
  const cplx q = -half * half;
  // (z/2)^n / n!
  cplx lead{1.0};
  for (int i = 1; i <= order; ++i) lead *= half / static_cast<double>(i);
  cplx term = lead;
  cplx sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum) && std::abs(term) <= 1e-300 + 1e-18 * std::abs(lead))
      break;
  }
  return (n < 0 && order % 2 == 1) ? -sum : sum;
}

int significant_order(double abs_z) {
  if (abs_z == 0.0) return 0;
  int n = static_cast<int>(std::ceil(abs_z)) + 1;
  // |J_n(a)| <= (e a / 2n)^n / sqrt(2 pi n) for n > a.
  for (;; ++n) {
    const double log_bound = n * std::log(std::exp(1.0) * abs_z / (2.0 * n)) -
                             0.5 * std::log(2.0 * std::numbers::pi * n);
    if (log_bound < std::log(1e-18)) return n;
  }
}

template <typename T>
void SymmetricLadder<T>::evaluate(T z) {
  scratch_.resize(static_cast<std::size_t>(max_order_) + 1);
  j_ladder(z, std::span<T>(scratch_));
  for (int n = 0; n <= max_order_; ++n) {
    const T v = scratch_[static_cast<std::size_t>(n)];
    values_[static_cast<std::size_t>(max_order_ + n)] = v;
    values_[static_cast<std::size_t>(max_order_ - n)] = (n % 2 == 1) ? -v : v;
  }
}

template class SymmetricLadder<double>;
template class SymmetricLadder<cplx>;

}  // namespace ptun::bessel
