#pragma once

// Complex matrix-product kernel behind the off-shell band contraction:
//   out[r][k] += sum_m a[r][m] * v[m][k]
// with split real / imaginary storage, row-major. A portable scalar version is
// always available; an AVX2+FMA version is selected at run time when the CPU
// supports it. Setting PTUN_FORCE_SCALAR=1 in the environment pins the scalar
// path.

#include <cstddef>
#include <string_view>

namespace ptun::kernels {

struct ContractArgs {
  const double* a_re;
  const double* a_im;
  std::size_t rows;   // r
  std::size_t depth;  // m
  const double* v_re;
  const double* v_im;
  std::size_t cols;  // k
  double* out_re;
  double* out_im;
};

enum class Isa { scalar, avx2 };

void contract_scalar(const ContractArgs& args);
/// Only call when avx2_available() is true.
void contract_avx2(const ContractArgs& args);

bool avx2_available();
/// The implementation used by contract(): avx2 when available and not
/// overridden.
Isa active_isa();
/// Override for tests and benchmarks; reset_isa() restores the detected choice.
void force_isa(Isa isa);
void reset_isa();
std::string_view isa_name(Isa isa);

void contract(const ContractArgs& args);

}  // namespace ptun::kernels
