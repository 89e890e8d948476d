#include <immintrin.h>

#include "ptun/kernels.hpp"

namespace ptun::kernels {

namespace {

// Two rows by eight columns per register tile: 8 accumulators, 4 loads and 4
// broadcasts stay inside the 16 ymm registers.
inline void tile_2x8(const ContractArgs& g, std::size_t r, std::size_t k) {
  __m256d re00 = _mm256_setzero_pd(), im00 = _mm256_setzero_pd();
  __m256d re01 = _mm256_setzero_pd(), im01 = _mm256_setzero_pd();
  __m256d re10 = _mm256_setzero_pd(), im10 = _mm256_setzero_pd();
  __m256d re11 = _mm256_setzero_pd(), im11 = _mm256_setzero_pd();
  const double* a0r = g.a_re + r * g.depth;
  const double* a0i = g.a_im + r * g.depth;
  const double* a1r = a0r + g.depth;
  const double* a1i = a0i + g.depth;
  for (std::size_t m = 0; m < g.depth; ++m) {
    const double* vr = g.v_re + m * g.cols + k;
    const double* vi = g.v_im + m * g.cols + k;
    const __m256d vr0 = _mm256_loadu_pd(vr), vr1 = _mm256_loadu_pd(vr + 4);
    const __m256d vi0 = _mm256_loadu_pd(vi), vi1 = _mm256_loadu_pd(vi + 4);
    const __m256d ar0 = _mm256_broadcast_sd(a0r + m), ai0 = _mm256_broadcast_sd(a0i + m);
    const __m256d ar1 = _mm256_broadcast_sd(a1r + m), ai1 = _mm256_broadcast_sd(a1i + m);
    re00 = _mm256_fnmadd_pd(ai0, vi0, _mm256_fmadd_pd(ar0, vr0, re00));
    im00 = _mm256_fmadd_pd(ai0, vr0, _mm256_fmadd_pd(ar0, vi0, im00));
    re01 = _mm256_fnmadd_pd(ai0, vi1, _mm256_fmadd_pd(ar0, vr1, re01));
    im01 = _mm256_fmadd_pd(ai0, vr1, _mm256_fmadd_pd(ar0, vi1, im01));
    re10 = _mm256_fnmadd_pd(ai1, vi0, _mm256_fmadd_pd(ar1, vr0, re10));
    im10 = _mm256_fmadd_pd(ai1, vr0, _mm256_fmadd_pd(ar1, vi0, im10));
    re11 = _mm256_fnmadd_pd(ai1, vi1, _mm256_fmadd_pd(ar1, vr1, re11));
    im11 = _mm256_fmadd_pd(ai1, vr1, _mm256_fmadd_pd(ar1, vi1, im11));
  }
  double* o0r = g.out_re + r * g.cols + k;
  double* o0i = g.out_im + r * g.cols + k;
  double* o1r = o0r + g.cols;
  double* o1i = o0i + g.cols;
  _mm256_storeu_pd(o0r, _mm256_add_pd(_mm256_loadu_pd(o0r), re00));
  _mm256_storeu_pd(o0r + 4, _mm256_add_pd(_mm256_loadu_pd(o0r + 4), re01));
  _mm256_storeu_pd(o0i, _mm256_add_pd(_mm256_loadu_pd(o0i), im00));
  _mm256_storeu_pd(o0i + 4, _mm256_add_pd(_mm256_loadu_pd(o0i + 4), im01));
  _mm256_storeu_pd(o1r, _mm256_add_pd(_mm256_loadu_pd(o1r), re10));
  _mm256_storeu_pd(o1r + 4, _mm256_add_pd(_mm256_loadu_pd(o1r + 4), re11));
  _mm256_storeu_pd(o1i, _mm256_add_pd(_mm256_loadu_pd(o1i), im10));
  _mm256_storeu_pd(o1i + 4, _mm256_add_pd(_mm256_loadu_pd(o1i + 4), im11));
}

inline void row_x4(const ContractArgs& g, std::size_t r, std::size_t k) {
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  const double* ar = g.a_re + r * g.depth;
  const double* ai = g.a_im + r * g.depth;
  for (std::size_t m = 0; m < g.depth; ++m) {
    const __m256d vr = _mm256_loadu_pd(g.v_re + m * g.cols + k);
    const __m256d vi = _mm256_loadu_pd(g.v_im + m * g.cols + k);
    const __m256d br = _mm256_broadcast_sd(ar + m), bi = _mm256_broadcast_sd(ai + m);
    re = _mm256_fnmadd_pd(bi, vi, _mm256_fmadd_pd(br, vr, re));
    im = _mm256_fmadd_pd(bi, vr, _mm256_fmadd_pd(br, vi, im));
  }
  double* orp = g.out_re + r * g.cols + k;
  double* oip = g.out_im + r * g.cols + k;
  _mm256_storeu_pd(orp, _mm256_add_pd(_mm256_loadu_pd(orp), re));
  _mm256_storeu_pd(oip, _mm256_add_pd(_mm256_loadu_pd(oip), im));
}

inline void row_scalar(const ContractArgs& g, std::size_t r, std::size_t k) {
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < g.depth; ++m) {
    const double ar = g.a_re[r * g.depth + m], ai = g.a_im[r * g.depth + m];
    const double vr = g.v_re[m * g.cols + k], vi = g.v_im[m * g.cols + k];
    re += ar * vr - ai * vi;
    im += ar * vi + ai * vr;
  }
  g.out_re[r * g.cols + k] += re;
  g.out_im[r * g.cols + k] += im;
}

}  // namespace

void contract_avx2(const ContractArgs& g) {
  const std::size_t k8 = g.cols - g.cols % 8;
  const std::size_t k4 = g.cols - g.cols % 4;
  const std::size_t r2 = g.rows - g.rows % 2;
  for (std::size_t r = 0; r < r2; r += 2) {
    for (std::size_t k = 0; k < k8; k += 8) tile_2x8(g, r, k);
    for (std::size_t rr = r; rr < r + 2; ++rr) {
      for (std::size_t k = k8; k < k4; k += 4) row_x4(g, rr, k);
      for (std::size_t k = k4; k < g.cols; ++k) row_scalar(g, rr, k);
    }
  }
  for (std::size_t r = r2; r < g.rows; ++r) {
    for (std::size_t k = 0; k < k4; k += 4) row_x4(g, r, k);
    for (std::size_t k = k4; k < g.cols; ++k) row_scalar(g, r, k);
  }
}

}  // namespace ptun::kernels
