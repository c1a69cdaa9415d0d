#include <immintrin.h>

#include "borpic/kernels.hpp"

// Compiled with -mavx2 but without -mfma so products and sums round exactly
// like the scalar reference.

namespace borpic::kernels {
namespace {

// Four rows per lane group. Lanes that have run out of entries add +0.0.
template <bool Accumulate>
void spmv_rows(CsrView a, double alpha, const double* x, double* y) {
  Index r = 0;
  const __m256d zero = _mm256_setzero_pd();
  for (; r + 4 <= a.rows; r += 4) {
    const Index* rp = a.row_ptr + r;
    __m128i start = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rp));
    __m128i stop = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rp + 1));
    __m128i len = _mm_sub_epi32(stop, start);
    int max_len = 0;
    alignas(16) int lens[4];
    _mm_store_si128(reinterpret_cast<__m128i*>(lens), len);
    for (int l = 0; l < 4; ++l) max_len = lens[l] > max_len ? lens[l] : max_len;

    __m256d acc = zero;
    for (int k = 0; k < max_len; ++k) {
      __m128i kk = _mm_set1_epi32(k);
      __m128i mask32 = _mm_cmpgt_epi32(len, kk);
      __m128i idx = _mm_add_epi32(start, kk);
      __m256d mask64 = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(mask32));
      __m256d vals = _mm256_mask_i32gather_pd(zero, a.values, idx, mask64, 8);
      __m128i cols = _mm_mask_i32gather_epi32(_mm_setzero_si128(), a.col_idx, idx, mask32, 4);
      __m256d xs = _mm256_mask_i32gather_pd(zero, x, cols, mask64, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(vals, xs));
    }
    if constexpr (Accumulate) {
      __m256d yv = _mm256_loadu_pd(y + r);
      yv = _mm256_add_pd(yv, _mm256_mul_pd(_mm256_set1_pd(alpha), acc));
      _mm256_storeu_pd(y + r, yv);
    } else {
      _mm256_storeu_pd(y + r, acc);
    }
  }
  for (; r < a.rows; ++r) {
    double acc = 0.0;
    for (Index k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.values[k] * x[a.col_idx[k]];
    if constexpr (Accumulate)
      y[r] += alpha * acc;
    else
      y[r] = acc;
  }
}

void spmv(CsrView a, const double* x, double* y) { spmv_rows<false>(a, 0.0, x, y); }
void spmv_add(CsrView a, double alpha, const double* x, double* y) {
  spmv_rows<true>(a, alpha, x, y);
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  std::size_t i = 0;
  __m256d av = _mm256_set1_pd(alpha);
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mul(std::size_t n, const double* d, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = d[i] * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table{"avx2", spmv, spmv_add, axpy, mul, dot};
  return &table;
}

}  // namespace borpic::kernels
