// AVX2 variants of the level kernels. Compiled with -mavx2 -mno-fma and
// dispatched at runtime; each output element goes through the same IEEE
// operations as the scalar reference, so results are bit-identical.

#if RBSDE_HAVE_AVX2

#include <immintrin.h>

#include <cstddef>

namespace rbsde::kernels::detail {

void pair_half_sum_avx2(const double* in, double* out, std::size_t n_out) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n_out; i += 4) {
    __m256d a = _mm256_loadu_pd(in + 2 * i);
    __m256d b = _mm256_loadu_pd(in + 2 * i + 4);
    // hadd -> (a0+a1, b0+b1, a2+a3, b2+b3); permute to source order.
    __m256d h = _mm256_hadd_pd(a, b);
    h = _mm256_permute4x64_pd(h, 0xD8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(h, half));
  }
  for (; i < n_out; ++i) out[i] = 0.5 * (in[2 * i] + in[2 * i + 1]);
}

void expand_mul_avx2(const double* parent, const double* factor, double* out,
                     std::size_t n_parent) {
  std::size_t i = 0;
  for (; i + 4 <= n_parent; i += 4) {
    __m256d p = _mm256_loadu_pd(parent + i);
    __m256d lo = _mm256_permute4x64_pd(p, 0x50);  // p0 p0 p1 p1
    __m256d hi = _mm256_permute4x64_pd(p, 0xFA);  // p2 p2 p3 p3
    _mm256_storeu_pd(out + 2 * i, _mm256_mul_pd(lo, _mm256_loadu_pd(factor + 2 * i)));
    _mm256_storeu_pd(out + 2 * i + 4,
                     _mm256_mul_pd(hi, _mm256_loadu_pd(factor + 2 * i + 4)));
  }
  for (; i < n_parent; ++i) {
    out[2 * i] = parent[i] * factor[2 * i];
    out[2 * i + 1] = parent[i] * factor[2 * i + 1];
  }
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t j = 0; i + j < n; ++j) s[j] += x[i + j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double dot_avx2(const double* w, const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)));
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (std::size_t j = 0; i + j < n; ++j) s[j] += w[i + j] * x[i + j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

}  // namespace rbsde::kernels::detail

#endif  // RBSDE_HAVE_AVX2
