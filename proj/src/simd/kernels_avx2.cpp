// Compiled with -mavx2 (see src/CMakeLists.txt). Only reached after a
// runtime CPU check in avx2_kernels().

#include "pcfair/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace pcfair::simd {
namespace {

void fill(double* dst, double value, std::size_t n) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, v);
  for (; i < n; ++i) dst[i] = value;
}

void multiply(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d a0 = _mm256_loadu_pd(dst + i);
    __m256d a1 = _mm256_loadu_pd(dst + i + 4);
    a0 = _mm256_mul_pd(a0, _mm256_loadu_pd(src + i));
    a1 = _mm256_mul_pd(a1, _mm256_loadu_pd(src + i + 4));
    _mm256_storeu_pd(dst + i, a0);
    _mm256_storeu_pd(dst + i + 4, a1);
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] *= src[i];
}

void accumulate(double* dst, double weight, const double* src, std::size_t n) {
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    // mul then add, never fused: keeps rounding identical to the scalar path
    __m256d p0 = _mm256_mul_pd(w, _mm256_loadu_pd(src + i));
    __m256d p1 = _mm256_mul_pd(w, _mm256_loadu_pd(src + i + 4));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), p0));
    _mm256_storeu_pd(dst + i + 4, _mm256_add_pd(_mm256_loadu_pd(dst + i + 4), p1));
  }
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_mul_pd(w, _mm256_loadu_pd(src + i));
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), p));
  }
  for (; i < n; ++i) dst[i] += weight * src[i];
}

void indicator(double* dst, const std::int32_t* observed, std::int32_t value, std::size_t n) {
  const __m128i target = _mm_set1_epi32(value);
  const __m128i zero = _mm_setzero_si128();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i obs = _mm_loadu_si128(reinterpret_cast<const __m128i*>(observed + i));
    const __m128i hit = _mm_or_si128(_mm_cmpeq_epi32(obs, target), _mm_cmplt_epi32(obs, zero));
    const __m256d mask = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(hit));
    _mm256_storeu_pd(dst + i, _mm256_and_pd(mask, one));
  }
  for (; i < n; ++i) dst[i] = (observed[i] < 0 || observed[i] == value) ? 1.0 : 0.0;
}

constexpr LaneKernels kAvx2{Isa::Avx2, "avx2", fill, multiply, accumulate, indicator};

}  // namespace

const LaneKernels* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace pcfair::simd

#else

namespace pcfair::simd {
const LaneKernels* avx2_kernels() { return nullptr; }
}  // namespace pcfair::simd

#endif
