#include "pcfair/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace pcfair::simd {
namespace {

void fill(double* dst, double value, std::size_t n) {
  const float64x2_t v = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, v);
  for (; i < n; ++i) dst[i] = value;
}

void multiply(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
  for (; i < n; ++i) dst[i] *= src[i];
}

void accumulate(double* dst, double weight, const double* src, std::size_t n) {
  const float64x2_t w = vdupq_n_f64(weight);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t p = vmulq_f64(w, vld1q_f64(src + i));  // not vfmaq: match scalar rounding
    vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), p));
  }
  for (; i < n; ++i) dst[i] += weight * src[i];
}

void indicator(double* dst, const std::int32_t* observed, std::int32_t value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (observed[i] < 0 || observed[i] == value) ? 1.0 : 0.0;
}

constexpr LaneKernels kNeon{Isa::Neon, "neon", fill, multiply, accumulate, indicator};

}  // namespace

const LaneKernels* neon_kernels() { return &kNeon; }

}  // namespace pcfair::simd

#else

namespace pcfair::simd {
const LaneKernels* neon_kernels() { return nullptr; }
}  // namespace pcfair::simd

#endif
