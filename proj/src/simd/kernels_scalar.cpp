#include "pcfair/simd/kernels.hpp"

namespace pcfair::simd {
namespace {

void fill(double* dst, double value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = value;
}

void multiply(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] *= src[i];
}

void accumulate(double* dst, double weight, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += weight * src[i];
}

void indicator(double* dst, const std::int32_t* observed, std::int32_t value, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (observed[i] < 0 || observed[i] == value) ? 1.0 : 0.0;
}

constexpr LaneKernels kScalar{Isa::Scalar, "scalar", fill, multiply, accumulate, indicator};

}  // namespace

const LaneKernels& scalar_kernels() { return kScalar; }

}  // namespace pcfair::simd
