#pragma once

// Lane-parallel kernels used by the batched circuit evaluator. Each kernel
// processes `n` independent lanes (one evidence vector per lane).
//
// All variants perform the same IEEE operations in the same order as the
// scalar reference (no fused multiply-add), so results are bit-identical.

#include <cstddef>
#include <cstdint>

namespace pcfair::simd {

enum class Isa { Scalar, Avx2, Neon };

struct LaneKernels {
  Isa isa;
  const char* name;
  /// dst[i] = value
  void (*fill)(double* dst, double value, std::size_t n);
  /// dst[i] *= src[i]
  void (*multiply)(double* dst, const double* src, std::size_t n);
  /// dst[i] += weight * src[i]
  void (*accumulate)(double* dst, double weight, const double* src, std::size_t n);
  /// dst[i] = (observed[i] < 0 || observed[i] == value) ? 1 : 0
  void (*indicator)(double* dst, const std::int32_t* observed, std::int32_t value, std::size_t n);
};

const LaneKernels& scalar_kernels();

/// nullptr when not compiled in or not supported by the running CPU.
const LaneKernels* avx2_kernels();
const LaneKernels* neon_kernels();

/// Widest supported variant. The PCFA_SIMD environment variable
/// (scalar|avx2|neon) overrides the choice when that variant is available.
const LaneKernels& best_kernels();

}  // namespace pcfair::simd
