#include <cstdlib>
#include <string_view>

#include "pcfair/simd/kernels.hpp"

namespace pcfair::simd {

namespace {

const LaneKernels& select() {
  const char* env = std::getenv("PCFA_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (want == "avx2" && avx2_kernels()) return *avx2_kernels();
  if (want == "neon" && neon_kernels()) return *neon_kernels();
  if (const auto* k = avx2_kernels()) return *k;
  if (const auto* k = neon_kernels()) return *k;
  return scalar_kernels();
}

}  // namespace

const LaneKernels& best_kernels() {
  static const LaneKernels& chosen = select();
  return chosen;
}

}  // namespace pcfair::simd
