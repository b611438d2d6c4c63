#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcfair/circuit.hpp"
#include "pcfair/simd/kernels.hpp"

namespace pcfair {

/// Evidence for many queries at once, stored variable-major so the lanes of
/// one variable are contiguous.
class EvidenceBatch {
 public:
  EvidenceBatch(int variables, std::size_t lanes)
      : vars_(variables), lanes_(lanes), data_(static_cast<std::size_t>(variables) * lanes, -1) {}

  int variables() const { return vars_; }
  std::size_t lanes() const { return lanes_; }

  void set(std::size_t lane, VarIndex v, int value) { data_[static_cast<std::size_t>(v) * lanes_ + lane] = value; }
  int get(std::size_t lane, VarIndex v) const { return data_[static_cast<std::size_t>(v) * lanes_ + lane]; }
  void set_lane(std::size_t lane, const Evidence& ev);
  const std::int32_t* row(VarIndex v) const { return data_.data() + static_cast<std::size_t>(v) * lanes_; }

 private:
  int vars_;
  std::size_t lanes_;
  std::vector<std::int32_t> data_;
};

/// Evaluates a circuit on a batch of evidence vectors, node by node, with the
/// per-node lane loops running through a LaneKernels table. Holds scratch
/// space, so one instance per thread.
class BatchEvaluator {
 public:
  static constexpr std::size_t kChunk = 64;

  explicit BatchEvaluator(const Circuit& c, const simd::LaneKernels& kernels = simd::best_kernels());

  /// Unnormalized root value per lane.
  void evaluate_raw(const EvidenceBatch& batch, std::span<double> out);
  /// P(e) per lane.
  void marginals(const EvidenceBatch& batch, std::span<double> out);

  const simd::LaneKernels& kernels() const { return kernels_; }

 private:
  const Circuit& circuit_;
  const simd::LaneKernels& kernels_;
  std::vector<double> scratch_;
};

}  // namespace pcfair
