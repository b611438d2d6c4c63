#include "pcfair/batch_eval.hpp"

#include <algorithm>

#include "pcfair/error.hpp"

namespace pcfair {

void EvidenceBatch::set_lane(std::size_t lane, const Evidence& ev) {
  for (int v = 0; v < vars_; ++v) set(lane, v, ev[v]);
}

BatchEvaluator::BatchEvaluator(const Circuit& c, const simd::LaneKernels& kernels)
    : circuit_(c), kernels_(kernels), scratch_(static_cast<std::size_t>(c.size()) * kChunk) {}

void BatchEvaluator::evaluate_raw(const EvidenceBatch& batch, std::span<double> out) {
  if (batch.variables() != circuit_.schema().size()) throw Error(ErrorKind::Input, "evidence batch width mismatch");
  if (out.size() < batch.lanes()) throw Error(ErrorKind::Input, "output span too small");
  const auto nodes = circuit_.nodes();
  for (std::size_t base = 0; base < batch.lanes(); base += kChunk) {
    const std::size_t n = std::min(kChunk, batch.lanes() - base);
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      const Node& node = nodes[id];
      double* dst = scratch_.data() + id * kChunk;
      switch (node.kind) {
        case NodeKind::Leaf:
          kernels_.indicator(dst, batch.row(node.var) + base, node.value, n);
          break;
        case NodeKind::Product:
          kernels_.fill(dst, 1.0, n);
          for (int ch : node.children) kernels_.multiply(dst, scratch_.data() + static_cast<std::size_t>(ch) * kChunk, n);
          break;
        case NodeKind::Sum:
          kernels_.fill(dst, 0.0, n);
          for (std::size_t i = 0; i < node.children.size(); ++i)
            kernels_.accumulate(dst, node.weights[i],
                                scratch_.data() + static_cast<std::size_t>(node.children[i]) * kChunk, n);
          break;
      }
    }
    const double* root = scratch_.data() + static_cast<std::size_t>(circuit_.root()) * kChunk;
    std::copy(root, root + n, out.begin() + static_cast<std::ptrdiff_t>(base));
  }
}

void BatchEvaluator::marginals(const EvidenceBatch& batch, std::span<double> out) {
  evaluate_raw(batch, out);
  const double z = circuit_.normalizer();
  for (std::size_t i = 0; i < batch.lanes(); ++i) out[i] /= z;
}

}  // namespace pcfair
