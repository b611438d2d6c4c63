#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pcfair/circuit.hpp"

namespace pcfair {

struct MetricsConfig {
  /// Largest number of complete sensitive assignments enumerated.
  std::uint64_t sensitive_cap = 4096;
  /// Largest number of complete feature assignments enumerated for EO.
  std::uint64_t state_cap = std::uint64_t{1} << 20;
  /// The model classifier predicts d when P(d | z) >= threshold.
  double threshold = 0.5;
  /// Thresholds at which patterns are counted; empty skips pattern mining.
  std::vector<double> deltas;
};

struct MetricsReport {
  double di = 0.0;
  double sp = 0.0;
  double sp1 = 0.0;
  double eo = 0.0;
  std::map<double, std::uint64_t> pattern_counts;
  double highest_delta = 0.0;
};

/// Group-fairness spreads over complete sensitive assignments s:
///   SP  = max_s P(d|s) - min_s P(d|s)
///   DI  = 1 - min_s P(d|s) / max_s P(d|s)
///   SP1 = largest SP over single sensitive variables
///   EO  = largest spread over s of P(dhat | s, D=t), t ranging over both
///         decision values, dhat the model's own thresholded decision.
/// Throws Error(EnumerationCapExceeded) naming the cap that fired.
MetricsReport group_fairness_report(const Circuit& c, const MetricsConfig& cfg = {});

}  // namespace pcfair
