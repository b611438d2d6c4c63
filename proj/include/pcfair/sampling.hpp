#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pcfair/pattern.hpp"

namespace pcfair {

enum class SamplerVariant { Basic, Memo };

struct SamplerConfig {
  double delta = 0.05;
  SamplerVariant variant = SamplerVariant::Basic;
  std::uint64_t seed = 0;
  std::chrono::milliseconds time_budget{1000};
  /// Stop after this many runs even if time remains.
  std::optional<std::uint64_t> max_runs;
  bool record_transcript = false;
};

/// Running estimate attached to a visited assignment.
struct Estimate {
  double phi = 0.0;
  std::uint64_t sigma = 1;
};

/// Sparse estimator table; an entry is created with (delta, 1) the first
/// time its assignment is scored.
class EstimatorTable {
 public:
  Estimate& touch(const Pattern& p, double delta);
  const Estimate* find(const Pattern& p) const;
  Estimate* find(const Pattern& p);
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<Pattern, Estimate> table_;
};

struct SamplerResult {
  std::vector<ScoredPattern> patterns;  // sorted by pattern
  std::uint64_t runs = 0;               // completed runs
  std::uint64_t explored = 0;           // scored extensions
  /// explored count at the moment each pattern was first recorded, parallel to `patterns`.
  std::vector<std::uint64_t> first_seen;
  /// Assignments chosen along each completed run (empty prefix omitted).
  std::vector<std::vector<Pattern>> transcript;
  std::size_t estimator_entries = 0;
};

/// Random descent from the empty assignment to complete ones. Every
/// immediate extension of the current assignment is scored, the ones with
/// delta above the threshold are recorded, and the next assignment is drawn
/// with probability proportional to its weight: delta for Basic,
/// phi^(1 + |current| / |Z|) for Memo.
SamplerResult sample_patterns(const Circuit& c, const SamplerConfig& cfg);

}  // namespace pcfair
