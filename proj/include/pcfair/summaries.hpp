#pragma once

#include <map>
#include <vector>

#include "pcfair/pattern.hpp"

namespace pcfair {

/// Pareto front over (probability, delta), kept as a staircase: probability
/// strictly increasing, delta strictly decreasing. Both coordinates are
/// compared after rounding to 1e-12. Points that are tied on
/// both coordinates share one step; under the strict definition such a step
/// is not on the front but still blocks everything it dominates.
class ParetoFront {
 public:
  void insert(const ScoredPattern& sp);

  /// Strict front, in increasing probability.
  std::vector<ScoredPattern> strict() const;
  /// Strict front plus the tied steps.
  std::vector<ScoredPattern> weak() const;
  std::size_t steps() const { return steps_.size(); }

 private:
  struct Step {
    long long delta;
    std::vector<ScoredPattern> members;
  };
  std::map<long long, Step> steps_;  // keyed by probability
};

std::vector<ScoredPattern> pareto_front(const std::vector<ScoredPattern>& sigma, bool weak = false);

/// Summaries of a pattern set. When the set came from sampling it is
/// incomplete: results are then only meaningful relative to it and carry
/// `relative_to_input`.
struct Summary {
  std::vector<ScoredPattern> patterns;  // sorted by pattern
  bool relative_to_input = false;
};

struct SummaryOptions {
  double delta = 0.05;
  /// Set for sampled (partial) inputs.
  bool partial = false;
  /// With a partial input, throw Error(IncompleteInput) instead of
  /// answering relative to the input.
  bool require_complete = false;
};

/// Immediate extensions of p: one more literal on a free feature; free
/// sensitive variables extend either x or y.
std::vector<Pattern> immediate_extensions(const Schema& s, const Pattern& p);

/// Non-complete members of sigma without any extension in sigma.
Summary maximal_patterns(const Circuit& c, const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt);

/// Members of sigma all of whose extensions are in sigma.
Summary candidate_minimal(const Circuit& c, const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt);

/// Candidates none of whose contractions with non-empty x is in sigma.
Summary minimal_patterns(const Circuit& c, const std::vector<ScoredPattern>& candidates,
                         const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt);

}  // namespace pcfair
