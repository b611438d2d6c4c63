#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pcfair/bounds.hpp"
#include "pcfair/pattern.hpp"

namespace pcfair {

enum class SearchMode { All, TopK, Certify };
enum class RankBy { Disc, Div };

struct SearchConfig {
  double delta = 0.05;
  SearchMode mode = SearchMode::All;
  int k = 1;
  RankBy rank = RankBy::Disc;
  /// Branching order over Z. Empty means schema order.
  std::vector<VarIndex> order;
  /// Stop after this many scored candidates.
  std::optional<std::uint64_t> node_budget;
  /// false turns the search into naive enumeration of the whole lattice.
  bool prune = true;
  /// Worker threads for All mode (first-level subtrees).
  int threads = 1;
};

struct SearchStats {
  std::uint64_t visited = 0;  // candidates whose score was computed
  std::uint64_t pruned = 0;   // subtrees skipped on the bound
  std::uint64_t bound_evaluations = 0;
  bool budget_exhausted = false;
  std::chrono::duration<double> wall{0};
};

/// Called once per recursion guard: the prefix (x, y), its excluded set, the
/// bound that was compared against the threshold and whether the subtree was
/// skipped.
struct GuardEvent {
  const Pattern& pattern;
  VarMask excluded;
  double bound;
  bool pruned;
};
using SearchObserver = std::function<void(const GuardEvent&)>;

struct SearchResult {
  /// All: sorted by pattern. TopK: best first. Certify: the witness, if any.
  std::vector<ScoredPattern> patterns;
  SearchStats stats;
};

/// Branch-and-bound enumeration over (x, y, excluded) triples.
SearchResult search_patterns(const Circuit& c, const SearchConfig& cfg, const SearchObserver& observer = {});

SearchResult find_all_patterns(const Circuit& c, double delta);
SearchResult find_topk(const Circuit& c, double delta, int k, RankBy rank);

struct Verdict {
  bool fair = true;
  std::optional<ScoredPattern> witness;
  SearchStats stats;
};
Verdict certify_fair(const Circuit& c, double delta);

/// Number of (x, y) pairs in the search lattice, the empty pattern included:
/// a sensitive variable of arity a contributes 2a + 1 choices, any other a + 1.
double lattice_size(const Schema& s);

/// Ranking order used by top-k: score desc, then probability desc, then
/// pattern ascending. Scores and probabilities are compared at 1e-12.
bool ranks_before(double score_a, const ScoredPattern& a, double score_b, const ScoredPattern& b);

}  // namespace pcfair
