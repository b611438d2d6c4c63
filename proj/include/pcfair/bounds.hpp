#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcfair/circuit.hpp"
#include "pcfair/pattern.hpp"

namespace pcfair {

enum class Direction { Max, Min };

inline constexpr double kUnboundedSentinel = std::numeric_limits<double>::infinity();

/// Memo of best-ratio values keyed by (n, m) node pairs. Entries are only
/// valid for one evidence context; `prepare` drops them when the context
/// changes. Dense storage for small circuits, hashed otherwise.
class RatioMemo {
 public:
  struct Context {
    Evidence evidence;
    VarMask free = 0;
    VarMask marginalized = 0;
    Direction direction = Direction::Max;
    friend bool operator==(const Context&, const Context&) = default;
  };

  /// Returns true when the memo was invalidated.
  bool prepare(const Context& ctx, int node_count);
  const double* find(int n, int m) const;
  void store(int n, int m, double value);
  std::size_t size() const { return entries_; }

 private:
  static constexpr int kDenseLimit = 1024;

  std::optional<Context> context_;
  int nodes_ = 0;
  bool dense_ = false;
  std::uint32_t generation_ = 0;
  std::vector<std::uint32_t> stamps_;
  std::vector<double> values_;
  std::unordered_map<std::uint64_t, double> hashed_;
  std::size_t entries_ = 0;
};

/// Bound computations over a decision-rooted, deterministic circuit whose two
/// class-conditional branches are compatible. Owns per-evaluation scratch
/// state; use one instance per thread.
class BoundEngine {
 public:
  /// Throws Error(Validation) when the circuit is not auditable.
  explicit BoundEngine(const Circuit& c);

  const Circuit& circuit() const { return c_; }

  /// max (or min over non-zero values) of n(e,u) / m(e,u) over complete
  /// assignments u of the variables in scope that are neither observed in `e`
  /// nor listed in `marginalized`; marginalized variables are summed out.
  /// When a sum node mixes free and marginalized variables those marginalized
  /// variables are maximized instead, which keeps the result a valid bound.
  double best_ratio(int n, int m, const Evidence& e, Direction dir, VarMask marginalized = 0);

  /// Same over the two decision branches (positive over negative).
  double branch_ratio(const Assignment& e, VarMask marginalized, Direction dir);

  /// max / min over completions u of the features outside e and `excluded`
  /// of P(d | e, u); excluded variables are summed out.
  double extreme_conditional(const Assignment& e, VarMask excluded, Direction dir);

  /// Upper bound on Delta over every extension of (x, y) that avoids `excluded`.
  double discrimination_ub(const Pattern& p, VarMask excluded);
  /// Upper bound on the divergence score over every extension of (x, y).
  double divergence_ub(const Pattern& p, VarMask excluded);
  /// Bracket (hi, lo) on the relative score of every extension.
  std::pair<double, double> relative_ub(const Pattern& p, VarMask excluded);

  /// Disable memoization (testing: results must not change).
  void set_memoize(bool on) { memoize_ = on; }
  const RatioMemo& memo() const { return memo_; }
  std::uint64_t ratio_calls() const { return ratio_calls_; }

 private:
  double ratio(int n, int m);
  double leaf_or_pure(int n, int m) const;
  void prepare(const Evidence& e, VarMask marginalized, Direction dir, VarMask scope);

  const Circuit& c_;
  std::vector<int> sums_;  // sum nodes below the root
  RatioMemo memo_;
  RatioMemo::Context ctx_;
  std::vector<double> values_;
  bool memoize_ = true;
  std::uint64_t ratio_calls_ = 0;
};

// One-shot wrappers.
double best_ratio(const Circuit& c, int n, int m, const Assignment& e, Direction dir);
double extreme_conditional(const Circuit& c, const Assignment& e, VarMask excluded, Direction dir);
double discrimination_ub(const Circuit& c, const Pattern& p, VarMask excluded);
double divergence_ub(const Circuit& c, const Pattern& p, VarMask excluded);
std::pair<double, double> relative_ub(const Circuit& c, const Pattern& p, VarMask excluded);

}  // namespace pcfair
