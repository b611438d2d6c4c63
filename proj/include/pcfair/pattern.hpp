#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcfair/circuit.hpp"

namespace pcfair {

/// A candidate discrimination pattern: x assigns sensitive variables, y
/// assigns any other features (sensitive ones included).
struct Pattern {
  Assignment x;
  Assignment y;

  Assignment joint() const { return x.merged(y); }
  VarMask mask() const { return x.mask() | y.mask(); }
  int size() const { return x.size() + y.size(); }

  std::string to_string(const Schema& s) const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
  /// Lexicographic on x, then y.
  friend auto operator<=>(const Pattern& a, const Pattern& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

/// Throws Error(Input) unless x only uses sensitive variables, x and y are
/// disjoint, and neither touches the decision variable.
void validate_pattern(const Schema& s, const Pattern& p);

struct ScoredPattern {
  Pattern pattern;
  double delta = 0.0;
  double probability = 0.0;
  std::optional<double> divergence;
  std::optional<double> relative;
};

/// The four (unnormalized) circuit values every score is derived from.
struct PatternMass {
  double d_xy = 0.0;  // P(d, x, y)
  double xy = 0.0;    // P(x, y)
  double d_y = 0.0;   // P(d, y)
  double y = 0.0;     // P(y)
};

PatternMass pattern_mass(const Circuit& c, const Pattern& p);

/// |P(d | x, y) - P(d | y)|, 0 when x is empty. Throws ZeroEvidence.
double discrimination_score(const Circuit& c, const Pattern& p);
double discrimination_score(const PatternMass& m);

/// P(x, y).
double pattern_probability(const Circuit& c, const Pattern& p);

/// P(d | x, y) / P(d | y). Throws ZeroEvidence or DivisionByZero.
double relative_score(const Circuit& c, const Pattern& p);

/// Minimal KL(P || Q) (nats) over distributions Q that agree with P outside
/// the block of completions of x y and satisfy Delta_Q(x, y) <= delta. Q scales
/// P(d, x y, .) by alpha and P(not d, x y, .) by beta.
struct Divergence {
  double kl = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
};

/// Throws InfeasibleRepair when no alpha, beta > 0 satisfy the constraint.
Divergence divergence_score(const Circuit& c, const Pattern& p, double delta);
/// Same computation from normalized block masses; `p_d_xy` = P(d,xy), etc.
Divergence divergence_from(double p_d_xy, double p_xy, double p_d_y, double p_y, double delta);

/// Full score record (delta, probability, and divergence when feasible).
ScoredPattern score_pattern(const Circuit& c, const Pattern& p, double delta);

}  // namespace pcfair

template <>
struct std::hash<pcfair::Pattern> {
  std::size_t operator()(const pcfair::Pattern& p) const {
    return pcfair::hash_value(p.x) * 0x9e3779b97f4a7c15ULL ^ pcfair::hash_value(p.y);
  }
};
