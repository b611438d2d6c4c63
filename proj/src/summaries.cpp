#include "pcfair/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>
#include <unordered_set>

#include "pcfair/bounds.hpp"
#include "pcfair/error.hpp"

namespace pcfair {

namespace {

// Coordinates are compared at 1e-12 so that values equal up to rounding tie.
long long coord(double v) { return std::llround(v * 1e12); }

}  // namespace

void ParetoFront::insert(const ScoredPattern& sp) {
  const long long p = coord(sp.probability);
  const long long d = coord(sp.delta);
  // The first step at or above p carries the largest delta among them.
  auto above = steps_.lower_bound(p);
  if (above != steps_.end() && above->second.delta >= d) {
    if (above->first == p && above->second.delta == d) above->second.members.push_back(sp);
    return;
  }
  // Drop the steps below p that the new point dominates; they sit right
  // before `above` because delta grows towards smaller probabilities.
  auto it = above;
  if (it != steps_.end() && it->first == p) it = steps_.erase(it);
  while (it != steps_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.delta > d) break;
    it = steps_.erase(prev);
  }
  steps_.emplace_hint(it, p, Step{d, {sp}});
}

std::vector<ScoredPattern> ParetoFront::strict() const {
  std::vector<ScoredPattern> out;
  for (const auto& [p, step] : steps_)
    if (step.members.size() == 1) out.push_back(step.members.front());
  return out;
}

std::vector<ScoredPattern> ParetoFront::weak() const {
  std::vector<ScoredPattern> out;
  for (const auto& [p, step] : steps_)
    for (const auto& m : step.members) out.push_back(m);
  return out;
}

std::vector<ScoredPattern> pareto_front(const std::vector<ScoredPattern>& sigma, bool weak) {
  ParetoFront front;
  for (const auto& sp : sigma) front.insert(sp);
  return weak ? front.weak() : front.strict();
}

std::vector<Pattern> immediate_extensions(const Schema& s, const Pattern& p) {
  std::vector<Pattern> out;
  for (VarIndex v = 0; v < s.size(); ++v) {
    if (v == s.decision || has_var(p.mask(), v)) continue;
    for (ValueIndex val = 0; val < s.arity(v); ++val) {
      if (s.is_sensitive(v)) out.push_back(Pattern{p.x.with({v, val}), p.y});
      out.push_back(Pattern{p.x, p.y.with({v, val})});
    }
  }
  return out;
}

namespace {

void sort_by_pattern(std::vector<ScoredPattern>& v) {
  std::sort(v.begin(), v.end(), [](const ScoredPattern& a, const ScoredPattern& b) { return a.pattern < b.pattern; });
}

bool check_partial(const SummaryOptions& opt) {
  if (opt.partial && opt.require_complete)
    throw Error(ErrorKind::IncompleteInput, "summary needs the complete pattern set; input is partial");
  return opt.partial;
}

// Answers "does sigma hold a strict extension of p" either by enumerating
// the extensions of p in the lattice or by scanning the patterns whose
// variable set contains p's, whichever touches fewer candidates.
class ExtensionIndex {
 public:
  ExtensionIndex(const Schema& s, const std::vector<ScoredPattern>& sigma) : s_(s) {
    for (const auto& sp : sigma) {
      members_.insert(sp.pattern);
      buckets_[sp.pattern.mask()].push_back(&sp.pattern);
    }
  }

  bool has_extension(const Pattern& p) const {
    const VarMask m = p.mask();
    double enumerate_cost = 1.0;
    std::vector<VarIndex> free;
    for (VarIndex v = 0; v < s_.size(); ++v) {
      if (v == s_.decision || has_var(m, v)) continue;
      free.push_back(v);
      enumerate_cost *= s_.is_sensitive(v) ? 2 * s_.arity(v) + 1 : s_.arity(v) + 1;
    }
    double scan_cost = 0.0;
    for (const auto& [bm, list] : buckets_)
      if (bm != m && (bm & m) == m) scan_cost += static_cast<double>(list.size());
    if (scan_cost <= enumerate_cost) {
      for (const auto& [bm, list] : buckets_) {
        if (bm == m || (bm & m) != m) continue;
        for (const Pattern* q : list)
          if (p.x.subset_of(q->x) && p.y.subset_of(q->y)) return true;
      }
      return false;
    }
    return enumerate(p, free, 0, false);
  }

 private:
  bool enumerate(const Pattern& cur, const std::vector<VarIndex>& free, std::size_t i, bool grown) const {
    if (i == free.size()) return grown && members_.contains(cur);
    if (enumerate(cur, free, i + 1, grown)) return true;
    const VarIndex v = free[i];
    for (ValueIndex val = 0; val < s_.arity(v); ++val) {
      if (enumerate(Pattern{cur.x, cur.y.with({v, val})}, free, i + 1, true)) return true;
      if (s_.is_sensitive(v) && enumerate(Pattern{cur.x.with({v, val}), cur.y}, free, i + 1, true)) return true;
    }
    return false;
  }

  const Schema& s_;
  std::unordered_set<Pattern> members_;
  std::unordered_map<VarMask, std::vector<const Pattern*>> buckets_;
};

}  // namespace

Summary maximal_patterns(const Circuit& c, const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt) {
  Summary out;
  out.relative_to_input = check_partial(opt);
  const Schema& s = c.schema();
  std::unique_ptr<BoundEngine> engine;
  if (!out.relative_to_input) engine = std::make_unique<BoundEngine>(c);
  const ExtensionIndex index(s, sigma);
  for (const auto& sp : sigma) {
    const Pattern& p = sp.pattern;
    if (p.mask() == s.feature_mask()) continue;
    bool settled = false;
    if (engine) {
      // No immediate extension can lead to a pattern: nothing below p can.
      settled = true;
      for (const Pattern& q : immediate_extensions(s, p)) {
        if (engine->discrimination_ub(q, 0) > opt.delta) {
          settled = false;
          break;
        }
      }
    }
    if (!settled) settled = !index.has_extension(p);
    if (settled) out.patterns.push_back(sp);
  }
  sort_by_pattern(out.patterns);
  return out;
}

Summary candidate_minimal(const Circuit& c, const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt) {
  Summary out;
  out.relative_to_input = check_partial(opt);
  const Schema& s = c.schema();
  std::vector<const ScoredPattern*> order;
  for (const auto& sp : sigma) order.push_back(&sp);
  // Larger patterns first, so every immediate extension is decided before
  // the patterns it extends.
  std::stable_sort(order.begin(), order.end(),
                   [](const ScoredPattern* a, const ScoredPattern* b) { return a->pattern.size() > b->pattern.size(); });
  std::unordered_map<Pattern, bool> candidate;
  for (const auto& sp : sigma) candidate.emplace(sp.pattern, false);
  for (const ScoredPattern* sp : order) {
    bool all = true;
    for (const Pattern& q : immediate_extensions(s, sp->pattern)) {
      auto it = candidate.find(q);
      if (it == candidate.end() || !it->second) {
        all = false;
        break;
      }
    }
    candidate[sp->pattern] = all;
    if (all) out.patterns.push_back(*sp);
  }
  sort_by_pattern(out.patterns);
  return out;
}

Summary minimal_patterns(const Circuit& c, const std::vector<ScoredPattern>& candidates,
                         const std::vector<ScoredPattern>& sigma, const SummaryOptions& opt) {
  (void)c;
  Summary out;
  out.relative_to_input = check_partial(opt);
  std::unordered_set<Pattern> in_sigma;
  for (const auto& sp : sigma) in_sigma.insert(sp.pattern);

  auto contractions = [](const Pattern& p) {
    std::vector<Pattern> out;
    for (const Literal& l : p.x)
      if (p.x.size() > 1) out.push_back(Pattern{p.x.without(l.var), p.y});
    for (const Literal& l : p.y) out.push_back(Pattern{p.x, p.y.without(l.var)});
    return out;
  };

  // Down-closure of the candidates over assignments with non-empty x,
  // grouped by size.
  std::vector<std::vector<Pattern>> levels;
  std::unordered_set<Pattern> closure;
  std::vector<Pattern> stack;
  for (const auto& sp : candidates)
    if (closure.insert(sp.pattern).second) stack.push_back(sp.pattern);
  while (!stack.empty()) {
    Pattern p = std::move(stack.back());
    stack.pop_back();
    for (Pattern& q : contractions(p))
      if (closure.insert(q).second) stack.push_back(std::move(q));
    const auto size = static_cast<std::size_t>(p.size());
    if (levels.size() <= size) levels.resize(size + 1);
    levels[size].push_back(std::move(p));
  }

  // Level order: an assignment is blocked once any of its contractions is a
  // pattern or is itself blocked.
  std::unordered_set<Pattern> blocked;
  for (const auto& level : levels) {
    for (const Pattern& p : level) {
      for (const Pattern& q : contractions(p)) {
        if (in_sigma.contains(q) || blocked.contains(q)) {
          blocked.insert(p);
          break;
        }
      }
    }
  }
  for (const auto& sp : candidates)
    if (!blocked.contains(sp.pattern) && in_sigma.contains(sp.pattern)) out.patterns.push_back(sp);
  sort_by_pattern(out.patterns);
  return out;
}

}  // namespace pcfair
