#include "pcfair/search.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pcfair/error.hpp"

namespace pcfair {

namespace {

// Bounds and exact scores are computed along different arithmetic paths, so a
// bound can undershoot the score it dominates by a few ulps.
constexpr double kBoundSlack = 1e-10;

long long rank_key(double v) { return std::llround(v * 1e12); }

std::vector<VarIndex> resolve_order(const Schema& s, const std::vector<VarIndex>& requested) {
  std::vector<VarIndex> order;
  if (requested.empty()) {
    for (VarIndex v = 0; v < s.size(); ++v)
      if (v != s.decision) order.push_back(v);
    return order;
  }
  VarMask seen = 0;
  for (VarIndex v : requested) {
    if (v < 0 || v >= s.size() || v == s.decision || has_var(seen, v))
      throw Error(ErrorKind::Input, "variable order must be a permutation of the features");
    seen |= var_bit(v);
  }
  if (seen != s.feature_mask()) throw Error(ErrorKind::Input, "variable order must list every feature");
  return requested;
}

struct Frame {
  Pattern pattern;
  VarMask excluded;
};

class Searcher {
 public:
  Searcher(const Circuit& c, const SearchConfig& cfg, const std::vector<VarIndex>& order,
           const SearchObserver& observer)
      : c_(c), cfg_(cfg), order_(order), observer_(observer), engine_(c) {}

  // Root guard: one bound over the whole lattice.
  bool admit_root() { return guard(Pattern{}, 0); }

  void expand(const Pattern& p, VarMask excluded) {
    if (stopped_) return;
    const VarMask used = p.mask() | excluded;
    auto it = std::find_if(order_.begin(), order_.end(), [&](VarIndex v) { return !has_var(used, v); });
    if (it == order_.end()) return;
    const VarIndex z = *it;
    const bool sensitive = c_.schema().is_sensitive(z);
    for (ValueIndex val = 0; val < c_.schema().arity(z) && !stopped_; ++val) {
      if (sensitive) child(Pattern{p.x.with({z, val}), p.y}, excluded);
      if (stopped_) return;
      child(Pattern{p.x, p.y.with({z, val})}, excluded);
    }
    if (stopped_) return;
    const VarMask widened = excluded | var_bit(z);
    if (guard(p, widened)) descend(p, widened);
  }

  void collect_frames(bool on) { collect_ = on; }
  std::vector<Frame>& frames() { return frames_; }

  std::vector<ScoredPattern>& found() { return found_; }
  std::vector<std::pair<double, ScoredPattern>>& held() { return held_; }
  SearchStats& stats() { return stats_; }
  bool stopped() const { return stopped_; }

 private:
  void descend(const Pattern& p, VarMask excluded) {
    if (collect_) {
      frames_.push_back({p, excluded});
      return;
    }
    expand(p, excluded);
  }

  void child(const Pattern& q, VarMask excluded) {
    if (cfg_.node_budget && stats_.visited >= *cfg_.node_budget) {
      stats_.budget_exhausted = true;
      stopped_ = true;
      return;
    }
    ++stats_.visited;
    const PatternMass m = pattern_mass(c_, q);
    // Zero-probability patterns are not patterns, nor are their extensions.
    if (!(m.xy > 0.0)) return;
    if (!q.x.empty()) {
      const double delta = discrimination_score(m);
      if (delta > cfg_.delta) record(q, m, delta);
      if (stopped_) return;
    }
    if (guard(q, excluded)) descend(q, excluded);
  }

  void record(const Pattern& q, const PatternMass& m, double delta) {
    const double z = c_.normalizer();
    ScoredPattern sp;
    sp.pattern = q;
    sp.delta = delta;
    sp.probability = m.xy / z;
    try {
      sp.divergence = divergence_from(m.d_xy / z, m.xy / z, m.d_y / z, m.y / z, cfg_.delta).kl;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleRepair) throw;
    }
    switch (cfg_.mode) {
      case SearchMode::All:
        found_.push_back(std::move(sp));
        break;
      case SearchMode::Certify:
        found_.push_back(std::move(sp));
        stopped_ = true;
        break;
      case SearchMode::TopK: {
        if (cfg_.rank == RankBy::Div && !sp.divergence) break;
        const double score = cfg_.rank == RankBy::Div ? *sp.divergence : sp.delta;
        if (full() && !ranks_before(score, sp, held_.back().first, held_.back().second)) break;
        auto pos = std::find_if(held_.begin(), held_.end(), [&](const auto& h) {
          return ranks_before(score, sp, h.first, h.second);
        });
        held_.insert(pos, {score, std::move(sp)});
        if (static_cast<int>(held_.size()) > cfg_.k) held_.pop_back();
        break;
      }
    }
  }

  bool full() const { return static_cast<int>(held_.size()) >= cfg_.k; }

  bool guard(const Pattern& p, VarMask excluded) {
    if ((p.mask() | excluded) == c_.schema().feature_mask()) return false;
    if (!cfg_.prune) return true;
    ++stats_.bound_evaluations;
    const double bound = engine_.discrimination_ub(p, excluded);
    bool pass = bound + kBoundSlack > cfg_.delta;
    if (pass && cfg_.mode == SearchMode::TopK && full()) {
      const double ranked = cfg_.rank == RankBy::Div ? engine_.divergence_ub(p, excluded) : bound;
      pass = rank_key(ranked + kBoundSlack) >= rank_key(held_.back().first);
    }
    if (!pass) ++stats_.pruned;
    if (observer_) observer_(GuardEvent{p, excluded, bound, !pass});
    return pass;
  }

  const Circuit& c_;
  const SearchConfig& cfg_;
  const std::vector<VarIndex>& order_;
  const SearchObserver& observer_;
  BoundEngine engine_;
  bool stopped_ = false;
  bool collect_ = false;
  std::vector<Frame> frames_;
  std::vector<ScoredPattern> found_;
  std::vector<std::pair<double, ScoredPattern>> held_;
  SearchStats stats_;
};

void merge_stats(SearchStats& into, const SearchStats& from) {
  into.visited += from.visited;
  into.pruned += from.pruned;
  into.bound_evaluations += from.bound_evaluations;
  into.budget_exhausted = into.budget_exhausted || from.budget_exhausted;
}

}  // namespace

bool ranks_before(double score_a, const ScoredPattern& a, double score_b, const ScoredPattern& b) {
  const long long sa = rank_key(score_a), sb = rank_key(score_b);
  if (sa != sb) return sa > sb;
  const long long pa = rank_key(a.probability), pb = rank_key(b.probability);
  if (pa != pb) return pa > pb;
  return a.pattern < b.pattern;
}

double lattice_size(const Schema& s) {
  double total = 1.0;
  for (VarIndex v = 0; v < s.size(); ++v) {
    if (v == s.decision) continue;
    total *= s.is_sensitive(v) ? 2.0 * s.arity(v) + 1.0 : s.arity(v) + 1.0;
  }
  return total;
}

SearchResult search_patterns(const Circuit& c, const SearchConfig& cfg, const SearchObserver& observer) {
  c.require_auditable();
  if (!(cfg.delta >= 0.0 && cfg.delta <= 1.0)) throw Error(ErrorKind::Input, "delta must lie in [0, 1]");
  if (cfg.mode == SearchMode::TopK && cfg.k < 1) throw Error(ErrorKind::Input, "k must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<VarIndex> order = resolve_order(c.schema(), cfg.order);

  SearchResult result;
  Searcher root(c, cfg, order, observer);
  const bool parallel = cfg.threads > 1 && cfg.mode == SearchMode::All && !cfg.node_budget && !observer;
  if (root.admit_root()) {
    root.collect_frames(parallel);
    root.expand(Pattern{}, 0);
  }
  merge_stats(result.stats, root.stats());

  if (parallel && !root.frames().empty()) {
    const auto& frames = root.frames();
    const int workers = std::min<int>(cfg.threads, static_cast<int>(frames.size()));
    std::vector<std::vector<ScoredPattern>> found(workers);
    std::vector<SearchStats> stats(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          Searcher s(c, cfg, order, observer);
          for (std::size_t i = w; i < frames.size(); i += workers) s.expand(frames[i].pattern, frames[i].excluded);
          found[w] = std::move(s.found());
          stats[w] = s.stats();
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (int w = 0; w < workers; ++w) {
      merge_stats(result.stats, stats[w]);
      for (auto& sp : found[w]) root.found().push_back(std::move(sp));
    }
  }

  if (cfg.mode == SearchMode::TopK) {
    for (auto& [score, sp] : root.held()) result.patterns.push_back(std::move(sp));
  } else {
    result.patterns = std::move(root.found());
    std::sort(result.patterns.begin(), result.patterns.end(),
              [](const ScoredPattern& a, const ScoredPattern& b) { return a.pattern < b.pattern; });
  }
  result.stats.wall = std::chrono::steady_clock::now() - start;
  return result;
}

SearchResult find_all_patterns(const Circuit& c, double delta) {
  SearchConfig cfg;
  cfg.delta = delta;
  return search_patterns(c, cfg);
}

SearchResult find_topk(const Circuit& c, double delta, int k, RankBy rank) {
  SearchConfig cfg;
  cfg.delta = delta;
  cfg.mode = SearchMode::TopK;
  cfg.k = k;
  cfg.rank = rank;
  return search_patterns(c, cfg);
}

Verdict certify_fair(const Circuit& c, double delta) {
  SearchConfig cfg;
  cfg.delta = delta;
  cfg.mode = SearchMode::Certify;
  SearchResult r = search_patterns(c, cfg);
  Verdict v;
  v.stats = r.stats;
  v.fair = r.patterns.empty();
  if (!v.fair) v.witness = std::move(r.patterns.front());
  return v;
}

}  // namespace pcfair
