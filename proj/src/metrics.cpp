#include "pcfair/metrics.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pcfair/batch_eval.hpp"
#include "pcfair/error.hpp"
#include "pcfair/search.hpp"

namespace pcfair {

namespace {

constexpr std::size_t kBatchLanes = 4096;

std::uint64_t state_count(const Schema& s, const std::vector<VarIndex>& vars, std::uint64_t cap, const char* what) {
  std::uint64_t n = 1;
  for (VarIndex v : vars) {
    n *= static_cast<std::uint64_t>(s.arity(v));
    if (n > cap)
      throw Error(ErrorKind::EnumerationCapExceeded,
                  std::string(what) + " enumeration exceeds the cap of " + std::to_string(cap) + " states");
  }
  return n;
}

// Mixed-radix decoding of `index` over `vars`, first variable fastest.
void decode(const Schema& s, const std::vector<VarIndex>& vars, std::uint64_t index, Evidence& ev) {
  for (VarIndex v : vars) {
    const auto a = static_cast<std::uint64_t>(s.arity(v));
    ev[v] = static_cast<int>(index % a);
    index /= a;
  }
}

struct Spread {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return hi < lo; }
  double width() const { return empty() ? 0.0 : hi - lo; }
};

}  // namespace

MetricsReport group_fairness_report(const Circuit& c, const MetricsConfig& cfg) {
  const Schema& s = c.schema();
  c.require_auditable();
  MetricsReport rep;
  BatchEvaluator eval(c);

  std::vector<VarIndex> sens = s.sensitive;
  std::sort(sens.begin(), sens.end());
  const std::uint64_t ns = state_count(s, sens, cfg.sensitive_cap, "sensitive-assignment");

  // P(d | s) over complete sensitive assignments.
  {
    EvidenceBatch batch(s.size(), 2 * ns);
    Evidence ev(s.size(), -1);
    for (std::uint64_t i = 0; i < ns; ++i) {
      decode(s, sens, i, ev);
      ev[s.decision] = s.positive;
      batch.set_lane(2 * i, ev);
      ev[s.decision] = -1;
      batch.set_lane(2 * i + 1, ev);
    }
    std::vector<double> raw(batch.lanes());
    eval.evaluate_raw(batch, raw);
    Spread all;
    for (std::uint64_t i = 0; i < ns; ++i)
      if (raw[2 * i + 1] > 0.0) all.add(raw[2 * i] / raw[2 * i + 1]);
    rep.sp = all.width();
    rep.di = (!all.empty() && all.hi > 0.0) ? 1.0 - all.lo / all.hi : 0.0;
  }

  for (VarIndex v : sens) {
    Spread one;
    for (ValueIndex val = 0; val < s.arity(v); ++val) {
      const Assignment a{{v, val}};
      const double pe = marginal(c, a);
      if (pe > 0.0) one.add(marginal(c, a, s.positive) / pe);
    }
    rep.sp1 = std::max(rep.sp1, one.width());
  }

  // EO: enumerate every complete z once; accumulate P(dhat=1, s, D=t) and
  // P(s, D=t) per sensitive assignment s and decision value t.
  std::vector<VarIndex> features;
  for (VarIndex v = 0; v < s.size(); ++v)
    if (v != s.decision) features.push_back(v);
  const std::uint64_t nz = state_count(s, features, cfg.state_cap, "feature-state");
  std::vector<double> hit(2 * ns, 0.0), mass(2 * ns, 0.0);
  Evidence ev(s.size(), -1);
  for (std::uint64_t base = 0; base < nz; base += kBatchLanes) {
    const std::uint64_t n = std::min<std::uint64_t>(kBatchLanes, nz - base);
    EvidenceBatch batch(s.size(), 2 * n);
    std::vector<std::uint64_t> group(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      decode(s, features, base + i, ev);
      std::uint64_t g = 0, radix = 1;
      for (VarIndex v : sens) {
        g += radix * static_cast<std::uint64_t>(ev[v]);
        radix *= static_cast<std::uint64_t>(s.arity(v));
      }
      group[i] = g;
      ev[s.decision] = s.positive;
      batch.set_lane(2 * i, ev);
      ev[s.decision] = s.negative();
      batch.set_lane(2 * i + 1, ev);
      ev[s.decision] = -1;
    }
    std::vector<double> raw(batch.lanes());
    eval.evaluate_raw(batch, raw);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double pos = raw[2 * i], neg = raw[2 * i + 1];
      if (!(pos + neg > 0.0)) continue;
      const bool predict = pos / (pos + neg) >= cfg.threshold;
      const std::uint64_t g = group[i];
      mass[2 * g] += pos;
      mass[2 * g + 1] += neg;
      if (predict) {
        hit[2 * g] += pos;
        hit[2 * g + 1] += neg;
      }
    }
  }
  for (int t = 0; t < 2; ++t) {
    Spread sp;
    for (std::uint64_t g = 0; g < ns; ++g)
      if (mass[2 * g + t] > 0.0) sp.add(hit[2 * g + t] / mass[2 * g + t]);
    rep.eo = std::max(rep.eo, sp.width());
  }

  for (double d : cfg.deltas) rep.pattern_counts[d] = find_all_patterns(c, d).patterns.size();
  if (!cfg.deltas.empty()) {
    const SearchResult top = find_topk(c, 0.0, 1, RankBy::Disc);
    if (!top.patterns.empty()) rep.highest_delta = top.patterns.front().delta;
  }
  return rep;
}

}  // namespace pcfair
