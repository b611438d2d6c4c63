#include "pcfair/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "pcfair/batch_eval.hpp"
#include "pcfair/error.hpp"

namespace pcfair {

Estimate& EstimatorTable::touch(const Pattern& p, double delta) {
  auto [it, inserted] = table_.try_emplace(p);
  if (inserted) it->second = Estimate{delta, 1};
  return it->second;
}

const Estimate* EstimatorTable::find(const Pattern& p) const {
  auto it = table_.find(p);
  return it == table_.end() ? nullptr : &it->second;
}

Estimate* EstimatorTable::find(const Pattern& p) {
  auto it = table_.find(p);
  return it == table_.end() ? nullptr : &it->second;
}

namespace {

struct Scored {
  Pattern pattern;
  PatternMass mass;
  double delta = 0.0;
  bool possible = false;  // P(x, y) > 0
};

class Sampler {
 public:
  Sampler(const Circuit& c, const SamplerConfig& cfg)
      : c_(c), s_(c.schema()), cfg_(cfg), eval_(c), rng_(cfg.seed),
        features_(std::popcount(s_.feature_mask())) {}

  SamplerResult run() {
    const auto deadline = std::chrono::steady_clock::now() + cfg_.time_budget;
    auto expired = [&] { return std::chrono::steady_clock::now() >= deadline; };
    SamplerResult out;
    while (!expired() && !(cfg_.max_runs && out.runs >= *cfg_.max_runs)) {
      std::vector<Pattern> path;
      Pattern cur;
      bool cut = false;
      while (cur.mask() != s_.feature_mask()) {
        if (expired()) {
          cut = true;
          break;
        }
        std::vector<Scored> ext = score_extensions(cur);
        out.explored += ext.size();
        for (const auto& e : ext)
          if (e.possible && e.delta > cfg_.delta) note(e, out.explored);
        const std::size_t pick = choose(cur, ext);
        cur = ext[pick].pattern;
        path.push_back(cur);
      }
      if (cut) break;
      ++out.runs;
      if (cfg_.variant == SamplerVariant::Memo) backtrack(path);
      if (cfg_.record_transcript) out.transcript.push_back(std::move(path));
    }
    for (auto& [p, rec] : found_) {
      out.patterns.push_back(std::move(rec.first));
      out.first_seen.push_back(rec.second);
    }
    out.estimator_entries = table_.size();
    return out;
  }

 private:
  std::vector<Scored> score_extensions(const Pattern& cur) {
    std::vector<Scored> ext;
    for (VarIndex v = 0; v < s_.size(); ++v) {
      if (v == s_.decision || cur.y.contains(v) || cur.x.contains(v)) continue;
      for (ValueIndex val = 0; val < s_.arity(v); ++val) {
        if (s_.is_sensitive(v)) ext.push_back({Pattern{cur.x.with({v, val}), cur.y}, {}});
        ext.push_back({Pattern{cur.x, cur.y.with({v, val})}, {}});
      }
    }
    EvidenceBatch batch(s_.size(), ext.size() * 4);
    for (std::size_t i = 0; i < ext.size(); ++i) {
      const Assignment xy = ext[i].pattern.joint();
      batch.set_lane(4 * i + 0, make_evidence(s_, xy, s_.positive));
      batch.set_lane(4 * i + 1, make_evidence(s_, xy));
      batch.set_lane(4 * i + 2, make_evidence(s_, ext[i].pattern.y, s_.positive));
      batch.set_lane(4 * i + 3, make_evidence(s_, ext[i].pattern.y));
    }
    raw_.resize(batch.lanes());
    eval_.evaluate_raw(batch, raw_);
    for (std::size_t i = 0; i < ext.size(); ++i) {
      const PatternMass m{raw_[4 * i], raw_[4 * i + 1], raw_[4 * i + 2], raw_[4 * i + 3]};
      ext[i].mass = m;
      ext[i].possible = m.xy > 0.0;
      if (ext[i].possible && !ext[i].pattern.x.empty()) ext[i].delta = discrimination_score(m);
    }
    return ext;
  }

  void note(const Scored& e, std::uint64_t explored) {
    if (found_.contains(e.pattern)) return;
    const PatternMass& m = e.mass;
    const double z = c_.normalizer();
    ScoredPattern sp;
    sp.pattern = e.pattern;
    sp.delta = e.delta;
    sp.probability = m.xy / z;
    try {
      sp.divergence = divergence_from(m.d_xy / z, m.xy / z, m.d_y / z, m.y / z, cfg_.delta).kl;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::InfeasibleRepair) throw;
    }
    found_.emplace(e.pattern, std::make_pair(std::move(sp), explored));
  }

  std::size_t choose(const Pattern& cur, const std::vector<Scored>& ext) {
    std::vector<double> w(ext.size(), 0.0);
    const double gamma = 1.0 + static_cast<double>(cur.size()) / features_;
    double total = 0.0;
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if (!ext[i].possible) continue;
      if (cfg_.variant == SamplerVariant::Memo)
        w[i] = std::pow(table_.touch(ext[i].pattern, ext[i].delta).phi, gamma);
      else
        w[i] = ext[i].delta;
      total += w[i];
    }
    if (!(total > 0.0)) {
      for (std::size_t i = 0; i < ext.size(); ++i) w[i] = ext[i].possible ? 1.0 : 0.0;
      total = static_cast<double>(std::count(w.begin(), w.end(), 1.0));
    }
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < ext.size(); ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      last = i;
      if (u < acc) return i;
    }
    return last;
  }

  // Walks the finished path backwards; each prefix averages in the mean
  // estimate of the assignments chosen after it.
  void backtrack(const std::vector<Pattern>& path) {
    if (path.size() < 2) return;
    const Estimate* tail = table_.find(path.back());
    double suffix_sum = tail ? tail->phi : 0.0;
    std::size_t suffix_len = 1;
    for (std::size_t i = path.size() - 1; i-- > 0;) {
      Estimate* est = table_.find(path[i]);
      if (!est) continue;
      const double t = suffix_sum / static_cast<double>(suffix_len);
      est->sigma += 1;
      est->phi = (est->phi * static_cast<double>(est->sigma - 1) + t) / static_cast<double>(est->sigma);
      suffix_sum += est->phi;
      ++suffix_len;
    }
  }

  const Circuit& c_;
  const Schema& s_;
  const SamplerConfig& cfg_;
  BatchEvaluator eval_;
  std::mt19937_64 rng_;
  int features_;
  EstimatorTable table_;
  std::vector<double> raw_;
  std::map<Pattern, std::pair<ScoredPattern, std::uint64_t>> found_;
};

}  // namespace

SamplerResult sample_patterns(const Circuit& c, const SamplerConfig& cfg) {
  c.require_auditable();
  if (c.schema().sensitive.empty()) throw Error(ErrorKind::Input, "sampling needs at least one sensitive variable");
  if (cfg.time_budget.count() <= 0) throw Error(ErrorKind::Input, "time budget must be positive");
  Sampler s(c, cfg);
  return s.run();
}

}  // namespace pcfair
