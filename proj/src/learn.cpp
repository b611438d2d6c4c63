#include "pcfair/learn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "pcfair/error.hpp"

namespace pcfair {

namespace {

std::vector<VarIndex> features_of(const Schema& s) {
  std::vector<VarIndex> f;
  for (VarIndex v = 0; v < s.size(); ++v)
    if (v != s.decision) f.push_back(v);
  return f;
}

void check_smoothing(double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::Input, "smoothing pseudo-count must be positive");
}

std::array<double, 2> class_prior(const Dataset& ds, double alpha, std::array<double, 2>& counts) {
  counts = {0.0, 0.0};
  for (std::size_t r = 0; r < ds.rows.size(); ++r) counts[ds.rows[r][ds.schema.decision]] += ds.weights[r];
  const double n = counts[0] + counts[1];
  return {(counts[0] + alpha) / (n + 2 * alpha), (counts[1] + alpha) / (n + 2 * alpha)};
}

// Appends nodes in creation order, which keeps children before parents.
class Builder {
 public:
  explicit Builder(const Schema& s) : s_(s) {}

  int leaf(VarIndex v, ValueIndex val) {
    auto [it, fresh] = leaves_.try_emplace({v, val}, static_cast<int>(nodes_.size()));
    if (fresh) nodes_.push_back(Node::leaf(v, val));
    return it->second;
  }
  int product(std::vector<int> children) {
    nodes_.push_back(Node::product(std::move(children)));
    return static_cast<int>(nodes_.size()) - 1;
  }
  int sum(std::vector<int> children, std::vector<double> weights) {
    nodes_.push_back(Node::sum(std::move(children), std::move(weights)));
    return static_cast<int>(nodes_.size()) - 1;
  }
  Circuit finish(int root) { return Circuit(s_, std::move(nodes_), root); }

 private:
  const Schema& s_;
  std::vector<Node> nodes_;
  std::map<std::pair<VarIndex, ValueIndex>, int> leaves_;
};

// Root sum over the decision with the positive branch first.
Circuit decision_root(Builder& b, const Schema& s, const std::array<double, 2>& prior,
                      const std::array<int, 2>& conditional) {
  std::vector<int> branches;
  std::vector<double> weights;
  for (ValueIndex t : {s.positive, s.negative()}) {
    branches.push_back(b.product({b.leaf(s.decision, t), conditional[t]}));
    weights.push_back(prior[t]);
  }
  return b.finish(b.sum(std::move(branches), std::move(weights)));
}

}  // namespace

NaiveBayesModel estimate_naive_bayes(const Dataset& ds, double alpha) {
  check_smoothing(alpha);
  const Schema& s = ds.schema;
  NaiveBayesModel m;
  m.schema = s;
  std::array<double, 2> n_t;
  m.prior = class_prior(ds, alpha, n_t);
  m.cond.resize(s.size());
  for (VarIndex v : features_of(s)) {
    for (int t = 0; t < 2; ++t) m.cond[v][t].assign(s.arity(v), 0.0);
    for (std::size_t r = 0; r < ds.rows.size(); ++r) m.cond[v][ds.rows[r][s.decision]][ds.rows[r][v]] += ds.weights[r];
    for (int t = 0; t < 2; ++t)
      for (double& p : m.cond[v][t]) p = (p + alpha) / (n_t[t] + alpha * s.arity(v));
  }
  return m;
}

double mutual_information(const Dataset& ds, VarIndex a, VarIndex b) {
  const int na = ds.schema.arity(a), nb = ds.schema.arity(b);
  std::vector<double> joint(static_cast<std::size_t>(na) * nb, 0.0), pa(na, 0.0), pb(nb, 0.0);
  double n = 0.0;
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    const double w = ds.weights[r];
    joint[static_cast<std::size_t>(ds.rows[r][a]) * nb + ds.rows[r][b]] += w;
    pa[ds.rows[r][a]] += w;
    pb[ds.rows[r][b]] += w;
    n += w;
  }
  if (!(n > 0.0)) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double pij = joint[static_cast<std::size_t>(i) * nb + j];
      if (pij > 0.0) mi += pij / n * std::log(pij * n / (pa[i] * pb[j]));
    }
  return mi;
}

std::vector<int> chow_liu_tree(const Dataset& ds) {
  const Schema& s = ds.schema;
  const auto f = features_of(s);
  if (f.size() < 2) throw Error(ErrorKind::Input, "Chow-Liu needs at least two features");
  struct Edge {
    long long key;
    VarIndex a, b;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j)
      edges.push_back({std::llround(mutual_information(ds, f[i], f[j]) * 1e12), f[i], f[j]});
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(y.key, x.a, x.b) < std::tie(x.key, y.a, y.b);
  });
  std::vector<int> uf(s.size());
  std::iota(uf.begin(), uf.end(), 0);
  auto root_of = [&](int v) {
    while (uf[v] != v) v = uf[v] = uf[uf[v]];
    return v;
  };
  std::vector<std::vector<VarIndex>> adj(s.size());
  for (const Edge& e : edges) {
    const int ra = root_of(e.a), rb = root_of(e.b);
    if (ra == rb) continue;
    uf[ra] = rb;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<int> parent(s.size(), -1);
  std::vector<bool> seen(s.size(), false);
  std::vector<VarIndex> queue{f.front()};
  seen[f.front()] = true;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const VarIndex v = queue[i];
    std::sort(adj[v].begin(), adj[v].end());
    for (VarIndex w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = v;
        queue.push_back(w);
      }
  }
  return parent;
}

ChowLiuModel estimate_chow_liu(const Dataset& ds, double alpha) {
  check_smoothing(alpha);
  const Schema& s = ds.schema;
  ChowLiuModel m;
  m.schema = s;
  m.parent = chow_liu_tree(ds);
  std::array<double, 2> n_t;
  m.prior = class_prior(ds, alpha, n_t);
  m.cpt.resize(s.size());
  for (VarIndex v : features_of(s)) {
    const int pv = m.parent[v];
    const int rows = pv < 0 ? 1 : s.arity(pv);
    for (int t = 0; t < 2; ++t) m.cpt[v][t].assign(rows, std::vector<double>(s.arity(v), 0.0));
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
      const auto& row = ds.rows[r];
      m.cpt[v][row[s.decision]][pv < 0 ? 0 : row[pv]][row[v]] += ds.weights[r];
    }
    for (int t = 0; t < 2; ++t)
      for (auto& dist : m.cpt[v][t]) {
        const double n = std::accumulate(dist.begin(), dist.end(), 0.0);
        for (double& p : dist) p = (p + alpha) / (n + alpha * s.arity(v));
      }
  }
  return m;
}

Circuit compile(const NaiveBayesModel& m) {
  const Schema& s = m.schema;
  s.validate();
  Builder b(s);
  std::array<int, 2> conditional{};
  for (ValueIndex t : {s.positive, s.negative()}) {
    std::vector<int> factors;
    for (VarIndex v : features_of(s)) {
      std::vector<int> leaves;
      for (ValueIndex val = 0; val < s.arity(v); ++val) leaves.push_back(b.leaf(v, val));
      factors.push_back(b.sum(std::move(leaves), m.cond[v][t]));
    }
    conditional[t] = factors.size() == 1 ? factors.front() : b.product(std::move(factors));
  }
  return decision_root(b, s, m.prior, conditional);
}

Circuit compile(const ChowLiuModel& m) {
  const Schema& s = m.schema;
  s.validate();
  Builder b(s);
  std::vector<std::vector<VarIndex>> kids(s.size());
  VarIndex root = -1;
  for (VarIndex v : features_of(s)) {
    if (m.parent[v] < 0) {
      if (root >= 0) throw Error(ErrorKind::Input, "Chow-Liu model is not a single tree");
      root = v;
    } else {
      kids[m.parent[v]].push_back(v);
    }
  }
  if (root < 0) throw Error(ErrorKind::Input, "Chow-Liu model has no root");

  std::array<int, 2> conditional{};
  for (ValueIndex t : {s.positive, s.negative()}) {
    // Subcircuit for "Z_v = a and everything below v", per (v, a).
    std::map<std::pair<VarIndex, ValueIndex>, int> made;
    auto mixture = [&](VarIndex v, const std::vector<double>& dist, auto&& self) -> int {
      std::vector<int> ch;
      for (ValueIndex val = 0; val < s.arity(v); ++val) ch.push_back(self(v, val, self));
      return b.sum(std::move(ch), dist);
    };
    auto subtree = [&](VarIndex v, ValueIndex a, auto&& self) -> int {
      if (auto it = made.find({v, a}); it != made.end()) return it->second;
      int id;
      if (kids[v].empty()) {
        id = b.leaf(v, a);
      } else {
        std::vector<int> factors{b.leaf(v, a)};
        for (VarIndex c : kids[v]) factors.push_back(mixture(c, m.cpt[c][t][a], self));
        id = b.product(std::move(factors));
      }
      made[{v, a}] = id;
      return id;
    };
    conditional[t] = mixture(root, m.cpt[root][t][0], subtree);
  }
  return decision_root(b, s, m.prior, conditional);
}

Circuit learn_naive_bayes(const Dataset& ds, const LearnConfig& cfg) {
  return compile(estimate_naive_bayes(ds, cfg.smoothing));
}

Circuit learn_chow_liu(const Dataset& ds, const LearnConfig& cfg) {
  return compile(estimate_chow_liu(ds, cfg.smoothing));
}

Circuit learn(const Dataset& ds, const LearnConfig& cfg) {
  return cfg.structure == Structure::ChowLiu ? learn_chow_liu(ds, cfg) : learn_naive_bayes(ds, cfg);
}

}  // namespace pcfair
