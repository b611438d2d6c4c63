#include "pcfair/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "pcfair/error.hpp"

namespace pcfair {

bool RatioMemo::prepare(const Context& ctx, int node_count) {
  if (context_ && *context_ == ctx && nodes_ == node_count) return false;
  context_ = ctx;
  nodes_ = node_count;
  dense_ = node_count <= kDenseLimit;
  entries_ = 0;
  if (dense_) {
    const std::size_t cells = static_cast<std::size_t>(node_count) * node_count;
    if (stamps_.size() != cells) {
      stamps_.assign(cells, 0);
      values_.assign(cells, 0.0);
      generation_ = 0;
    }
    if (++generation_ == 0) {
      std::fill(stamps_.begin(), stamps_.end(), 0);
      generation_ = 1;
    }
  } else {
    hashed_.clear();
  }
  return true;
}

const double* RatioMemo::find(int n, int m) const {
  if (dense_) {
    const std::size_t i = static_cast<std::size_t>(n) * nodes_ + m;
    return stamps_[i] == generation_ ? &values_[i] : nullptr;
  }
  auto it = hashed_.find((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(m));
  return it == hashed_.end() ? nullptr : &it->second;
}

void RatioMemo::store(int n, int m, double value) {
  ++entries_;
  if (dense_) {
    const std::size_t i = static_cast<std::size_t>(n) * nodes_ + m;
    stamps_[i] = generation_;
    values_[i] = value;
  } else {
    hashed_[(static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(m)] = value;
  }
}

BoundEngine::BoundEngine(const Circuit& c) : c_(c) {
  c_.require_auditable();
  for (int id = 0; id < c_.size(); ++id)
    if (c_.node(id).kind == NodeKind::Sum && id != c_.root()) sums_.push_back(id);
}

void BoundEngine::prepare(const Evidence& e, VarMask marginalized, Direction dir, VarMask scope) {
  VarMask observed = 0;
  for (VarIndex v = 0; v < static_cast<int>(e.size()); ++v)
    if (e[v] >= 0) observed |= var_bit(v);
  VarMask free = scope & ~observed & ~marginalized;
  VarMask summed = scope & marginalized & ~observed;
  // A sum node that mixes free and summed-out variables is no longer a max
  // node once its deciding variable is summed out; maximize those instead.
  for (bool changed = summed != 0; changed;) {
    changed = false;
    for (int s : sums_) {
      const VarMask sc = c_.node(s).scope;
      if ((sc & free) && (sc & summed)) {
        free |= sc & summed;
        summed &= ~sc;
        changed = true;
      }
    }
  }
  RatioMemo::Context ctx{e, free, summed, dir};
  if (memoize_) memo_.prepare(ctx, c_.size());
  if (!(ctx.evidence == ctx_.evidence) || values_.empty()) c_.evaluate_nodes(e, values_);
  ctx_ = std::move(ctx);
}

double BoundEngine::leaf_or_pure(int n, int m) const {
  const double a = values_[n];
  const double b = values_[m];
  return (a > 0.0 && b > 0.0) ? a / b : 0.0;
}

double BoundEngine::ratio(int n, int m) {
  const Node& a = c_.node(n);
  const Node& b = c_.node(m);
  if (a.scope != b.scope) throw Error(ErrorKind::IncompatibleStructure, "ratio over nodes with different scopes");
  // Subcircuits without free variables are constants under the evidence.
  if ((a.scope & ctx_.free) == 0) return leaf_or_pure(n, m);
  if (memoize_) {
    if (const double* hit = memo_.find(n, m)) return *hit;
  }
  ++ratio_calls_;
  const bool maximize = ctx_.direction == Direction::Max;
  double r = 0.0;
  if (a.kind == NodeKind::Sum || b.kind == NodeKind::Sum) {
    const std::size_t na = a.kind == NodeKind::Sum ? a.children.size() : 1;
    const std::size_t nb = b.kind == NodeKind::Sum ? b.children.size() : 1;
    bool any = false;
    double best = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      const int ni = a.kind == NodeKind::Sum ? a.children[i] : n;
      const double wi = a.kind == NodeKind::Sum ? a.weights[i] : 1.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const int mj = b.kind == NodeKind::Sum ? b.children[j] : m;
        const double wj = b.kind == NodeKind::Sum ? b.weights[j] : 1.0;
        const double sub = ratio(ni, mj);
        if (sub == 0.0) continue;
        const double v = (wi / wj) * sub;
        if (!any || (maximize ? v > best : v < best)) best = v;
        any = true;
      }
    }
    r = any ? best : 0.0;
  } else if (a.kind == NodeKind::Leaf && b.kind == NodeKind::Leaf) {
    r = a.value == b.value ? 1.0 : 0.0;
  } else if (a.kind == NodeKind::Product && a.children.size() == 1) {
    r = ratio(a.children[0], m);
  } else if (b.kind == NodeKind::Product && b.children.size() == 1) {
    r = ratio(n, b.children[0]);
  } else if (a.kind == NodeKind::Product && b.kind == NodeKind::Product) {
    auto fa = c_.factors(n);
    auto fb = c_.factors(m);
    if (fa.size() != fb.size())
      throw Error(ErrorKind::IncompatibleStructure,
                  "products " + std::to_string(n) + " and " + std::to_string(m) + " decompose differently");
    r = 1.0;
    for (std::size_t i = 0; i < fa.size() && r != 0.0; ++i) r *= ratio(fa[i], fb[i]);
  } else {
    throw Error(ErrorKind::IncompatibleStructure,
                "nodes " + std::to_string(n) + " and " + std::to_string(m) + " cannot be aligned");
  }
  if (memoize_) memo_.store(n, m, r);
  return r;
}

double BoundEngine::best_ratio(int n, int m, const Evidence& e, Direction dir, VarMask marginalized) {
  prepare(e, marginalized, dir, c_.node(n).scope);
  return ratio(n, m);
}

double BoundEngine::branch_ratio(const Assignment& e, VarMask marginalized, Direction dir) {
  const auto& st = c_.structure();
  prepare(make_evidence(c_.schema(), e), marginalized, dir, c_.schema().feature_mask());
  double r = 1.0;
  for (const auto& [pf, nf] : st.pairing) {
    r *= ratio(pf, nf);
    if (r == 0.0) break;
  }
  return r;
}

double BoundEngine::extreme_conditional(const Assignment& e, VarMask excluded, Direction dir) {
  const auto& st = c_.structure();
  const double r = branch_ratio(e, excluded & ~e.mask(), dir);
  if (r == 0.0) return 0.0;
  return 1.0 / (1.0 + (st.negative.weight / st.positive.weight) / r);
}

namespace {

struct Extremes {
  double hi_xy, lo_xy, hi_y, lo_y;
};

Extremes extremes(BoundEngine& eng, const Pattern& p, VarMask xy_excluded, VarMask y_excluded) {
  const Assignment xy = p.joint();
  Extremes ex;
  ex.hi_xy = eng.extreme_conditional(xy, xy_excluded, Direction::Max);
  ex.lo_xy = eng.extreme_conditional(xy, xy_excluded, Direction::Min);
  ex.hi_y = eng.extreme_conditional(p.y, y_excluded, Direction::Max);
  ex.lo_y = eng.extreme_conditional(p.y, y_excluded, Direction::Min);
  return ex;
}

}  // namespace

double BoundEngine::discrimination_ub(const Pattern& p, VarMask excluded) {
  // Extensions only add variables outside x, y and excluded; x's variables
  // stay unobserved in the P(d | y') term.
  const Extremes ex = extremes(*this, p, excluded, excluded | p.x.mask());
  return std::max(std::abs(ex.hi_xy - ex.lo_y), std::abs(ex.lo_xy - ex.hi_y));
}

double BoundEngine::divergence_ub(const Pattern& p, VarMask /*excluded*/) {
  // Extremes range over complete assignments z, so excluded variables do not
  // tighten this bound.
  const Schema& s = c_.schema();
  const Assignment xy = p.joint();
  const double z = c_.normalizer();
  const double a = c_.evaluate_raw(make_evidence(s, xy, s.positive)) / z;
  const double b = c_.evaluate_raw(make_evidence(s, xy, s.negative())) / z;
  const Extremes ex = extremes(*this, p, 0, 0);
  double total = 0.0;
  if (a > 0.0) {
    if (!(ex.lo_y > 0.0)) return kUnboundedSentinel;
    total += a * std::max(0.0, std::log(ex.hi_xy / ex.lo_y));
  }
  if (b > 0.0) {
    const double lo_neg = 1.0 - ex.hi_y;
    if (!(lo_neg > 0.0)) return kUnboundedSentinel;
    total += b * std::max(0.0, std::log((1.0 - ex.lo_xy) / lo_neg));
  }
  return total;
}

std::pair<double, double> BoundEngine::relative_ub(const Pattern& p, VarMask excluded) {
  const Extremes ex = extremes(*this, p, excluded, excluded | p.x.mask());
  const double hi = ex.lo_y > 0.0 ? ex.hi_xy / ex.lo_y : kUnboundedSentinel;
  const double lo = ex.hi_y > 0.0 ? ex.lo_xy / ex.hi_y : 0.0;
  return {hi, lo};
}

double best_ratio(const Circuit& c, int n, int m, const Assignment& e, Direction dir) {
  BoundEngine eng(c);
  return eng.best_ratio(n, m, make_evidence(c.schema(), e), dir);
}

double extreme_conditional(const Circuit& c, const Assignment& e, VarMask excluded, Direction dir) {
  BoundEngine eng(c);
  return eng.extreme_conditional(e, excluded, dir);
}

double discrimination_ub(const Circuit& c, const Pattern& p, VarMask excluded) {
  BoundEngine eng(c);
  return eng.discrimination_ub(p, excluded);
}

double divergence_ub(const Circuit& c, const Pattern& p, VarMask excluded) {
  BoundEngine eng(c);
  return eng.divergence_ub(p, excluded);
}

std::pair<double, double> relative_ub(const Circuit& c, const Pattern& p, VarMask excluded) {
  BoundEngine eng(c);
  return eng.relative_ub(p, excluded);
}

}  // namespace pcfair
