#include "pcfair/pattern.hpp"

#include <cmath>

#include "pcfair/error.hpp"

namespace pcfair {

std::string Pattern::to_string(const Schema& s) const {
  return "(" + x.to_string(s) + " | " + y.to_string(s) + ")";
}

void validate_pattern(const Schema& s, const Pattern& p) {
  if (p.x.mask() & p.y.mask()) throw Error(ErrorKind::Input, "pattern x and y overlap");
  if (p.x.mask() & ~s.sensitive_mask()) throw Error(ErrorKind::Input, "pattern x assigns a non-sensitive variable");
  if (p.mask() & ~s.feature_mask()) throw Error(ErrorKind::Input, "pattern assigns the decision variable");
  for (const auto& a : {p.x, p.y})
    for (const auto& l : a)
      if (l.value >= s.arity(l.var)) throw Error(ErrorKind::Input, "pattern value out of range");
}

PatternMass pattern_mass(const Circuit& c, const Pattern& p) {
  const Schema& s = c.schema();
  const Assignment xy = p.joint();
  PatternMass m;
  m.d_xy = c.evaluate_raw(make_evidence(s, xy, s.positive));
  m.xy = c.evaluate_raw(make_evidence(s, xy));
  m.d_y = c.evaluate_raw(make_evidence(s, p.y, s.positive));
  m.y = c.evaluate_raw(make_evidence(s, p.y));
  return m;
}

double discrimination_score(const PatternMass& m) {
  if (!(m.xy > 0.0) || !(m.y > 0.0)) throw Error(ErrorKind::ZeroEvidence, "pattern has zero probability");
  return std::abs(m.d_xy / m.xy - m.d_y / m.y);
}

double discrimination_score(const Circuit& c, const Pattern& p) {
  if (p.x.empty()) return 0.0;
  return discrimination_score(pattern_mass(c, p));
}

double pattern_probability(const Circuit& c, const Pattern& p) { return marginal(c, p.joint()); }

double relative_score(const Circuit& c, const Pattern& p) {
  if (p.x.empty()) return 1.0;
  const PatternMass m = pattern_mass(c, p);
  if (!(m.xy > 0.0) || !(m.y > 0.0)) throw Error(ErrorKind::ZeroEvidence, "pattern has zero probability");
  const double base = m.d_y / m.y;
  if (!(base > 0.0)) throw Error(ErrorKind::DivisionByZero, "P(d | y) = 0");
  return (m.d_xy / m.xy) / base;
}

Divergence divergence_from(double a, double p, double big_a, double big_y, double delta) {
  // a = P(d,xy), b = P(not d,xy), p = a + b, big_a = P(d,y), big_y = P(y).
  if (!(p > 0.0) || !(big_y > 0.0)) throw Error(ErrorKind::ZeroEvidence, "pattern has zero probability");
  const double b = p - a;
  // Delta_Q(alpha) = | c1 * alpha - c0 |
  const double c1 = a * (1.0 / p - 1.0 / big_y);
  const double c0 = (big_a - a) / big_y;
  const double at_one = std::abs(c1 - c0);
  if (at_one <= delta) return {};
  auto infeasible = [] { return Error(ErrorKind::InfeasibleRepair, "no repair satisfies the threshold"); };
  if (!(a > 0.0) || !(b > 0.0) || !(c1 > 0.0)) throw infeasible();
  const double lo = (c0 - delta) / c1;
  const double hi = (c0 + delta) / c1;
  const double alpha_max = p / a;  // beta > 0 requires alpha < p / a
  double alpha;
  if (hi < 1.0) {
    if (!(hi > 0.0)) throw infeasible();
    alpha = hi;
  } else {
    if (!(lo < alpha_max)) throw infeasible();
    alpha = lo;
  }
  const double beta = (p - alpha * a) / b;
  Divergence d;
  d.alpha = alpha;
  d.beta = beta;
  d.kl = a * std::log(1.0 / alpha) + b * std::log(1.0 / beta);
  return d;
}

Divergence divergence_score(const Circuit& c, const Pattern& p, double delta) {
  const PatternMass m = pattern_mass(c, p);
  const double z = c.normalizer();
  if (p.x.empty()) return {};
  return divergence_from(m.d_xy / z, m.xy / z, m.d_y / z, m.y / z, delta);
}

ScoredPattern score_pattern(const Circuit& c, const Pattern& p, double delta) {
  ScoredPattern sp;
  sp.pattern = p;
  const PatternMass m = pattern_mass(c, p);
  const double z = c.normalizer();
  sp.probability = m.xy / z;
  sp.delta = p.x.empty() ? 0.0 : discrimination_score(m);
  try {
    sp.divergence = p.x.empty() ? 0.0 : divergence_from(m.d_xy / z, m.xy / z, m.d_y / z, m.y / z, delta).kl;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InfeasibleRepair) throw;
  }
  return sp;
}

}  // namespace pcfair
