#include "pcfair/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "pcfair/error.hpp"

namespace pcfair {

Node Node::leaf(VarIndex var, ValueIndex value) {
  Node n;
  n.kind = NodeKind::Leaf;
  n.var = var;
  n.value = value;
  return n;
}

Node Node::product(std::vector<int> children) {
  Node n;
  n.kind = NodeKind::Product;
  n.children = std::move(children);
  return n;
}

Node Node::sum(std::vector<int> children, std::vector<double> weights) {
  Node n;
  n.kind = NodeKind::Sum;
  n.children = std::move(children);
  n.weights = std::move(weights);
  return n;
}

namespace {

int lowest_var(VarMask m) { return m == 0 ? kMaxVariables : std::countr_zero(m); }

std::string node_label(int id) { return "node " + std::to_string(id); }

// Per-variable superset of the values a node can be non-zero on.
using SupportTable = std::vector<std::uint64_t>;

std::uint64_t full_values(int arity) {
  return arity >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << arity) - 1;
}

class CompatibilityChecker {
 public:
  explicit CompatibilityChecker(const Circuit& c) : c_(c) {}

  bool check(int n, int m) {
    const std::uint64_t key = (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(m);
    if (done_.contains(key)) return true;
    const Node& a = c_.node(n);
    const Node& b = c_.node(m);
    if (a.scope != b.scope) {
      fail("nodes " + std::to_string(n) + " and " + std::to_string(m) + " differ in scope");
      return false;
    }
    bool ok = true;
    if (a.kind == NodeKind::Sum) {
      // Pairs every child of n with m; a sum m is then expanded in turn.
      for (int ch : a.children) ok = check(ch, m) && ok;
    } else if (b.kind == NodeKind::Sum) {
      for (int ch : b.children) ok = check(n, ch) && ok;
    } else if (a.kind == NodeKind::Leaf && b.kind == NodeKind::Leaf) {
      ok = true;
    } else if (a.kind == NodeKind::Product && a.children.size() == 1) {
      ok = check(a.children[0], m);
    } else if (b.kind == NodeKind::Product && b.children.size() == 1) {
      ok = check(n, b.children[0]);
    } else if (a.kind == NodeKind::Product && b.kind == NodeKind::Product) {
      auto fa = c_.factors(n);
      auto fb = c_.factors(m);
      if (fa.size() != fb.size()) {
        fail("products " + std::to_string(n) + " and " + std::to_string(m) + " decompose differently");
        return false;
      }
      for (std::size_t i = 0; i < fa.size() && ok; ++i) {
        if (c_.node(fa[i]).scope != c_.node(fb[i]).scope) {
          fail("products " + std::to_string(n) + " and " + std::to_string(m) + " decompose differently");
          return false;
        }
        ok = check(fa[i], fb[i]);
      }
    } else {
      fail("nodes " + std::to_string(n) + " and " + std::to_string(m) + " cannot be aligned");
      ok = false;
    }
    if (ok) done_.insert(key);
    return ok;
  }

  std::vector<std::string> problems;

 private:
  void fail(std::string msg) {
    if (problems.size() < 8) problems.push_back(std::move(msg));
  }

  const Circuit& c_;
  std::unordered_set<std::uint64_t> done_;
};

std::optional<DecisionBranch> decision_branch(const Circuit& c, int child, double weight,
                                              std::vector<std::string>& problems) {
  const Node& p = c.node(child);
  const VarIndex d = c.schema().decision;
  if (p.kind != NodeKind::Product) {
    problems.push_back("root child " + std::to_string(child) + " is not a product");
    return std::nullopt;
  }
  DecisionBranch br;
  br.product = child;
  br.weight = weight;
  for (int f : c.factors(child)) {
    const Node& n = c.node(f);
    if (n.kind == NodeKind::Leaf && n.var == d) {
      if (br.indicator >= 0) {
        problems.push_back("product " + std::to_string(child) + " has two decision indicators");
        return std::nullopt;
      }
      br.indicator = f;
    } else if (has_var(n.scope, d)) {
      problems.push_back("decision variable appears below the root in " + node_label(f));
      return std::nullopt;
    } else {
      br.factors.push_back(f);
    }
  }
  if (br.indicator < 0) {
    problems.push_back("product " + std::to_string(child) + " has no decision indicator");
    return std::nullopt;
  }
  return br;
}

}  // namespace

Circuit::Circuit(Schema schema, std::vector<Node> nodes, int root)
    : schema_(std::move(schema)), nodes_(std::move(nodes)), root_(root) {
  schema_.validate();
  const int n = size();
  if (root_ < 0 || root_ >= n) throw ParseError(0, "root id does not name a node");
  factor_order_.resize(n);
  for (int id = 0; id < n; ++id) {
    Node& node = nodes_[id];
    switch (node.kind) {
      case NodeKind::Leaf:
        if (node.var < 0 || node.var >= schema_.size())
          throw ParseError(0, node_label(id) + " references unknown variable");
        if (node.value < 0 || node.value >= schema_.arity(node.var))
          throw ParseError(0, node_label(id) + " value index exceeds arity");
        node.scope = var_bit(node.var);
        break;
      case NodeKind::Product:
      case NodeKind::Sum:
        if (node.children.empty()) throw ParseError(0, node_label(id) + " has no children");
        if (node.kind == NodeKind::Sum && node.weights.size() != node.children.size())
          throw ParseError(0, node_label(id) + " weight count mismatch");
        node.scope = 0;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const int ch = node.children[i];
          if (ch < 0 || ch >= id) throw ParseError(0, node_label(id) + " references unknown node " + std::to_string(ch));
          node.scope |= nodes_[ch].scope;
          if (node.kind == NodeKind::Sum && !(node.weights[i] > 0.0 && std::isfinite(node.weights[i])))
            throw ParseError(0, node_label(id) + " has a non-positive weight");
        }
        break;
    }
    if (node.kind == NodeKind::Product) {
      auto& order = factor_order_[id];
      order = node.children;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return lowest_var(nodes_[a].scope) < lowest_var(nodes_[b].scope);
      });
    }
  }
  if (nodes_[root_].scope != schema_.all_mask()) throw ParseError(0, "root scope does not cover every variable");
  report_ = validate_structure(*this);
  normalizer_ = evaluate_raw(Evidence(schema_.size(), -1));
}

void Circuit::evaluate_nodes(const Evidence& ev, std::vector<double>& values) const {
  values.resize(nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case NodeKind::Leaf: {
        const int obs = ev[n.var];
        values[id] = (obs < 0 || obs == n.value) ? 1.0 : 0.0;
        break;
      }
      case NodeKind::Product: {
        double acc = 1.0;
        for (int ch : n.children) acc *= values[ch];
        values[id] = acc;
        break;
      }
      case NodeKind::Sum: {
        double acc = 0.0;
        for (std::size_t i = 0; i < n.children.size(); ++i) acc += n.weights[i] * values[n.children[i]];
        values[id] = acc;
        break;
      }
    }
  }
}

double Circuit::evaluate_raw(const Evidence& ev) const {
  thread_local std::vector<double> values;
  evaluate_nodes(ev, values);
  return values[root_];
}

void Circuit::require_auditable() const {
  if (report_.auditable()) return;
  std::string msg = "circuit is not auditable (needs smooth, decomposable, deterministic, decision-rooted, compatible)";
  if (!report_.problems.empty()) msg += ": " + report_.problems.front();
  throw Error(ErrorKind::Validation, msg);
}

StructureReport validate_structure(const Circuit& c) {
  StructureReport r;
  const int n = c.size();
  const int nv = c.schema().size();
  r.smooth = true;
  r.decomposable = true;
  r.deterministic = true;

  std::vector<SupportTable> support(n, SupportTable(nv));
  for (int id = 0; id < n; ++id) {
    const Node& node = c.node(id);
    SupportTable& s = support[id];
    switch (node.kind) {
      case NodeKind::Leaf:
        for (int v = 0; v < nv; ++v) s[v] = full_values(c.schema().arity(v));
        s[node.var] = std::uint64_t{1} << node.value;
        break;
      case NodeKind::Product: {
        VarMask seen = 0;
        for (int v = 0; v < nv; ++v) s[v] = full_values(c.schema().arity(v));
        for (int ch : node.children) {
          const VarMask cs = c.node(ch).scope;
          if (seen & cs) {
            if (r.decomposable) r.problems.push_back("product " + std::to_string(id) + " has overlapping children");
            r.decomposable = false;
          }
          seen |= cs;
          for (int v = 0; v < nv; ++v) s[v] &= support[ch][v];
        }
        break;
      }
      case NodeKind::Sum: {
        for (int ch : node.children) {
          if (c.node(ch).scope != node.scope) {
            if (r.smooth) r.problems.push_back("sum " + std::to_string(id) + " mixes child scopes");
            r.smooth = false;
          }
          for (int v = 0; v < nv; ++v) s[v] |= support[ch][v];
        }
        for (std::size_t i = 0; i < node.children.size() && r.deterministic; ++i) {
          for (std::size_t j = i + 1; j < node.children.size(); ++j) {
            const auto& a = support[node.children[i]];
            const auto& b = support[node.children[j]];
            bool disjoint = false;
            for (int v = 0; v < nv && !disjoint; ++v) disjoint = (a[v] & b[v]) == 0;
            if (!disjoint) {
              r.problems.push_back("sum " + std::to_string(id) + " has children with overlapping support");
              r.deterministic = false;
              break;
            }
          }
        }
        break;
      }
    }
  }

  const Node& root = c.node(c.root());
  if (root.kind != NodeKind::Sum || root.children.size() != 2) {
    r.problems.push_back("root is not a binary sum over the decision variable");
    return r;
  }
  std::vector<DecisionBranch> branches;
  for (std::size_t i = 0; i < 2; ++i) {
    auto br = decision_branch(c, root.children[i], root.weights[i], r.problems);
    if (!br) return r;
    branches.push_back(std::move(*br));
  }
  const ValueIndex v0 = c.node(branches[0].indicator).value;
  const ValueIndex v1 = c.node(branches[1].indicator).value;
  if (v0 == v1) {
    r.problems.push_back("both root children carry the same decision value");
    return r;
  }
  const bool first_is_positive = v0 == c.schema().positive;
  r.positive = branches[first_is_positive ? 0 : 1];
  r.negative = branches[first_is_positive ? 1 : 0];
  r.decision_rooted = true;

  // Compatibility of the two class-conditional subcircuits, aligned by scope.
  if (!(r.smooth && r.decomposable)) return r;
  if (r.positive.factors.size() != r.negative.factors.size()) {
    r.problems.push_back("decision branches decompose the features differently");
    return r;
  }
  CompatibilityChecker checker(c);
  bool ok = true;
  for (std::size_t i = 0; i < r.positive.factors.size(); ++i) {
    const int a = r.positive.factors[i];
    const int b = r.negative.factors[i];
    if (c.node(a).scope != c.node(b).scope) {
      r.problems.push_back("decision branches decompose the features differently");
      ok = false;
      break;
    }
    r.pairing.emplace_back(a, b);
    ok = checker.check(a, b) && ok;
  }
  for (auto& p : checker.problems) r.problems.push_back(std::move(p));
  r.compatible = ok;
  if (!ok) r.pairing.clear();
  return r;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

int to_int(std::string_view tok, int line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
  return v;
}

double to_double(std::string_view tok, int line) {
  double v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(line, "expected decimal weight, got '" + std::string(tok) + "'");
  return v;
}

}  // namespace

Circuit parse_circuit(std::string_view text) {
  Schema schema;
  std::vector<Node> nodes;
  std::optional<int> root;
  bool header = false;
  bool have_decision = false;
  std::string decision_label;
  int decision_line = 0;
  int lineno = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = tokenize(line);
    if (tok.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (!header) {
      if (tok.size() != 2 || tok[0] != "pc" || tok[1] != "v1") throw ParseError(lineno, "missing header 'pc v1'");
      header = true;
      continue;
    }
    const std::string_view kw = tok[0];
    if (kw == "var") {
      if (!nodes.empty()) throw ParseError(lineno, "variables must be declared before nodes");
      if (tok.size() < 4) throw ParseError(lineno, "malformed var line");
      const int index = to_int(tok[1], lineno, "variable index");
      if (index != schema.size()) throw ParseError(lineno, "variable indices must be dense and in order");
      const int arity = to_int(tok[3], lineno, "arity");
      if (arity < 2 || arity > kMaxArity) throw ParseError(lineno, "arity must be in [2, 64]");
      if (static_cast<int>(tok.size()) != 4 + arity) throw ParseError(lineno, "label count does not match arity");
      if (schema.size() >= kMaxVariables) throw ParseError(lineno, "more than 64 variables");
      Variable v;
      v.name = std::string(tok[2]);
      for (int i = 0; i < arity; ++i) {
        std::string label(tok[4 + i]);
        if (std::find(v.labels.begin(), v.labels.end(), label) != v.labels.end())
          throw ParseError(lineno, "duplicate value label '" + label + "'");
        v.labels.push_back(std::move(label));
      }
      if (schema.find(v.name)) throw ParseError(lineno, "duplicate variable name '" + v.name + "'");
      schema.variables.push_back(std::move(v));
    } else if (kw == "decision") {
      if (tok.size() != 3) throw ParseError(lineno, "malformed decision line");
      schema.decision = to_int(tok[1], lineno, "decision index");
      decision_label = std::string(tok[2]);
      decision_line = lineno;
      have_decision = true;
    } else if (kw == "sensitive") {
      for (std::size_t i = 1; i < tok.size(); ++i) schema.sensitive.push_back(to_int(tok[i], lineno, "sensitive index"));
    } else if (kw == "L" || kw == "P" || kw == "S") {
      if (tok.size() < 2) throw ParseError(lineno, "malformed node line");
      const int id = to_int(tok[1], lineno, "node id");
      if (id < static_cast<int>(nodes.size())) throw ParseError(lineno, "duplicate node id " + std::to_string(id));
      if (id != static_cast<int>(nodes.size())) throw ParseError(lineno, "node ids must be dense from 0");
      auto check_child = [&](int ch) {
        if (ch < 0 || ch >= id) throw ParseError(lineno, "unknown node reference " + std::to_string(ch));
      };
      if (kw == "L") {
        if (tok.size() != 4) throw ParseError(lineno, "malformed leaf line");
        const int var = to_int(tok[2], lineno, "variable index");
        const int val = to_int(tok[3], lineno, "value index");
        if (var < 0 || var >= schema.size()) throw ParseError(lineno, "leaf references unknown variable");
        if (val < 0 || val >= schema.arity(var)) throw ParseError(lineno, "leaf value index exceeds arity");
        nodes.push_back(Node::leaf(var, val));
      } else if (kw == "P") {
        if (tok.size() < 3) throw ParseError(lineno, "malformed product line");
        const int k = to_int(tok[2], lineno, "child count");
        if (k < 1 || static_cast<int>(tok.size()) != 3 + k) throw ParseError(lineno, "product child count mismatch");
        std::vector<int> ch;
        for (int i = 0; i < k; ++i) {
          ch.push_back(to_int(tok[3 + i], lineno, "child id"));
          check_child(ch.back());
        }
        nodes.push_back(Node::product(std::move(ch)));
      } else {
        if (tok.size() < 3) throw ParseError(lineno, "malformed sum line");
        const int k = to_int(tok[2], lineno, "child count");
        if (k < 1 || static_cast<int>(tok.size()) != 3 + 2 * k) throw ParseError(lineno, "sum child count mismatch");
        std::vector<int> ch;
        std::vector<double> w;
        for (int i = 0; i < k; ++i) {
          ch.push_back(to_int(tok[3 + 2 * i], lineno, "child id"));
          check_child(ch.back());
          w.push_back(to_double(tok[4 + 2 * i], lineno));
          if (!(w.back() > 0.0) || !std::isfinite(w.back())) throw ParseError(lineno, "sum weights must be positive");
        }
        nodes.push_back(Node::sum(std::move(ch), std::move(w)));
      }
    } else if (kw == "root") {
      if (tok.size() != 2) throw ParseError(lineno, "malformed root line");
      if (root) throw ParseError(lineno, "duplicate root declaration");
      root = to_int(tok[1], lineno, "root id");
      if (*root < 0 || *root >= static_cast<int>(nodes.size())) throw ParseError(lineno, "root references unknown node");
    } else {
      throw ParseError(lineno, "unknown directive '" + std::string(kw) + "'");
    }
    if (eol == text.size()) break;
  }
  if (!header) throw ParseError(0, "missing header");
  if (schema.variables.empty()) throw ParseError(0, "no variables declared");
  if (!have_decision) throw ParseError(0, "missing decision declaration");
  if (schema.decision < 0 || schema.decision >= schema.size()) throw ParseError(decision_line, "decision index out of range");
  auto pos_label = schema.find_label(schema.decision, decision_label);
  if (!pos_label) throw ParseError(decision_line, "unknown positive decision label '" + decision_label + "'");
  schema.positive = *pos_label;
  if (!root) throw ParseError(0, "missing root");
  try {
    return Circuit(std::move(schema), std::move(nodes), *root);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }
}

std::string write_circuit(const Circuit& c) {
  const Schema& s = c.schema();
  std::ostringstream out;
  out << "pc v1\n";
  for (VarIndex v = 0; v < s.size(); ++v) {
    out << "var " << v << ' ' << s.name(v) << ' ' << s.arity(v);
    for (const auto& l : s.variables[v].labels) out << ' ' << l;
    out << '\n';
  }
  out << "decision " << s.decision << ' ' << s.variables[s.decision].labels[s.positive] << '\n';
  out << "sensitive";
  for (VarIndex v : s.sensitive) out << ' ' << v;
  out << '\n';
  char buf[40];
  for (int id = 0; id < c.size(); ++id) {
    const Node& n = c.node(id);
    switch (n.kind) {
      case NodeKind::Leaf:
        out << "L " << id << ' ' << n.var << ' ' << n.value << '\n';
        break;
      case NodeKind::Product:
        out << "P " << id << ' ' << n.children.size();
        for (int ch : n.children) out << ' ' << ch;
        out << '\n';
        break;
      case NodeKind::Sum:
        out << "S " << id << ' ' << n.children.size();
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.17g", n.weights[i]);
          out << ' ' << n.children[i] << ' ' << buf;
        }
        out << '\n';
        break;
    }
  }
  out << "root " << c.root() << '\n';
  return out.str();
}

double marginal(const Circuit& c, const Assignment& e, std::optional<ValueIndex> decision) {
  return c.evaluate_raw(make_evidence(c.schema(), e, decision)) / c.normalizer();
}

double conditional_decision(const Circuit& c, const Assignment& e) {
  const double pe = c.evaluate_raw(make_evidence(c.schema(), e));
  if (!(pe > 0.0)) throw Error(ErrorKind::ZeroEvidence, "P(e) = 0 for evidence " + e.to_string(c.schema()));
  const double pde = c.evaluate_raw(make_evidence(c.schema(), e, c.schema().positive));
  return pde / pe;
}

}  // namespace pcfair
