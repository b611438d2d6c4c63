#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pcfair/schema.hpp"

namespace pcfair {

enum class NodeKind : std::uint8_t { Leaf, Product, Sum };

struct Node {
  NodeKind kind = NodeKind::Leaf;
  VarIndex var = -1;      // leaves only
  ValueIndex value = -1;  // leaves only
  std::vector<int> children;
  std::vector<double> weights;  // sums only, parallel to children
  VarMask scope = 0;            // computed

  static Node leaf(VarIndex var, ValueIndex value);
  static Node product(std::vector<int> children);
  static Node sum(std::vector<int> children, std::vector<double> weights);
};

/// One child of a decision-rooted root: the product holding the decision
/// indicator, and its remaining factors (the class-conditional subcircuit).
struct DecisionBranch {
  int product = -1;
  int indicator = -1;
  double weight = 0.0;
  std::vector<int> factors;  // sorted by lowest variable in scope
};

struct StructureReport {
  bool smooth = false;
  bool decomposable = false;
  bool deterministic = false;
  bool decision_rooted = false;
  bool compatible = false;
  std::vector<std::string> problems;

  // Valid only when decision_rooted.
  DecisionBranch positive;
  DecisionBranch negative;
  /// Scope-aligned (positive factor, negative factor) pairs at the branch level.
  std::vector<std::pair<int, int>> pairing;

  bool auditable() const {
    return smooth && decomposable && deterministic && decision_rooted && compatible;
  }
};

/// Immutable probabilistic circuit over a Schema. Node ids are dense and
/// topologically ordered (children before parents).
class Circuit {
 public:
  /// Computes scopes and validation flags. Throws ParseError(0, ...) for
  /// violations of the node invariants (bad references, non-positive weights,
  /// root not covering every variable).
  Circuit(Schema schema, std::vector<Node> nodes, int root);

  const Schema& schema() const { return schema_; }
  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[id]; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int root() const { return root_; }
  const StructureReport& structure() const { return report_; }

  /// Product children ordered by lowest scope variable, so two same-scope
  /// products of compatible circuits pair up positionally.
  std::span<const int> factors(int product_id) const { return factor_order_[product_id]; }

  /// Unnormalized bottom-up value of every node under `ev`.
  void evaluate_nodes(const Evidence& ev, std::vector<double>& values) const;
  double evaluate_raw(const Evidence& ev) const;
  /// Root value with no evidence; marginals divide by it.
  double normalizer() const { return normalizer_; }

  /// Throws Error(Validation) unless every structural flag holds.
  void require_auditable() const;

 private:
  Schema schema_;
  std::vector<Node> nodes_;
  int root_;
  std::vector<std::vector<int>> factor_order_;
  StructureReport report_;
  double normalizer_ = 1.0;
};

Circuit parse_circuit(std::string_view text);
std::string write_circuit(const Circuit& c);
StructureReport validate_structure(const Circuit& c);

/// P(e) (and P(D=decision, e) when a decision value is supplied).
double marginal(const Circuit& c, const Assignment& e, std::optional<ValueIndex> decision = std::nullopt);
/// P(d | e). Throws Error(ZeroEvidence) when P(e) = 0.
double conditional_decision(const Circuit& c, const Assignment& e);

}  // namespace pcfair
