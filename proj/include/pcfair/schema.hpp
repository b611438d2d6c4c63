#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcfair {

using VarIndex = int;
using ValueIndex = int;

/// Set of variable indices. Circuits are limited to kMaxVariables variables.
using VarMask = std::uint64_t;

inline constexpr int kMaxVariables = 64;
inline constexpr int kMaxArity = 64;

constexpr VarMask var_bit(VarIndex v) { return VarMask{1} << v; }
constexpr bool has_var(VarMask m, VarIndex v) { return (m >> v) & 1U; }
constexpr int var_count(VarMask m) { return std::popcount(m); }

struct Variable {
  std::string name;
  std::vector<std::string> labels;

  int arity() const { return static_cast<int>(labels.size()); }
};

/// Variable catalog: the decision variable D, its favorable value d, and the
/// sensitive subset S of the remaining variables Z.
struct Schema {
  std::vector<Variable> variables;
  VarIndex decision = 0;
  ValueIndex positive = 1;
  std::vector<VarIndex> sensitive;

  int size() const { return static_cast<int>(variables.size()); }
  int arity(VarIndex v) const { return variables[v].arity(); }
  const std::string& name(VarIndex v) const { return variables[v].name; }

  VarMask all_mask() const;
  /// Z: every variable except the decision.
  VarMask feature_mask() const { return all_mask() & ~var_bit(decision); }
  VarMask sensitive_mask() const;
  bool is_sensitive(VarIndex v) const { return has_var(sensitive_mask(), v); }
  ValueIndex negative() const { return positive == 0 ? 1 : 0; }

  std::optional<VarIndex> find(std::string_view name) const;
  std::optional<ValueIndex> find_label(VarIndex v, std::string_view label) const;

  /// Throws Error(Validation) when an invariant is broken.
  void validate() const;
};

struct Literal {
  VarIndex var = 0;
  ValueIndex value = 0;

  auto operator<=>(const Literal&) const = default;
};

/// Partial assignment to feature variables, kept sorted by variable index.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::initializer_list<Literal> lits);
  explicit Assignment(std::vector<Literal> lits);

  bool empty() const { return lits_.empty(); }
  int size() const { return static_cast<int>(lits_.size()); }
  auto begin() const { return lits_.begin(); }
  auto end() const { return lits_.end(); }
  const Literal& operator[](std::size_t i) const { return lits_[i]; }
  const std::vector<Literal>& literals() const { return lits_; }

  VarMask mask() const { return mask_; }
  bool contains(VarIndex v) const { return has_var(mask_, v); }
  std::optional<ValueIndex> value_of(VarIndex v) const;

  Assignment with(Literal lit) const;
  Assignment without(VarIndex v) const;
  /// Union of two assignments over disjoint variables.
  Assignment merged(const Assignment& other) const;
  /// True when every literal of this assignment is also in `other`.
  bool subset_of(const Assignment& other) const;

  std::string to_string(const Schema& schema) const;

  friend bool operator==(const Assignment& a, const Assignment& b) { return a.lits_ == b.lits_; }
  friend auto operator<=>(const Assignment& a, const Assignment& b) { return a.lits_ <=> b.lits_; }

 private:
  std::vector<Literal> lits_;
  VarMask mask_ = 0;
};

std::size_t hash_value(const Assignment& a);

/// Dense evidence vector: one entry per schema variable, -1 when unobserved.
using Evidence = std::vector<int>;

Evidence make_evidence(const Schema& schema, const Assignment& a,
                       std::optional<ValueIndex> decision = std::nullopt);

}  // namespace pcfair

template <>
struct std::hash<pcfair::Assignment> {
  std::size_t operator()(const pcfair::Assignment& a) const { return pcfair::hash_value(a); }
};
