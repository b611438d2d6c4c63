#include "pcfair/schema.hpp"

#include <algorithm>
#include <set>

#include "pcfair/error.hpp"

namespace pcfair {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Input: return "input error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::ZeroEvidence: return "zero evidence";
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::InfeasibleRepair: return "infeasible repair";
    case ErrorKind::IncompatibleStructure: return "incompatible structure";
    case ErrorKind::EnumerationCapExceeded: return "enumeration cap exceeded";
    case ErrorKind::IncompleteInput: return "incomplete input";
  }
  return "error";
}

VarMask Schema::all_mask() const {
  return size() >= 64 ? ~VarMask{0} : var_bit(size()) - 1;
}

VarMask Schema::sensitive_mask() const {
  VarMask m = 0;
  for (VarIndex v : sensitive) m |= var_bit(v);
  return m;
}

std::optional<VarIndex> Schema::find(std::string_view name) const {
  for (VarIndex v = 0; v < size(); ++v)
    if (variables[v].name == name) return v;
  return std::nullopt;
}

std::optional<ValueIndex> Schema::find_label(VarIndex v, std::string_view label) const {
  const auto& labels = variables[v].labels;
  for (ValueIndex i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[i] == label) return i;
  return std::nullopt;
}

void Schema::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Validation, msg); };
  if (variables.empty()) fail("schema has no variables");
  if (size() > kMaxVariables) fail("more than 64 variables are not supported");
  std::set<std::string> names;
  for (const auto& var : variables) {
    if (var.arity() < 2) fail("variable " + var.name + " has arity < 2");
    if (var.arity() > kMaxArity) fail("variable " + var.name + " has arity > 64");
    if (!names.insert(var.name).second) fail("duplicate variable name " + var.name);
    std::set<std::string> labels(var.labels.begin(), var.labels.end());
    if (labels.size() != var.labels.size()) fail("duplicate value label in variable " + var.name);
  }
  if (decision < 0 || decision >= size()) fail("decision index out of range");
  if (arity(decision) != 2) fail("decision variable must be binary");
  if (positive < 0 || positive >= 2) fail("positive decision value out of range");
  std::set<VarIndex> seen;
  for (VarIndex s : sensitive) {
    if (s < 0 || s >= size()) fail("sensitive index out of range");
    if (s == decision) fail("decision variable cannot be sensitive");
    if (!seen.insert(s).second) fail("duplicate sensitive variable");
  }
}

Assignment::Assignment(std::initializer_list<Literal> lits)
    : Assignment(std::vector<Literal>(lits)) {}

Assignment::Assignment(std::vector<Literal> lits) : lits_(std::move(lits)) {
  std::sort(lits_.begin(), lits_.end());
  for (const auto& l : lits_) {
    if (l.var < 0 || l.var >= kMaxVariables || l.value < 0)
      throw Error(ErrorKind::Input, "literal out of range");
    if (has_var(mask_, l.var)) throw Error(ErrorKind::Input, "duplicate variable in assignment");
    mask_ |= var_bit(l.var);
  }
}

std::optional<ValueIndex> Assignment::value_of(VarIndex v) const {
  if (!contains(v)) return std::nullopt;
  for (const auto& l : lits_)
    if (l.var == v) return l.value;
  return std::nullopt;
}

Assignment Assignment::with(Literal lit) const {
  if (contains(lit.var)) throw Error(ErrorKind::Input, "variable already assigned");
  Assignment out;
  out.lits_.reserve(lits_.size() + 1);
  auto pos = std::lower_bound(lits_.begin(), lits_.end(), lit);
  out.lits_.insert(out.lits_.end(), lits_.begin(), pos);
  out.lits_.push_back(lit);
  out.lits_.insert(out.lits_.end(), pos, lits_.end());
  out.mask_ = mask_ | var_bit(lit.var);
  return out;
}

Assignment Assignment::without(VarIndex v) const {
  Assignment out;
  for (const auto& l : lits_)
    if (l.var != v) out.lits_.push_back(l);
  out.mask_ = mask_ & ~var_bit(v);
  return out;
}

Assignment Assignment::merged(const Assignment& other) const {
  if (mask_ & other.mask_) throw Error(ErrorKind::Input, "merging overlapping assignments");
  Assignment out;
  out.lits_.reserve(lits_.size() + other.lits_.size());
  std::merge(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end(),
             std::back_inserter(out.lits_));
  out.mask_ = mask_ | other.mask_;
  return out;
}

bool Assignment::subset_of(const Assignment& other) const {
  if ((mask_ & other.mask_) != mask_) return false;
  return std::includes(other.lits_.begin(), other.lits_.end(), lits_.begin(), lits_.end());
}

std::string Assignment::to_string(const Schema& schema) const {
  std::string out;
  for (const auto& l : lits_) {
    if (!out.empty()) out += '&';
    out += schema.name(l.var);
    out += '=';
    out += schema.variables[l.var].labels[l.value];
  }
  return out;
}

std::size_t hash_value(const Assignment& a) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& l : a) {
    h ^= static_cast<std::uint64_t>(l.var) * 131 + static_cast<std::uint64_t>(l.value) + 1;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

Evidence make_evidence(const Schema& schema, const Assignment& a, std::optional<ValueIndex> decision) {
  Evidence ev(schema.size(), -1);
  for (const auto& l : a) {
    if (l.var >= schema.size() || l.value >= schema.arity(l.var))
      throw Error(ErrorKind::Input, "assignment does not fit the schema");
    if (l.var == schema.decision)
      throw Error(ErrorKind::Input, "assignments must not contain the decision variable");
    ev[l.var] = l.value;
  }
  if (decision) ev[schema.decision] = *decision;
  return ev;
}

}  // namespace pcfair
