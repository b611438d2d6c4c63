#include <doctest.h>

#include <random>
#include <string>

#include "instances.hpp"
#include "oracle.hpp"
#include "pcfair/circuit.hpp"
#include "pcfair/error.hpp"

using namespace pcfair;
using testing_support::fixture_path;
using testing_support::read_file;

namespace {

Circuit nb1() { return parse_circuit(read_file(fixture_path("nb1.pc"))); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

int parse_error_line(const std::string& text) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("NB1 parses into a decision-rooted 13-node circuit") {
  const Circuit c = nb1();
  CHECK(c.size() == 13);
  CHECK(c.root() == 12);
  const auto& r = c.structure();
  CHECK(r.smooth);
  CHECK(r.decomposable);
  CHECK(r.deterministic);
  CHECK(r.decision_rooted);
  CHECK(r.compatible);
  CHECK(r.auditable());
  CHECK(r.pairing.size() == 2);
}

TEST_CASE("permuting product children keeps every structural flag") {
  std::string text = read_file(fixture_path("nb1.pc"));
  text = replace(text, "P 10 3 0 6 7", "P 10 3 7 0 6");
  text = replace(text, "P 11 3 1 8 9", "P 11 3 9 8 1");
  const auto r = parse_circuit(text).structure();
  CHECK(r.auditable());
}

TEST_CASE("sum over mismatched scopes is not smooth") {
  const std::string text =
      "pc v1\nvar 0 D 2 neg pos\nvar 1 X 2 a b\nvar 2 Y 2 a b\ndecision 0 pos\n"
      "L 0 0 1\nL 1 0 0\nL 2 1 0\nL 3 1 1\nL 4 2 0\nL 5 2 1\n"
      "S 6 2 4 0.5 5 0.5\nP 7 2 2 6\nS 8 2 3 0.5 7 0.5\nS 9 2 4 0.5 5 0.5\nP 10 3 0 8 9\nP 11 3 1 8 9\n"
      "S 12 2 10 0.5 11 0.5\nroot 12\n";
  const auto r = parse_circuit(text).structure();
  CHECK_FALSE(r.smooth);
  CHECK_FALSE(r.auditable());
}

TEST_CASE("parse errors name the offending line") {
  const std::string text = read_file(fixture_path("nb1.pc"));
  CHECK_THROWS_AS(parse_circuit(""), ParseError);
  CHECK(parse_error_line(replace(text, "S 6 2 2 0.8 3 0.2", "S 6 2 2 0.0 3 0.2")) == 13);
  CHECK(parse_error_line(replace(text, "P 10 3 0 6 7", "P 10 3 0 6 77")) == 17);
  CHECK(parse_error_line(replace(text, "L 5 2 0", "L 4 2 0")) == 12);
  CHECK(parse_error_line(replace(text, "root 12\n", "")) == 0);
  CHECK(parse_error_line(replace(text, "L 3 1 0", "L 3 1")) == 10);
}

TEST_CASE("NB1 marginals and conditionals") {
  const Circuit c = nb1();
  CHECK(marginal(c, {{1, 1}, {2, 1}}) == doctest::Approx(0.28).epsilon(1e-12));
  CHECK(marginal(c, {}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marginal(c, {}, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(conditional_decision(c, {{1, 1}}) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(conditional_decision(c, {{1, 1}, {2, 1}}) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
  CHECK(conditional_decision(c, {}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unnormalized weights are normalized globally") {
  std::string text = read_file(fixture_path("nb1.pc"));
  text = replace(text, "S 12 2 10 0.5 11 0.5", "S 12 2 10 3 11 3");
  const Circuit c = parse_circuit(text);
  CHECK(marginal(c, {}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(marginal(c, {{1, 1}, {2, 1}}) == doctest::Approx(0.28).epsilon(1e-12));
}

TEST_CASE("conditioning on zero-probability evidence fails") {
  std::string text = read_file(fixture_path("nb1.pc"));
  // Y1 = v1 impossible under both classes.
  text = replace(text, "S 7 2 4 0.6 5 0.4", "S 7 1 5 1");
  text = replace(text, "S 9 2 4 0.4 5 0.6", "S 9 1 5 1");
  const Circuit c = parse_circuit(text);
  CHECK(marginal(c, {{2, 1}}) == 0.0);
  CHECK_THROWS_AS(conditional_decision(c, {{2, 1}}), Error);
}

TEST_CASE("marginals agree with enumeration on random circuits") {
  const auto& all = testing_support::standard_instances();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; i += 9) {
    const auto& inst = all[i];
    const auto parts = oracle::partial_marginals(inst.joint);
    for (int q = 0; q < 40; ++q) {
      const std::size_t k = rng() % parts.p.size();
      std::vector<Literal> lits;
      std::size_t rest = k;
      for (std::size_t f = 0; f < parts.radix.size(); ++f) {
        const int code = static_cast<int>(rest % parts.radix[f]);
        rest /= parts.radix[f];
        if (code > 0) lits.push_back({inst.joint.features[f], code - 1});
      }
      const Assignment e(lits);
      CHECK(marginal(inst.circuit, e) == doctest::Approx(parts.p[k]).epsilon(1e-12));
      CHECK(marginal(inst.circuit, e, inst.circuit.schema().positive) == doctest::Approx(parts.pd[k]).epsilon(1e-12));
      if (parts.p[k] > 0)
        CHECK(conditional_decision(inst.circuit, e) == doctest::Approx(parts.pd[k] / parts.p[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("marginal properties: bounded, monotone under extension, complete states sum to one") {
  for (int i = 0; i < 100; i += 13) {
    const auto& inst = testing_support::standard_instances()[i];
    const Schema& s = inst.circuit.schema();
    double total = 0.0;
    for (std::size_t k = 0; k < inst.joint.states(); ++k) {
      const auto z = inst.joint.decode(k);
      std::vector<Literal> lits;
      for (std::size_t f = 0; f < z.size(); ++f) lits.push_back({inst.joint.features[f], z[f]});
      const Assignment full(lits);
      const double pf = marginal(inst.circuit, full);
      total += pf;
      // Drop literals one at a time: the marginal never decreases.
      Assignment e = full;
      double prev = pf;
      for (const Literal& l : lits) {
        e = e.without(l.var);
        const double pe = marginal(inst.circuit, e);
        CHECK(pe >= prev - 1e-15);
        CHECK(pe <= 1.0 + 1e-12);
        prev = pe;
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    (void)s;
  }
}

TEST_CASE("validation is idempotent and insensitive to node relabeling") {
  const Circuit c = nb1();
  const auto a = validate_structure(c);
  const auto b = validate_structure(c);
  CHECK(a.auditable() == b.auditable());
  CHECK(a.problems == b.problems);
  // Same circuit with leaves listed in a different id order.
  const std::string relabeled =
      "pc v1\nvar 0 D 2 neg pos\nvar 1 S1 2 v0 v1\nvar 2 Y1 2 v0 v1\ndecision 0 pos\nsensitive 1\n"
      "L 0 2 0\nL 1 2 1\nL 2 1 0\nL 3 1 1\nL 4 0 0\nL 5 0 1\n"
      "S 6 2 1 0.4 0 0.6\nS 7 2 3 0.2 2 0.8\nS 8 2 1 0.6 0 0.4\nS 9 2 3 0.8 2 0.2\n"
      "P 10 3 4 7 6\nP 11 3 5 9 8\nS 12 2 11 0.5 10 0.5\nroot 12\n";
  const Circuit r = parse_circuit(relabeled);
  const auto rs = r.structure();
  CHECK(rs.smooth == a.smooth);
  CHECK(rs.decomposable == a.decomposable);
  CHECK(rs.deterministic == a.deterministic);
  CHECK(rs.decision_rooted == a.decision_rooted);
  CHECK(rs.compatible == a.compatible);
  const auto jr = oracle::joint_from(r), jc = oracle::joint_from(c);
  for (std::size_t k = 0; k < jr.states(); ++k) {
    CHECK(jr.pos[k] == doctest::Approx(jc.pos[k]).epsilon(1e-15));
    CHECK(jr.neg[k] == doctest::Approx(jc.neg[k]).epsilon(1e-15));
  }
}

TEST_CASE("a product root is not decision-rooted") {
  const Circuit c = parse_circuit(read_file(fixture_path("product_root.pc")));
  CHECK_FALSE(c.structure().decision_rooted);
  CHECK_THROWS_AS(c.require_auditable(), Error);
}
