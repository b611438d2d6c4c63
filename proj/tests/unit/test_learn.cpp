#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "instances.hpp"
#include "oracle.hpp"
#include "pcfair/dataset.hpp"
#include "pcfair/learn.hpp"
#include "pcfair/search.hpp"

using namespace pcfair;

namespace {

DatasetConfig config(std::vector<std::string> sensitive = {"S1"}) {
  DatasetConfig cfg;
  cfg.decision = "D";
  cfg.positive = "1";
  cfg.sensitive = std::move(sensitive);
  cfg.weight = "w";
  return cfg;
}

// Complete-state marginals of a circuit against a joint table.
void check_matches(const Circuit& c, const oracle::Joint& j, double tol) {
  const Schema& s = c.schema();
  for (std::size_t i = 0; i < j.states(); ++i) {
    const auto z = j.decode(i);
    std::vector<Literal> lits;
    for (std::size_t f = 0; f < z.size(); ++f) lits.push_back({j.features[f], z[f]});
    CHECK(marginal(c, Assignment(lits), s.positive) == doctest::Approx(j.pos[i]).epsilon(tol));
    CHECK(marginal(c, Assignment(lits), s.negative()) == doctest::Approx(j.neg[i]).epsilon(tol));
  }
}

std::string random_csv(std::mt19937_64& rng, int columns, int rows, bool shuffle_rows = false,
                       std::uint64_t order_seed = 0) {
  std::vector<std::string> lines;
  for (int r = 0; r < rows; ++r) {
    std::string line;
    int prev = static_cast<int>(rng() % 2);
    line += std::to_string(prev);
    for (int k = 1; k < columns; ++k) {
      // Each column copies its left neighbour 70% of the time.
      const int v = (rng() % 10 < 7) ? prev : static_cast<int>(rng() % 2);
      line += "," + std::to_string(v);
      prev = v;
    }
    lines.push_back(line + ",1");
  }
  if (shuffle_rows) {
    std::mt19937_64 o(order_seed);
    std::shuffle(lines.begin(), lines.end(), o);
  }
  std::string out = "D";
  for (int k = 1; k < columns; ++k) out += ",C" + std::to_string(k);
  out += ",w\n";
  for (auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_CASE("naive Bayes from counts reproduces NB1") {
  const std::string csv =
      "D,S1,Y1,w\n"
      "1,1,1,24\n1,1,0,16\n1,0,1,6\n1,0,0,4\n"
      "0,1,1,4\n0,1,0,6\n0,0,1,16\n0,0,0,24\n";
  const auto ds = load_dataset(csv, config());
  LearnConfig cfg;
  cfg.smoothing = 1e-12;
  const Circuit c = learn_naive_bayes(ds, cfg);
  CHECK(c.structure().auditable());
  const Schema& s = c.schema();
  const VarIndex s1 = *s.find("S1"), y1 = *s.find("Y1");
  const Literal s1_one{s1, *s.find_label(s1, "1")}, y1_one{y1, *s.find_label(y1, "1")};
  CHECK(conditional_decision(c, {s1_one}) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(conditional_decision(c, {s1_one, y1_one}) == doctest::Approx(6.0 / 7.0).epsilon(1e-9));
  CHECK(marginal(c, {s1_one, y1_one}) == doctest::Approx(0.28).epsilon(1e-9));
}

TEST_CASE("identical conditionals across classes give no x-only patterns") {
  const std::string csv = "D,S1,Y1,w\n1,1,1,3\n1,0,0,3\n1,1,0,1\n0,1,1,3\n0,0,0,3\n0,1,0,1\n1,0,1,2\n0,0,1,2\n";
  const Circuit c = learn_naive_bayes(load_dataset(csv, config()));
  for (const auto& sp : find_all_patterns(c, 1e-9).patterns) CHECK_FALSE(sp.pattern.y.empty());
}

TEST_CASE("one-row dataset with add-one smoothing") {
  const auto ds = load_dataset("D,S1,Y1,w\n1,1,0,1\n0,0,1,1\n", config());
  const auto m = estimate_naive_bayes(ds, 1.0);
  const VarIndex s1 = *ds.schema.find("S1");
  const int pos = ds.schema.positive;
  // One positive row with S1 = 1: (1 + 1) / (1 + 2).
  const auto one = *ds.schema.find_label(s1, "1");
  CHECK(m.cond[s1][pos][one] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.cond[s1][pos][1 - one] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("compiled models match their parameters on every complete state") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    const Schema s = testing_support::random_schema(rng, 7, 2);
    const auto nb = testing_support::random_naive_bayes(rng, s);
    const Circuit cn = compile(nb);
    CHECK(cn.structure().auditable());
    check_matches(cn, oracle::joint_from(nb), 1e-12);
    const auto cl = testing_support::random_chow_liu(rng, s);
    const Circuit cc = compile(cl);
    CHECK(cc.structure().auditable());
    check_matches(cc, oracle::joint_from(cl), 1e-12);
  }
}

TEST_CASE("two features give a single edge") {
  const auto ds = load_dataset("D,S1,Y1,w\n1,1,1,3\n1,0,0,1\n0,1,0,2\n0,0,1,2\n", config());
  const auto tree = chow_liu_tree(ds);
  const VarIndex s1 = *ds.schema.find("S1"), y1 = *ds.schema.find("Y1");
  CHECK(tree[s1] == -1);
  CHECK(tree[y1] == s1);
}

TEST_CASE("identical columns are joined in the tree") {
  std::mt19937_64 rng(4);
  std::string csv = "D,A,B,C,w\n";
  for (int r = 0; r < 60; ++r) {
    const int d = static_cast<int>(rng() % 2), a = static_cast<int>(rng() % 2), c = static_cast<int>(rng() % 2);
    csv += std::to_string(d) + "," + std::to_string(a) + "," + std::to_string(c) + "," + std::to_string(c) + ",1\n";
  }
  const auto ds = load_dataset(csv, config({}));
  const auto tree = chow_liu_tree(ds);
  const VarIndex b = *ds.schema.find("B"), c = *ds.schema.find("C");
  CHECK((tree[c] == b || tree[b] == c));
}

TEST_CASE("mutual information against a direct count") {
  const auto ds = load_dataset("D,S1,Y1,w\n1,1,1,3\n1,0,0,1\n0,1,0,2\n0,0,1,2\n", config());
  const VarIndex s1 = *ds.schema.find("S1"), y1 = *ds.schema.find("Y1");
  // Joint counts over (S1, Y1): (1,1)=3 (0,0)=1 (1,0)=2 (0,1)=2, N = 8.
  const double p11 = 3 / 8.0, p00 = 1 / 8.0, p10 = 2 / 8.0, p01 = 2 / 8.0;
  const double ps1 = 5 / 8.0, ps0 = 3 / 8.0, py1 = 5 / 8.0, py0 = 3 / 8.0;
  const double mi = p11 * std::log(p11 / (ps1 * py1)) + p00 * std::log(p00 / (ps0 * py0)) +
                    p10 * std::log(p10 / (ps1 * py0)) + p01 * std::log(p01 / (ps0 * py1));
  CHECK(mutual_information(ds, s1, y1) == doctest::Approx(mi).epsilon(1e-12));
}

TEST_CASE("Chow-Liu circuit equals the tree network on a random dataset") {
  std::mt19937_64 rng(21);
  const auto ds = load_dataset(random_csv(rng, 6, 300), config({"C1"}));
  const auto m = estimate_chow_liu(ds, 1.0);
  const Circuit c = learn_chow_liu(ds);
  CHECK(c.structure().auditable());
  check_matches(c, oracle::joint_from(m), 1e-9);
}

TEST_CASE("Chow-Liu output does not depend on row order") {
  std::mt19937_64 a(33), b(33);
  // Fixed level order, so both datasets index values identically.
  auto cfg = config({"C1"});
  for (const char* col : {"D", "C1", "C2", "C3", "C4", "C5"}) cfg.levels[col] = {"0", "1"};
  const auto ds1 = load_dataset(random_csv(a, 6, 200), cfg);
  const auto ds2 = load_dataset(random_csv(b, 6, 200, true, 5), cfg);
  CHECK(chow_liu_tree(ds1) == chow_liu_tree(ds2));
  const auto j1 = oracle::joint_from(learn_chow_liu(ds1)), j2 = oracle::joint_from(learn_chow_liu(ds2));
  REQUIRE(j1.states() == j2.states());
  for (std::size_t i = 0; i < j1.states(); ++i) CHECK(j1.pos[i] == doctest::Approx(j2.pos[i]).epsilon(1e-12));
}
