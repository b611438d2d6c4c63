#include <doctest.h>

#include <cmath>
#include <random>

#include "instances.hpp"
#include "oracle.hpp"

using namespace pcfair;

// The reference computations are checked against each other and against
// hand values before the library is checked against them.

TEST_CASE("NB1 joint from the fixture file and from parameters agree") {
  const Circuit c = parse_circuit(testing_support::read_file(testing_support::fixture_path("nb1.pc")));
  const auto a = oracle::joint_from(c), b = oracle::joint_from(testing_support::nb1_model());
  REQUIRE(a.states() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.pos[i] == doctest::Approx(b.pos[i]).epsilon(1e-15));
    CHECK(a.neg[i] == doctest::Approx(b.neg[i]).epsilon(1e-15));
  }
  // P(d, S1=1, Y1=1) = 0.5 * 0.8 * 0.6
  CHECK(b.pos[3] == doctest::Approx(0.24).epsilon(1e-15));
}

TEST_CASE("NB1 lattice values") {
  const auto j = oracle::joint_from(testing_support::nb1_model());
  const auto parts = oracle::partial_marginals(j);
  const auto t = oracle::pattern_table(j, parts);
  CHECK(t.size() == 15);
  const auto k = t.index_of(j, Pattern{{{1, 1}}, {{2, 1}}});
  CHECK(t.delta[k] == doctest::Approx(6.0 / 7.0 - 0.6).epsilon(1e-12));
  CHECK(t.prob[k] == doctest::Approx(0.28).epsilon(1e-12));
  CHECK(t.pattern(j, k) == Pattern{{{1, 1}}, {{2, 1}}});
  CHECK(oracle::all_patterns(j, t, 0.25).size() == 6);
  CHECK(oracle::maximal(j, t, 0.25).empty());
  CHECK(oracle::minimal(j, t, 0.25) == std::vector<Pattern>{Pattern{{{1, 0}}, {}}, Pattern{{{1, 1}}, {}}});
}

TEST_CASE("divergence: closed form, bisection and a grid agree") {
  // NB1 ({S1=1},{Y1=1}) at 0.1.
  CHECK(oracle::divergence(0.24, 0.28, 0.3, 0.5, 0.1) == doctest::Approx(0.079248).epsilon(1e-5));
  CHECK(oracle::divergence_bisect(0.24, 0.28, 0.3, 0.5, 0.1) == doctest::Approx(0.079248).epsilon(1e-5));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 200; ++i) {
    const double p_y = u(rng), p_xy = p_y * u(rng), pd_xy = p_xy * u(rng);
    const double pd_y = pd_xy + (p_y - p_xy) * u(rng);
    const double d = 0.2 * u(rng);
    const double a = oracle::divergence(pd_xy, p_xy, pd_y, p_y, d);
    const double b = oracle::divergence_bisect(pd_xy, p_xy, pd_y, p_y, d);
    CHECK(std::isnan(a) == std::isnan(b));
    if (!std::isnan(a)) CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
  // Grid over alpha at step 1e-6 for the NB1 case.
  double best = INFINITY;
  for (double alpha = 1e-6; alpha < 0.28 / 0.24; alpha += 1e-6) {
    const double beta = (0.28 - alpha * 0.24) / 0.04;
    const double dq = std::abs(alpha * 0.24 / 0.28 - (0.3 - 0.24 + alpha * 0.24) / 0.5);
    if (dq <= 0.1) best = std::min(best, 0.24 * std::log(1 / alpha) + 0.04 * std::log(1 / beta));
  }
  CHECK(best == doctest::Approx(0.079248).epsilon(1e-5));
}

TEST_CASE("Pareto sweep equals the quadratic definition") {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 50; ++round) {
    std::vector<ScoredPattern> pts;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      ScoredPattern sp;
      sp.pattern = Pattern{{{1, i % 2}}, {{2 + i / 2, 0}}};
      // Coarse values so ties occur.
      sp.probability = static_cast<double>(rng() % 8) / 8;
      sp.delta = static_cast<double>(rng() % 8) / 8;
      pts.push_back(sp);
    }
    CHECK(oracle::pareto_sweep(pts) == oracle::pareto_quadratic(pts));
  }
}

TEST_CASE("lattice summaries equal quadratic ones on small instances") {
  for (int i = 0; i < 100; i += 5) {
    const auto& inst = testing_support::standard_instances()[i];
    const auto parts = oracle::partial_marginals(inst.joint);
    const auto t = oracle::pattern_table(inst.joint, parts);
    const auto sigma = oracle::all_patterns(inst.joint, t, 0.1);
    if (sigma.size() > 2000) continue;
    const Schema& s = inst.joint.schema;
    CHECK(oracle::maximal(inst.joint, t, 0.1) == oracle::maximal_quadratic(s, sigma));
    CHECK(oracle::minimal(inst.joint, t, 0.1) == oracle::minimal_quadratic(s, sigma));
  }
}

TEST_CASE("extension maximum equals a direct scan") {
  const auto& inst = testing_support::standard_instances()[0];
  const auto parts = oracle::partial_marginals(inst.joint);
  const auto t = oracle::pattern_table(inst.joint, parts);
  std::vector<double> values(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) values[k] = std::isnan(t.delta[k]) ? -INFINITY : t.delta[k];
  const auto ext = oracle::extension_max(t, values);
  std::mt19937_64 rng(1);
  for (int q = 0; q < 50; ++q) {
    const std::size_t k = rng() % t.size();
    const Pattern p = t.pattern(inst.joint, k);
    VarMask excluded = 0;
    for (VarIndex v : inst.joint.features)
      if (!has_var(p.mask(), v) && rng() % 3 == 0) excluded |= var_bit(v);
    double want = -INFINITY;
    for (std::size_t m = 0; m < t.size(); ++m) {
      const Pattern o = t.pattern(inst.joint, m);
      if (p.x.subset_of(o.x) && p.y.subset_of(o.y) && (o.mask() & excluded) == 0) want = std::max(want, values[m]);
    }
    CHECK(ext.query(inst.joint, p, excluded) == want);
  }
}

TEST_CASE("joint tables from compiled circuits match the parameters") {
  for (int i = 0; i < 100; i += 10) {
    const auto& inst = testing_support::standard_instances()[i];
    const auto j = oracle::joint_from(inst.circuit);
    for (std::size_t k = 0; k < j.states(); ++k) {
      CHECK(j.pos[k] == doctest::Approx(inst.joint.pos[k]).epsilon(1e-12));
      CHECK(j.neg[k] == doctest::Approx(inst.joint.neg[k]).epsilon(1e-12));
    }
  }
}
