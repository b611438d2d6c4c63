#include <doctest.h>

#include <algorithm>
#include <set>

#include "instances.hpp"
#include "oracle.hpp"
#include "pcfair/sampling.hpp"
#include "pcfair/search.hpp"

using namespace pcfair;

namespace {

Circuit nb1() { return parse_circuit(testing_support::read_file(testing_support::fixture_path("nb1.pc"))); }

SamplerConfig runs(double delta, SamplerVariant v, std::uint64_t seed, std::uint64_t n) {
  SamplerConfig cfg;
  cfg.delta = delta;
  cfg.variant = v;
  cfg.seed = seed;
  cfg.max_runs = n;
  cfg.time_budget = std::chrono::milliseconds(60000);
  return cfg;
}

}  // namespace

TEST_CASE("both variants recover the six NB1 patterns") {
  const Circuit c = nb1();
  for (auto v : {SamplerVariant::Basic, SamplerVariant::Memo}) {
    const auto r = sample_patterns(c, runs(0.25, v, 1, 200));
    CHECK(r.runs == 200);
    CHECK(r.patterns.size() == 6);
    CHECK(r.first_seen.size() == r.patterns.size());
  }
}

TEST_CASE("same seed, same transcript") {
  const auto& inst = testing_support::standard_instances()[21];
  auto cfg = runs(0.05, SamplerVariant::Memo, 99, 30);
  cfg.record_transcript = true;
  const auto a = sample_patterns(inst.circuit, cfg);
  const auto b = sample_patterns(inst.circuit, cfg);
  CHECK(a.transcript == b.transcript);
  CHECK(a.explored == b.explored);
  REQUIRE(a.transcript.size() == 30);
  // Every run descends one literal at a time to a complete assignment.
  const int features = static_cast<int>(inst.joint.features.size());
  for (const auto& run : a.transcript) {
    REQUIRE(run.size() == static_cast<std::size_t>(features));
    for (std::size_t k = 0; k < run.size(); ++k) CHECK(run[k].size() == static_cast<int>(k) + 1);
    for (std::size_t k = 1; k < run.size(); ++k) {
      CHECK(run[k - 1].x.subset_of(run[k].x));
      CHECK(run[k - 1].y.subset_of(run[k].y));
    }
  }
}

TEST_CASE("sampled patterns are exact patterns") {
  for (int i = 0; i < 100; i += 19) {
    const auto& inst = testing_support::standard_instances()[i];
    const auto exact = find_all_patterns(inst.circuit, 0.05).patterns;
    std::set<Pattern> truth;
    for (const auto& sp : exact) truth.insert(sp.pattern);
    const auto r = sample_patterns(inst.circuit, runs(0.05, SamplerVariant::Basic, i, 20));
    for (const auto& sp : r.patterns) {
      CHECK(sp.delta > 0.05);
      CHECK(truth.count(sp.pattern) == 1);
    }
  }
}

TEST_CASE("memo variant keeps an estimate for every scored assignment") {
  const auto r = sample_patterns(nb1(), runs(0.25, SamplerVariant::Memo, 3, 10));
  CHECK(r.estimator_entries > 0);
  CHECK(r.estimator_entries <= 14);
}

TEST_CASE("estimator table starts at (delta, 1)") {
  EstimatorTable t;
  const Pattern p{{{1, 1}}, {}};
  CHECK(t.find(p) == nullptr);
  Estimate& e = t.touch(p, 0.3);
  CHECK(e.phi == 0.3);
  CHECK(e.sigma == 1);
  e.sigma = 4;
  CHECK(t.touch(p, 0.9).sigma == 4);
  CHECK(t.size() == 1);
}

TEST_CASE("time budget stops the sampler") {
  const auto& inst = testing_support::standard_instances()[99];
  SamplerConfig cfg;
  cfg.delta = 0.01;
  cfg.time_budget = std::chrono::milliseconds(20);
  const auto start = std::chrono::steady_clock::now();
  sample_patterns(inst.circuit, cfg);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(2));
}
