#include "instances.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testing_support {

using pcfair::ChowLiuModel;
using pcfair::NaiveBayesModel;
using pcfair::Schema;
using pcfair::VarIndex;

namespace {

std::vector<double> random_dist(std::mt19937_64& rng, int arity, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  if (arity == 2) {
    const double p = u(rng);
    return {1.0 - p, p};
  }
  std::vector<double> d(arity);
  double total = 0.0;
  for (double& x : d) total += x = u(rng);
  for (double& x : d) x /= total;
  return d;
}

std::vector<VarIndex> features(const Schema& s) {
  std::vector<VarIndex> f;
  for (VarIndex v = 0; v < s.size(); ++v)
    if (v != s.decision) f.push_back(v);
  return f;
}

pcfair::Variable binary(std::string name) { return {std::move(name), {"v0", "v1"}}; }

}  // namespace

Schema random_schema(std::mt19937_64& rng, int variables, int sensitive) {
  Schema s;
  s.decision = static_cast<VarIndex>(rng() % static_cast<unsigned>(variables));
  s.positive = 1;
  int next = 0;
  for (VarIndex v = 0; v < variables; ++v) {
    if (v == s.decision)
      s.variables.push_back({"D", {"neg", "pos"}});
    else
      s.variables.push_back(binary("Z" + std::to_string(next++)));
  }
  auto f = features(s);
  std::shuffle(f.begin(), f.end(), rng);
  s.sensitive.assign(f.begin(), f.begin() + sensitive);
  std::sort(s.sensitive.begin(), s.sensitive.end());
  s.validate();
  return s;
}

NaiveBayesModel random_naive_bayes(std::mt19937_64& rng, const Schema& s, double lo, double hi) {
  NaiveBayesModel m;
  m.schema = s;
  const auto prior = random_dist(rng, 2, lo, hi);
  m.prior = {prior[0], prior[1]};
  m.cond.resize(s.size());
  for (VarIndex v : features(s))
    for (int t = 0; t < 2; ++t) m.cond[v][t] = random_dist(rng, s.arity(v), lo, hi);
  return m;
}

ChowLiuModel random_chow_liu(std::mt19937_64& rng, const Schema& s, double lo, double hi) {
  ChowLiuModel m;
  m.schema = s;
  const auto prior = random_dist(rng, 2, lo, hi);
  m.prior = {prior[0], prior[1]};
  m.parent.assign(s.size(), -1);
  m.cpt.resize(s.size());
  auto f = features(s);
  std::shuffle(f.begin(), f.end(), rng);
  // Random recursive tree: each feature after the first hangs off an earlier one.
  for (std::size_t i = 1; i < f.size(); ++i) m.parent[f[i]] = f[rng() % i];
  for (VarIndex v : f) {
    const int rows = m.parent[v] < 0 ? 1 : s.arity(m.parent[v]);
    for (int t = 0; t < 2; ++t) {
      m.cpt[v][t].clear();
      for (int a = 0; a < rows; ++a) m.cpt[v][t].push_back(random_dist(rng, s.arity(v), lo, hi));
    }
  }
  return m;
}

const std::vector<Instance>& standard_instances() {
  static const std::vector<Instance> instances = [] {
    std::vector<Instance> out;
    std::mt19937_64 rng(20240607);
    for (int i = 0; i < 100; ++i) {
      const int variables = 6 + i % 5;
      const int sensitive = 2 + (i / 5) % 3;
      const Schema s = random_schema(rng, variables, sensitive);
      const std::string tag = "#" + std::to_string(i) + " (" + std::to_string(variables) + " vars, " +
                              std::to_string(sensitive) + " sensitive, ";
      if (i % 2 == 0) {
        const auto m = random_naive_bayes(rng, s);
        out.push_back({tag + "nb)", pcfair::compile(m), oracle::joint_from(m)});
      } else {
        const auto m = random_chow_liu(rng, s);
        out.push_back({tag + "chow-liu)", pcfair::compile(m), oracle::joint_from(m)});
      }
    }
    return out;
  }();
  return instances;
}

NaiveBayesModel compas_like() {
  NaiveBayesModel m;
  Schema& s = m.schema;
  s.variables = {
      {"HighRisk", {"no", "yes"}},
      {"Race", {"other", "african_american"}},
      {"Sex", {"female", "male"}},
      {"AgeGroup", {"under25", "25to45", "over45"}},
      {"Priors", {"none", "1to3", "over3"}},
      {"ChargeDegree", {"misdemeanor", "felony"}},
      {"Married", {"no", "yes"}},
  };
  s.decision = 0;
  s.positive = 1;
  s.sensitive = {1, 2};
  m.prior = {0.55, 0.45};
  m.cond.resize(s.size());
  // cond[v][no], cond[v][yes]
  m.cond[1] = {std::vector<double>{0.58, 0.42}, std::vector<double>{0.38, 0.62}};
  m.cond[2] = {std::vector<double>{0.24, 0.76}, std::vector<double>{0.14, 0.86}};
  m.cond[3] = {std::vector<double>{0.15, 0.55, 0.30}, std::vector<double>{0.35, 0.55, 0.10}};
  m.cond[4] = {std::vector<double>{0.45, 0.40, 0.15}, std::vector<double>{0.20, 0.35, 0.45}};
  m.cond[5] = {std::vector<double>{0.42, 0.58}, std::vector<double>{0.30, 0.70}};
  m.cond[6] = {std::vector<double>{0.78, 0.22}, std::vector<double>{0.88, 0.12}};
  s.validate();
  return m;
}

NaiveBayesModel class_independent(int n) {
  NaiveBayesModel m;
  Schema& s = m.schema;
  s.variables.push_back({"D", {"neg", "pos"}});
  for (int i = 0; i < n; ++i) s.variables.push_back(binary("Z" + std::to_string(i)));
  s.decision = 0;
  s.positive = 1;
  s.sensitive = {1, 2};
  m.prior = {0.3, 0.7};
  m.cond.resize(s.size());
  for (int v = 1; v <= n; ++v) {
    const double p = 0.1 + 0.8 * v / (n + 1);
    m.cond[v] = {std::vector<double>{1 - p, p}, std::vector<double>{1 - p, p}};
  }
  s.validate();
  return m;
}

NaiveBayesModel nb1_model() {
  NaiveBayesModel m;
  Schema& s = m.schema;
  s.variables = {{"D", {"neg", "pos"}}, binary("S1"), binary("Y1")};
  s.decision = 0;
  s.positive = 1;
  s.sensitive = {1};
  m.prior = {0.5, 0.5};
  m.cond.resize(3);
  m.cond[1] = {std::vector<double>{0.8, 0.2}, std::vector<double>{0.2, 0.8}};
  m.cond[2] = {std::vector<double>{0.6, 0.4}, std::vector<double>{0.4, 0.6}};
  return m;
}

std::string fixture_path(const std::string& name) { return std::string(PCFAIR_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testing_support
