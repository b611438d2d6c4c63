#pragma once

#include <array>
#include <vector>

#include "pcfair/circuit.hpp"
#include "pcfair/dataset.hpp"

namespace pcfair {

enum class Structure { NaiveBayes, ChowLiu };

struct LearnConfig {
  double smoothing = 1.0;  // add-alpha pseudo-count, > 0
  Structure structure = Structure::NaiveBayes;
};

/// P(D) and P(Z_v | D) per feature. Indexing: prior[t], cond[v][t][value],
/// t a decision value index; cond is empty for the decision variable.
struct NaiveBayesModel {
  Schema schema;
  std::array<double, 2> prior{};
  std::vector<std::array<std::vector<double>, 2>> cond;
};

/// One tree over the features shared by both decision values. parent[v] is
/// -1 for the root and for the decision variable; cpt[v][t][a][b] is
/// P(Z_v = b | Z_parent = a, D = t), with a single row (a = 0) at the root.
struct ChowLiuModel {
  Schema schema;
  std::vector<int> parent;
  std::array<double, 2> prior{};
  std::vector<std::array<std::vector<std::vector<double>>, 2>> cpt;
};

NaiveBayesModel estimate_naive_bayes(const Dataset& ds, double smoothing);
ChowLiuModel estimate_chow_liu(const Dataset& ds, double smoothing);

/// Maximum spanning tree over pairwise mutual information of the features,
/// rooted at the lowest feature index. Ties go to the lowest index pair.
std::vector<int> chow_liu_tree(const Dataset& ds);

/// Empirical mutual information (nats) between two columns.
double mutual_information(const Dataset& ds, VarIndex a, VarIndex b);

Circuit compile(const NaiveBayesModel& m);
Circuit compile(const ChowLiuModel& m);

Circuit learn_naive_bayes(const Dataset& ds, const LearnConfig& cfg = {});
Circuit learn_chow_liu(const Dataset& ds, const LearnConfig& cfg = {});
Circuit learn(const Dataset& ds, const LearnConfig& cfg);

}  // namespace pcfair
