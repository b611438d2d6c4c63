#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pcfair/learn.hpp"
#include "oracle.hpp"

namespace testing_support {

/// A compiled random model together with its brute-force joint table.
struct Instance {
  std::string label;
  pcfair::Circuit circuit;
  oracle::Joint joint;
};

/// Binary schema with `variables` variables (decision included), `sensitive`
/// sensitive features and the decision at a random position.
pcfair::Schema random_schema(std::mt19937_64& rng, int variables, int sensitive);

pcfair::NaiveBayesModel random_naive_bayes(std::mt19937_64& rng, const pcfair::Schema& s, double lo = 0.05,
                                           double hi = 0.95);
pcfair::ChowLiuModel random_chow_liu(std::mt19937_64& rng, const pcfair::Schema& s, double lo = 0.05,
                                     double hi = 0.95);

/// The 100 seeded instances shared by the oracle checks: alternating naive
/// Bayes and Chow-Liu, 6 to 10 binary variables, 2 to 4 sensitive.
const std::vector<Instance>& standard_instances();

/// The 7-variable naive Bayes shaped like a recidivism model (race and sex
/// sensitive, decision "high risk").
pcfair::NaiveBayesModel compas_like();

/// NB whose feature conditionals do not depend on the decision.
pcfair::NaiveBayesModel class_independent(int features);

/// The NB1 fixture as model parameters.
pcfair::NaiveBayesModel nb1_model();

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);

}  // namespace testing_support
