#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcfair/schema.hpp"

namespace pcfair {

enum class ColumnType { Categorical, Numeric };

/// How to read a CSV into categorical variables. Parsed from JSON:
///   {"decision": "D", "positive": "yes", "sensitive": ["S1"],
///    "types": {"Age": "numeric"}, "bins": 4,
///    "levels": {"S1": ["a", "b"]}, "strict": true, "weight": "count"}
/// Columns missing from `types` are categorical. `levels` fixes the value
/// order of a categorical column; with `strict` any other token is an
/// error, otherwise unseen tokens are appended. `weight` names a column of
/// non-negative row counts.
struct DatasetConfig {
  std::string decision;
  std::string positive;
  std::vector<std::string> sensitive;
  std::map<std::string, ColumnType> types;
  int bins = 4;
  std::map<std::string, std::vector<std::string>> levels;
  bool strict = false;
  std::optional<std::string> weight;
};

DatasetConfig parse_dataset_config(std::string_view json);

struct Dataset {
  Schema schema;
  std::vector<std::vector<int>> rows;  // one value index per schema variable
  std::vector<double> weights;         // parallel to rows
  std::vector<std::string> warnings;

  double total_weight() const;
};

/// RFC 4180 records (quoted fields, doubled quotes, CRLF or LF endings).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Numeric columns are cut into `bins` equal-frequency bins, columns with a
/// single distinct value are dropped (with a warning), categorical levels
/// are indexed by first appearance. Throws ParseError / Error(Input).
Dataset load_dataset(std::string_view csv, const DatasetConfig& cfg);

/// Bin thresholds for a numeric column: sorted[floor(k N / bins)] for
/// k = 1..bins-1, duplicates removed. Value v falls in bin #{t : t <= v}.
std::vector<double> quantile_thresholds(std::vector<double> values, int bins);

}  // namespace pcfair
