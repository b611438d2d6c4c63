#include "pcfair/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "pcfair/error.hpp"

namespace pcfair {

double Dataset::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

DatasetConfig parse_dataset_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("schema config: ") + e.what());
  }
  auto bad = [](const std::string& msg) { return Error(ErrorKind::Input, "schema config: " + msg); };
  if (!j.is_object()) throw bad("expected a JSON object");
  DatasetConfig cfg;
  try {
    if (!j.contains("decision") || !j.contains("positive")) throw bad("'decision' and 'positive' are required");
    cfg.decision = j.at("decision").get<std::string>();
    cfg.positive = j.at("positive").get<std::string>();
    if (j.contains("sensitive")) cfg.sensitive = j.at("sensitive").get<std::vector<std::string>>();
    if (j.contains("bins")) cfg.bins = j.at("bins").get<int>();
    if (j.contains("strict")) cfg.strict = j.at("strict").get<bool>();
    if (j.contains("weight")) cfg.weight = j.at("weight").get<std::string>();
    if (j.contains("types")) {
      for (const auto& [name, type] : j.at("types").items()) {
        const auto t = type.get<std::string>();
        if (t == "categorical")
          cfg.types[name] = ColumnType::Categorical;
        else if (t == "numeric")
          cfg.types[name] = ColumnType::Numeric;
        else
          throw bad("unknown column type '" + t + "' for " + name);
      }
    }
    if (j.contains("levels"))
      for (const auto& [name, lv] : j.at("levels").items()) cfg.levels[name] = lv.get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  if (cfg.bins < 2) throw bad("bins must be at least 2");
  return cfg;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  int line = 1;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) throw ParseError(line, "quote inside an unquoted field");
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::vector<double> quantile_thresholds(std::vector<double> values, int bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> t;
  const std::size_t n = values.size();
  for (int k = 1; k < bins && n > 0; ++k) {
    const double v = values[static_cast<std::size_t>(k) * n / static_cast<std::size_t>(bins)];
    // A threshold at the minimum would leave its lower bin empty.
    if (v > values.front() && (t.empty() || v > t.back())) t.push_back(v);
  }
  return t;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::string> bin_labels(const std::vector<double>& t) {
  std::vector<std::string> labels;
  if (t.empty()) return {"all"};
  labels.push_back("<" + fmt(t.front()));
  for (std::size_t i = 0; i + 1 < t.size(); ++i) labels.push_back("[" + fmt(t[i]) + "," + fmt(t[i + 1]) + ")");
  labels.push_back(">=" + fmt(t.back()));
  return labels;
}

double parse_number(const std::string& s, int line, const std::string& column) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v))
    throw ParseError(line, "non-numeric value '" + s + "' in numeric column " + column);
  return v;
}

struct Column {
  std::string name;
  std::size_t source;  // CSV column index
  ColumnType type;
  std::vector<std::string> labels;
  std::vector<int> values;  // per row
};

}  // namespace

Dataset load_dataset(std::string_view csv, const DatasetConfig& cfg) {
  const auto records = parse_csv(csv);
  if (records.empty()) throw ParseError(1, "missing header row");
  const auto& header = records.front();
  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::Input, "unknown column '" + name + "' in schema config");
    return static_cast<std::size_t>(it - header.begin());
  };
  {
    std::set<std::string> names(header.begin(), header.end());
    if (names.size() != header.size()) throw ParseError(1, "duplicate column name in header");
  }
  column_of(cfg.decision);
  for (const auto& s : cfg.sensitive) column_of(s);
  for (const auto& [name, t] : cfg.types) column_of(name);
  for (const auto& [name, l] : cfg.levels) column_of(name);
  std::optional<std::size_t> weight_col;
  if (cfg.weight) weight_col = column_of(*cfg.weight);
  if (cfg.types.contains(cfg.decision) && cfg.types.at(cfg.decision) == ColumnType::Numeric)
    throw Error(ErrorKind::Input, "decision column must be categorical");

  Dataset ds;
  const std::size_t nrows = records.size() - 1;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const int line = static_cast<int>(r) + 1;
    if (records[r].size() != header.size())
      throw ParseError(line, "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(records[r].size()));
    for (std::size_t k = 0; k < header.size(); ++k)
      if (records[r][k].empty()) throw ParseError(line, "missing value in column " + header[k]);
  }
  ds.weights.assign(nrows, 1.0);
  if (weight_col) {
    for (std::size_t r = 0; r < nrows; ++r) {
      const double w = parse_number(records[r + 1][*weight_col], static_cast<int>(r) + 2, *cfg.weight);
      if (w < 0.0) throw ParseError(static_cast<int>(r) + 2, "negative row weight");
      ds.weights[r] = w;
    }
  }

  std::vector<Column> columns;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (weight_col && k == *weight_col) continue;
    Column col{header[k], k, ColumnType::Categorical, {}, std::vector<int>(nrows)};
    if (auto it = cfg.types.find(col.name); it != cfg.types.end()) col.type = it->second;
    if (col.type == ColumnType::Numeric) {
      std::vector<double> xs(nrows);
      for (std::size_t r = 0; r < nrows; ++r) xs[r] = parse_number(records[r + 1][k], static_cast<int>(r) + 2, col.name);
      const auto t = quantile_thresholds(xs, cfg.bins);
      col.labels = bin_labels(t);
      for (std::size_t r = 0; r < nrows; ++r)
        col.values[r] = static_cast<int>(std::upper_bound(t.begin(), t.end(), xs[r]) - t.begin());
    } else {
      const auto fixed = cfg.levels.find(col.name);
      if (fixed != cfg.levels.end()) col.labels = fixed->second;
      for (std::size_t r = 0; r < nrows; ++r) {
        const std::string& tok = records[r + 1][k];
        auto it = std::find(col.labels.begin(), col.labels.end(), tok);
        if (it == col.labels.end()) {
          if (cfg.strict && fixed != cfg.levels.end())
            throw ParseError(static_cast<int>(r) + 2, "unseen level '" + tok + "' in column " + col.name);
          col.labels.push_back(tok);
          it = col.labels.end() - 1;
        }
        col.values[r] = static_cast<int>(it - col.labels.begin());
      }
    }
    columns.push_back(std::move(col));
  }

  // Single-valued columns carry no information.
  std::vector<Column> kept;
  for (auto& col : columns) {
    if (col.labels.size() < 2) {
      if (col.name == cfg.decision) throw Error(ErrorKind::Input, "decision column has a single value");
      ds.warnings.push_back("dropping column " + col.name + ": single value");
      continue;
    }
    kept.push_back(std::move(col));
  }

  Schema& s = ds.schema;
  for (std::size_t v = 0; v < kept.size(); ++v) {
    s.variables.push_back(Variable{kept[v].name, kept[v].labels});
    if (kept[v].name == cfg.decision) s.decision = static_cast<VarIndex>(v);
  }
  if (s.arity(s.decision) != 2) throw Error(ErrorKind::Input, "decision column must have exactly two values");
  const auto pos = s.find_label(s.decision, cfg.positive);
  if (!pos) throw Error(ErrorKind::Input, "positive label '" + cfg.positive + "' not found in decision column");
  s.positive = *pos;
  for (const auto& name : cfg.sensitive) {
    if (name == cfg.decision) throw Error(ErrorKind::Input, "decision column cannot be sensitive");
    if (auto v = s.find(name)) s.sensitive.push_back(*v);
    else ds.warnings.push_back("sensitive column " + name + " was dropped");
  }
  if (s.size() > kMaxVariables) throw Error(ErrorKind::Input, "more than 64 columns are not supported");
  s.validate();

  ds.rows.assign(nrows, std::vector<int>(kept.size()));
  for (std::size_t r = 0; r < nrows; ++r)
    for (std::size_t v = 0; v < kept.size(); ++v) ds.rows[r][v] = kept[v].values[r];

  double class_mass[2] = {0.0, 0.0};
  for (std::size_t r = 0; r < nrows; ++r) class_mass[ds.rows[r][s.decision]] += ds.weights[r];
  if (!(class_mass[0] > 0.0) || !(class_mass[1] > 0.0))
    throw Error(ErrorKind::Input, "every decision value needs at least one row");
  return ds;
}

}  // namespace pcfair
