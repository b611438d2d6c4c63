#include <doctest.h>

#include "pcfair/dataset.hpp"
#include "pcfair/error.hpp"

using namespace pcfair;

namespace {

DatasetConfig basic_config() {
  DatasetConfig cfg;
  cfg.decision = "D";
  cfg.positive = "1";
  cfg.sensitive = {"S1"};
  return cfg;
}

}  // namespace

TEST_CASE("four binary rows map directly") {
  const auto ds = load_dataset("D,S1,Y1\n1,0,1\n0,1,0\n1,1,1\n0,0,0\n", basic_config());
  CHECK(ds.schema.size() == 3);
  CHECK(ds.rows.size() == 4);
  CHECK(ds.schema.sensitive == std::vector<VarIndex>{1});
  CHECK(ds.schema.variables[ds.schema.decision].labels[ds.schema.positive] == "1");
  CHECK(ds.total_weight() == 4.0);
}

TEST_CASE("constant columns are dropped with a warning") {
  const auto ds = load_dataset("D,S1,Y1,C\n1,0,1,k\n0,1,0,k\n", basic_config());
  CHECK(ds.schema.size() == 3);
  CHECK_FALSE(ds.schema.find("C"));
  CHECK(ds.warnings.size() == 1);
}

TEST_CASE("numeric quantile bins") {
  CHECK(quantile_thresholds({1, 2, 3, 4}, 2) == std::vector<double>{3});
  auto cfg = basic_config();
  cfg.types["N"] = ColumnType::Numeric;
  cfg.bins = 2;
  const auto ds = load_dataset("D,S1,N\n1,0,1\n0,1,2\n1,1,3\n0,0,4\n", cfg);
  const VarIndex n = *ds.schema.find("N");
  CHECK(ds.rows[0][n] == 0);
  CHECK(ds.rows[1][n] == 0);
  CHECK(ds.rows[2][n] == 1);
  CHECK(ds.rows[3][n] == 1);
  CHECK(ds.schema.arity(n) == 2);
}

TEST_CASE("RFC 4180 quoting") {
  const auto rec = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",x,\n");
  REQUIRE(rec.size() == 2);
  CHECK(rec[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(rec[1] == std::vector<std::string>{"multi\nline", "x", ""});
  CHECK_THROWS_AS(parse_csv("a,\"b\n"), ParseError);
}

TEST_CASE("config parsing and errors") {
  const auto cfg = parse_dataset_config(R"({"decision":"D","positive":"1","sensitive":["S1"],"bins":3,
      "types":{"N":"numeric"},"levels":{"S1":["0","1"]},"strict":true,"weight":"w"})");
  CHECK(cfg.bins == 3);
  CHECK(cfg.types.at("N") == ColumnType::Numeric);
  CHECK(cfg.levels.at("S1").size() == 2);
  CHECK(cfg.weight == "w");
  CHECK_THROWS_AS(parse_dataset_config("{"), ParseError);
  CHECK_THROWS_AS(parse_dataset_config(R"({"decision":"D"})"), Error);
  CHECK_THROWS_AS(parse_dataset_config(R"({"decision":"D","positive":"1","types":{"x":"date"}})"), Error);
}

TEST_CASE("dataset errors") {
  CHECK_THROWS_AS(load_dataset("", basic_config()), ParseError);
  CHECK_THROWS_AS(load_dataset("D,S1,Y1\n1,0\n", basic_config()), ParseError);
  CHECK_THROWS_AS(load_dataset("D,S1,Y1\n2,0,1\n3,1,0\n", basic_config()), Error);
  auto cfg = basic_config();
  cfg.sensitive = {"Q"};
  CHECK_THROWS_AS(load_dataset("D,S1,Y1\n1,0,1\n0,1,0\n", cfg), Error);
}

TEST_CASE("strict levels reject unseen tokens") {
  auto cfg = basic_config();
  cfg.levels["S1"] = {"0", "1"};
  cfg.strict = true;
  CHECK_THROWS_AS(load_dataset("D,S1,Y1\n1,0,1\n0,2,0\n", cfg), ParseError);
  cfg.strict = false;
  const auto ds = load_dataset("D,S1,Y1\n1,1,1\n0,2,0\n", cfg);
  CHECK(ds.schema.variables[1].labels == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("weight column") {
  auto cfg = basic_config();
  cfg.weight = "w";
  const auto ds = load_dataset("D,S1,Y1,w\n1,0,1,3\n0,1,0,2.5\n", cfg);
  CHECK(ds.schema.size() == 3);
  CHECK(ds.total_weight() == 5.5);
}
