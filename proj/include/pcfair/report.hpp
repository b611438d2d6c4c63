#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcfair/pattern.hpp"

namespace pcfair {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kPatternCsvHeader = "x;y;delta;probability;divergence";

/// Fixed 17 significant digits.
std::string format_fixed17(double v);

/// "S1=v1&Y1=v0"; empty for the empty assignment.
Assignment parse_assignment(const Schema& s, std::string_view text);

/// Pattern file: header line then one `x;y;delta;probability;divergence` row
/// per pattern; divergence is empty when the repair is infeasible.
std::string write_patterns_csv(const Schema& s, const std::vector<ScoredPattern>& patterns);
/// Accepts an empty document. Throws ParseError.
std::vector<ScoredPattern> read_patterns_csv(const Schema& s, std::string_view text);

nlohmann::json pattern_to_json(const Schema& s, const ScoredPattern& sp);
nlohmann::json patterns_to_json(const Schema& s, const std::vector<ScoredPattern>& patterns);

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// Report envelope: tool, version, command echo, circuit fingerprint, mode
/// flags, results and stats. Keys serialize sorted.
nlohmann::json make_envelope(const std::vector<std::string>& command, const std::string& fingerprint,
                             nlohmann::json mode, nlohmann::json results, nlohmann::json stats);

}  // namespace pcfair
