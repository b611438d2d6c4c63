#include "pcfair/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include <openssl/evp.h>

#include "pcfair/error.hpp"

namespace pcfair {

std::string format_fixed17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_field(std::string_view f, int line, const char* what) {
  if (f == "inf") return INFINITY;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size())
    throw ParseError(line, std::string("bad ") + what + " value '" + std::string(f) + "'");
  return v;
}

void check_writable(const Schema& s, const Assignment& a) {
  for (const Literal& l : a) {
    const std::string& name = s.name(l.var);
    const std::string& label = s.variables[l.var].labels[l.value];
    if (name.find_first_of("=&;\n") != std::string::npos || label.find_first_of("&;\n") != std::string::npos)
      throw Error(ErrorKind::Input, "variable " + name + " cannot be written to a pattern file");
  }
}

}  // namespace

Assignment parse_assignment(const Schema& s, std::string_view text) {
  std::vector<Literal> lits;
  if (text.empty()) return {};
  for (std::string_view part : split(text, '&')) {
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Input, "expected Var=Value, got '" + std::string(part) + "'");
    const auto v = s.find(part.substr(0, eq));
    if (!v) throw Error(ErrorKind::Input, "unknown variable '" + std::string(part.substr(0, eq)) + "'");
    const auto val = s.find_label(*v, part.substr(eq + 1));
    if (!val) throw Error(ErrorKind::Input, "unknown value '" + std::string(part.substr(eq + 1)) + "' for " + s.name(*v));
    lits.push_back({*v, *val});
  }
  Assignment a(std::move(lits));
  if (a.size() != static_cast<int>(split(text, '&').size())) throw Error(ErrorKind::Input, "variable repeated in assignment");
  return a;
}

std::string write_patterns_csv(const Schema& s, const std::vector<ScoredPattern>& patterns) {
  std::string out = std::string(kPatternCsvHeader) + "\n";
  for (const auto& sp : patterns) {
    check_writable(s, sp.pattern.x);
    check_writable(s, sp.pattern.y);
    out += sp.pattern.x.to_string(s) + ";" + sp.pattern.y.to_string(s) + ";" + format_fixed17(sp.delta) + ";" +
           format_fixed17(sp.probability) + ";" + (sp.divergence ? format_fixed17(*sp.divergence) : "") + "\n";
  }
  return out;
}

std::vector<ScoredPattern> read_patterns_csv(const Schema& s, std::string_view text) {
  std::vector<ScoredPattern> out;
  int line = 0;
  bool header = true;
  for (std::string_view row : split(text, '\n')) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    if (row.empty()) continue;
    if (header) {
      header = false;
      if (row != kPatternCsvHeader) throw ParseError(line, "expected header '" + std::string(kPatternCsvHeader) + "'");
      continue;
    }
    const auto f = split(row, ';');
    if (f.size() != 5) throw ParseError(line, "expected 5 fields");
    ScoredPattern sp;
    try {
      sp.pattern = Pattern{parse_assignment(s, f[0]), parse_assignment(s, f[1])};
      validate_pattern(s, sp.pattern);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
    sp.delta = parse_field(f[2], line, "delta");
    sp.probability = parse_field(f[3], line, "probability");
    if (!f[4].empty()) sp.divergence = parse_field(f[4], line, "divergence");
    out.push_back(std::move(sp));
  }
  return out;
}

nlohmann::json pattern_to_json(const Schema& s, const ScoredPattern& sp) {
  auto literals = [&](const Assignment& a) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Literal& l : a) arr.push_back({{"var", s.name(l.var)}, {"value", s.variables[l.var].labels[l.value]}});
    return arr;
  };
  nlohmann::json j{{"x", literals(sp.pattern.x)},
                   {"y", literals(sp.pattern.y)},
                   {"delta", sp.delta},
                   {"probability", sp.probability}};
  j["divergence"] = sp.divergence ? nlohmann::json(*sp.divergence) : nlohmann::json(nullptr);
  if (sp.relative) j["relative"] = *sp.relative;
  return j;
}

nlohmann::json patterns_to_json(const Schema& s, const std::vector<ScoredPattern>& patterns) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& sp : patterns) arr.push_back(pattern_to_json(s, sp));
  return arr;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Input, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

nlohmann::json make_envelope(const std::vector<std::string>& command, const std::string& fingerprint,
                             nlohmann::json mode, nlohmann::json results, nlohmann::json stats) {
  return nlohmann::json{{"tool", "pcfa"},
                        {"version", kToolVersion},
                        {"command", command},
                        {"circuit_sha256", fingerprint},
                        {"mode", std::move(mode)},
                        {"results", std::move(results)},
                        {"stats", std::move(stats)}};
}

}  // namespace pcfair
