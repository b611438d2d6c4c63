// pcfa: audit probabilistic-circuit classifiers for discrimination patterns.
//
// Exit codes: 0 success, 1 usage, 2 input or validation error, 3 unfair
// verdict (certify only).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcfair/bounds.hpp"
#include "pcfair/dataset.hpp"
#include "pcfair/error.hpp"
#include "pcfair/learn.hpp"
#include "pcfair/metrics.hpp"
#include "pcfair/report.hpp"
#include "pcfair/sampling.hpp"
#include "pcfair/search.hpp"
#include "pcfair/summaries.hpp"

using namespace pcfair;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnfair = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Output {
  std::string path;
  std::string format;
  bool timing = false;

  void emit(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Input, "cannot write " + path);
    out << text;
  }
};

struct Model {
  std::string text;
  std::string fingerprint;
  Circuit circuit;
};

Model load_model(const std::string& path) {
  std::string text = read_file(path);
  std::string fp = sha256_hex(text);
  Circuit c = parse_circuit(text);
  return Model{std::move(text), std::move(fp), std::move(c)};
}

int default_threads() {
  if (const char* env = std::getenv("PCFA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

json stats_json(const SearchStats& st, bool timing) {
  json j{{"visited", st.visited},
         {"pruned", st.pruned},
         {"bound_evaluations", st.bound_evaluations},
         {"budget_exhausted", st.budget_exhausted}};
  if (timing) j["wall_seconds"] = st.wall.count();
  return j;
}

std::string render_patterns(const Schema& s, const std::vector<ScoredPattern>& ps, const std::string& format) {
  if (format == "csv") return write_patterns_csv(s, ps);
  std::string out;
  for (const auto& sp : ps) {
    out += sp.pattern.to_string(s) + "  delta=" + format_fixed17(sp.delta) +
           "  P=" + format_fixed17(sp.probability);
    if (sp.divergence) out += "  div=" + format_fixed17(*sp.divergence);
    out += "\n";
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit probabilistic-circuit classifiers for discrimination patterns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::vector<std::string> echo(argv + 1, argv + argc);
  Output out;
  std::string model_path;
  double delta = 0.05;
  int threads = default_threads();

  auto add_output = [&](CLI::App* sub, const std::string& def, std::vector<std::string> formats) {
    out.format = def;
    sub->add_option("--format", out.format, "Output format")->check(CLI::IsMember(formats));
    sub->add_option("-o,--out", out.path, "Write output to a file instead of stdout");
  };

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Learn a circuit from a CSV dataset");
  std::string data_path, schema_path, structure = "nb";
  double smoothing = 1.0;
  compile_cmd->add_option("--data", data_path, "CSV dataset")->required();
  compile_cmd->add_option("--schema", schema_path, "JSON schema config")->required();
  compile_cmd->add_option("--structure", structure, "nb or chow-liu")->check(CLI::IsMember({"nb", "chow-liu"}));
  compile_cmd->add_option("--smoothing", smoothing, "Add-alpha pseudo-count")->check(CLI::PositiveNumber);
  compile_cmd->add_option("-o,--out", out.path, "Circuit file to write (default stdout)");

  // check
  auto* check_cmd = app.add_subcommand("check", "Validate circuit structure");
  check_cmd->add_option("--model", model_path, "Circuit file")->required();
  std::string check_format = "text";
  check_cmd->add_option("--format", check_format)->check(CLI::IsMember({"text", "json"}));

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "Certify delta-fairness or return a witness pattern");
  certify_cmd->add_option("--model", model_path, "Circuit file")->required();
  certify_cmd->add_option("--delta", delta, "Threshold")->required()->check(CLI::Range(0.0, 1.0));
  std::string certify_format = "text";
  certify_cmd->add_option("--format", certify_format)->check(CLI::IsMember({"text", "json"}));
  certify_cmd->add_flag("--timing", out.timing, "Include wall time in JSON");

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Find all or the top-k discrimination patterns");
  int top = 0;
  std::string rank = "disc";
  std::optional<std::uint64_t> budget;
  mine_cmd->add_option("--model", model_path, "Circuit file")->required();
  mine_cmd->add_option("--delta", delta, "Threshold")->required()->check(CLI::Range(0.0, 1.0));
  mine_cmd->add_option("--top", top, "Keep the k best patterns")->check(CLI::PositiveNumber);
  mine_cmd->add_option("--rank", rank, "disc or div")->check(CLI::IsMember({"disc", "div"}));
  mine_cmd->add_option("--budget", budget, "Stop after scoring this many candidates");
  mine_cmd->add_option("--threads", threads, "Worker threads (default PCFA_THREADS or 1)")->check(CLI::PositiveNumber);
  mine_cmd->add_flag("--timing", out.timing, "Include wall time in JSON");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Sample discrimination patterns");
  long long timeout_ms = 1000;
  std::uint64_t seed = 0;
  std::string variant = "basic";
  std::optional<std::uint64_t> max_runs;
  sample_cmd->add_option("--model", model_path, "Circuit file")->required();
  sample_cmd->add_option("--delta", delta, "Threshold")->required()->check(CLI::Range(0.0, 1.0));
  sample_cmd->add_option("--timeout-ms", timeout_ms, "Time budget")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed, "RNG seed");
  sample_cmd->add_option("--variant", variant, "basic or memo")->check(CLI::IsMember({"basic", "memo"}));
  sample_cmd->add_option("--max-runs", max_runs, "Stop after this many runs");
  sample_cmd->add_option("--threads", threads, "Accepted for symmetry; sampling is sequential");
  sample_cmd->add_flag("--timing", out.timing, "Include wall time in JSON");

  // summarize
  auto* summarize_cmd = app.add_subcommand("summarize", "Maximal, minimal or Pareto summary of a pattern file");
  std::string in_path, kind;
  std::optional<double> summary_delta;
  bool partial = false, weak = false;
  summarize_cmd->add_option("--model", model_path, "Circuit file")->required();
  summarize_cmd->add_option("--in", in_path, "Pattern file (CSV)")->required();
  summarize_cmd->add_option("--kind", kind, "maximal, minimal or pareto")
      ->required()
      ->check(CLI::IsMember({"maximal", "minimal", "pareto"}));
  summarize_cmd->add_option("--delta", summary_delta, "Threshold the pattern file was mined at");
  summarize_cmd->add_flag("--partial", partial, "Input is a sampled, incomplete pattern set");
  summarize_cmd->add_flag("--weak", weak, "Pareto: keep points tied on both coordinates");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Group-fairness metrics and pattern counts");
  std::vector<double> deltas;
  double threshold = 0.5;
  metrics_cmd->add_option("--model", model_path, "Circuit file")->required();
  metrics_cmd->add_option("--deltas", deltas, "Thresholds for pattern counts")->delimiter(',');
  metrics_cmd->add_option("--threshold", threshold, "Decision threshold of the model classifier");
  std::string metrics_format = "text";
  metrics_cmd->add_option("--format", metrics_format)->check(CLI::IsMember({"text", "json"}));

  // pareto-plot
  auto* plot_cmd = app.add_subcommand("pareto-plot", "probability,delta,front rows for every pattern");
  plot_cmd->add_option("--model", model_path, "Circuit file")->required();
  plot_cmd->add_option("--delta", delta, "Threshold")->check(CLI::Range(0.0, 1.0));
  plot_cmd->add_option("--in", in_path, "Pattern file; mined from the model when absent");
  plot_cmd->add_option("-o,--out", out.path, "Write output to a file instead of stdout");

  add_output(mine_cmd, "csv", {"csv", "json", "text"});
  add_output(sample_cmd, "csv", {"csv", "json", "text"});
  add_output(summarize_cmd, "csv", {"csv", "json", "text"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (compile_cmd->parsed()) {
      const Dataset ds = load_dataset(read_file(data_path), parse_dataset_config(read_file(schema_path)));
      for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
      LearnConfig cfg;
      cfg.smoothing = smoothing;
      cfg.structure = structure == "chow-liu" ? Structure::ChowLiu : Structure::NaiveBayes;
      out.emit(write_circuit(learn(ds, cfg)));
      return 0;
    }

    const Model model = load_model(model_path);
    const Circuit& c = model.circuit;
    const Schema& s = c.schema();

    if (check_cmd->parsed()) {
      const StructureReport& r = c.structure();
      if (check_format == "json") {
        json j{{"smooth", r.smooth},
               {"decomposable", r.decomposable},
               {"deterministic", r.deterministic},
               {"decision_rooted", r.decision_rooted},
               {"compatible", r.compatible},
               {"auditable", r.auditable()},
               {"nodes", c.size()},
               {"problems", r.problems}};
        out.emit(dump(make_envelope(echo, model.fingerprint, json::object(), j, json::object())));
      } else {
        std::ostringstream ss;
        auto flag = [&](const char* name, bool v) { ss << name << ": " << (v ? "yes" : "no") << "\n"; };
        ss << "nodes: " << c.size() << "\n";
        flag("smooth", r.smooth);
        flag("decomposable", r.decomposable);
        flag("deterministic", r.deterministic);
        flag("decision-rooted", r.decision_rooted);
        flag("compatible", r.compatible);
        for (const auto& p : r.problems) ss << "problem: " << p << "\n";
        out.emit(ss.str());
      }
      return r.auditable() ? 0 : kExitInput;
    }

    if (certify_cmd->parsed()) {
      const Verdict v = certify_fair(c, delta);
      if (certify_format == "json") {
        json res{{"fair", v.fair}};
        res["witness"] = v.witness ? pattern_to_json(s, *v.witness) : json(nullptr);
        out.emit(dump(make_envelope(echo, model.fingerprint, {{"delta", delta}}, res, stats_json(v.stats, out.timing))));
      } else if (v.fair) {
        out.emit("FAIR\n");
      } else {
        out.emit("UNFAIR\nwitness: " + render_patterns(s, {*v.witness}, "text"));
      }
      return v.fair ? 0 : kExitUnfair;
    }

    if (mine_cmd->parsed()) {
      SearchConfig cfg;
      cfg.delta = delta;
      cfg.threads = threads;
      cfg.node_budget = budget;
      if (top > 0) {
        cfg.mode = SearchMode::TopK;
        cfg.k = top;
        cfg.rank = rank == "div" ? RankBy::Div : RankBy::Disc;
      }
      const SearchResult r = search_patterns(c, cfg);
      if (out.format == "json") {
        json mode{{"delta", delta}, {"mode", top > 0 ? "top-k" : "all"}};
        if (top > 0) {
          mode["k"] = top;
          mode["rank"] = rank;
        }
        json stats = stats_json(r.stats, out.timing);
        stats["lattice_size"] = lattice_size(s);
        out.emit(dump(make_envelope(echo, model.fingerprint, mode, patterns_to_json(s, r.patterns), stats)));
      } else {
        out.emit(render_patterns(s, r.patterns, out.format));
      }
      if (r.stats.budget_exhausted) std::cerr << "warning: node budget exhausted; result is partial\n";
      return 0;
    }

    if (sample_cmd->parsed()) {
      SamplerConfig cfg;
      cfg.delta = delta;
      cfg.seed = seed;
      cfg.variant = variant == "memo" ? SamplerVariant::Memo : SamplerVariant::Basic;
      cfg.time_budget = std::chrono::milliseconds(timeout_ms);
      cfg.max_runs = max_runs;
      const auto start = std::chrono::steady_clock::now();
      const SamplerResult r = sample_patterns(c, cfg);
      if (out.format == "json") {
        json mode{{"delta", delta}, {"seed", seed}, {"variant", variant}, {"timeout_ms", timeout_ms}};
        if (max_runs) mode["max_runs"] = *max_runs;
        json stats{{"runs", r.runs}, {"explored", r.explored}, {"estimator_entries", r.estimator_entries}};
        if (out.timing)
          stats["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.emit(dump(make_envelope(echo, model.fingerprint, mode, patterns_to_json(s, r.patterns), stats)));
      } else {
        out.emit(render_patterns(s, r.patterns, out.format));
      }
      return 0;
    }

    if (summarize_cmd->parsed()) {
      const std::string text = read_file(in_path);
      const auto sigma = read_patterns_csv(s, text);
      SummaryOptions opt;
      opt.partial = partial;
      // Without the mining threshold the bound shortcut cannot be used.
      opt.delta = summary_delta.value_or(-1.0);
      std::vector<ScoredPattern> result;
      bool relative = partial;
      if (kind == "pareto") {
        result = pareto_front(sigma, weak);
      } else if (kind == "maximal") {
        const Summary m = maximal_patterns(c, sigma, opt);
        result = m.patterns;
        relative = m.relative_to_input;
      } else {
        const Summary cand = candidate_minimal(c, sigma, opt);
        const Summary m = minimal_patterns(c, cand.patterns, sigma, opt);
        result = m.patterns;
        relative = m.relative_to_input;
      }
      if (relative && kind != "pareto")
        std::cerr << "note: input is partial; " << kind << " patterns are relative to it\n";
      if (out.format == "json") {
        json mode{{"kind", kind}, {"partial", partial}, {"relative_to_input", relative}};
        if (kind == "pareto") mode["weak"] = weak;
        out.emit(dump(make_envelope(echo, model.fingerprint, mode, patterns_to_json(s, result),
                                    {{"input_patterns", sigma.size()}})));
      } else if (!(sigma.empty() && text.find_first_not_of(" \r\n\t") == std::string::npos)) {
        out.emit(render_patterns(s, result, out.format));
      }
      return 0;
    }

    if (metrics_cmd->parsed()) {
      MetricsConfig cfg;
      cfg.deltas = deltas;
      cfg.threshold = threshold;
      const MetricsReport m = group_fairness_report(c, cfg);
      if (metrics_format == "json") {
        json counts = json::object();
        for (const auto& [d, n] : m.pattern_counts) counts[format_fixed17(d)] = n;
        json res{{"DI", m.di}, {"SP", m.sp}, {"SP1", m.sp1}, {"EO", m.eo}, {"pattern_counts", counts}};
        if (!deltas.empty()) res["highest_delta"] = m.highest_delta;
        out.emit(dump(make_envelope(echo, model.fingerprint, {{"threshold", threshold}}, res, json::object())));
      } else {
        std::ostringstream ss;
        ss << "DI " << format_fixed17(m.di) << "\nSP " << format_fixed17(m.sp) << "\nSP1 " << format_fixed17(m.sp1)
           << "\nEO " << format_fixed17(m.eo) << "\n";
        for (const auto& [d, n] : m.pattern_counts) ss << "patterns@" << d << " " << n << "\n";
        if (!deltas.empty()) ss << "highest_delta " << format_fixed17(m.highest_delta) << "\n";
        out.emit(ss.str());
      }
      return 0;
    }

    if (plot_cmd->parsed()) {
      const std::vector<ScoredPattern> sigma =
          in_path.empty() ? find_all_patterns(c, delta).patterns : read_patterns_csv(s, read_file(in_path));
      ParetoFront front;
      for (const auto& sp : sigma) front.insert(sp);
      std::set<Pattern> on_front;
      for (const auto& sp : front.strict()) on_front.insert(sp.pattern);
      std::string text = "probability,delta,front\n";
      for (const auto& sp : sigma)
        text += format_fixed17(sp.probability) + "," + format_fixed17(sp.delta) + "," +
                (on_front.contains(sp.pattern) ? "1" : "0") + "\n";
      out.emit(text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
