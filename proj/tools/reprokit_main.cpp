#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reprokit/reprokit.hpp"

// reprokit CLI: evaluate | reproduce | replicate | plotdata.
// Exit codes: 0 success, 2 input error, 3 semantic mismatch, 4 unsupported
// request. Settings precedence: flags > config file > REPROKIT_DEPTH > defaults.

namespace {

using namespace reprokit;

struct OptionPack {
  std::vector<std::string> measures;
  std::vector<int> cutoffs;
  double rbo_p = 0.8;
  bool welch = false;
  int depth = 0;
  bool lenient = false;
  std::string format = "text";
  std::string config_path;

  CLI::Option* measures_opt = nullptr;
  CLI::Option* cutoffs_opt = nullptr;
  CLI::Option* rbo_p_opt = nullptr;
  CLI::Option* welch_opt = nullptr;
  CLI::Option* depth_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

void add_common_options(CLI::App* cmd, OptionPack& pack, bool with_format) {
  pack.measures_opt =
      cmd->add_option("--measure", pack.measures,
                      "Effectiveness measure: p@K, ap, ndcg@K (repeatable or comma separated)")
          ->delimiter(',');
  pack.cutoffs_opt =
      cmd->add_option("--cutoffs", pack.cutoffs, "Cutoff grid for curves, comma separated")
          ->delimiter(',');
  pack.rbo_p_opt = cmd->add_option("--rbo-p", pack.rbo_p, "RBO persistence parameter, in (0,1)");
  pack.welch_opt =
      cmd->add_flag("--welch", pack.welch, "Welch unpaired t-test instead of pooled variance");
  pack.depth_opt = cmd->add_option("--depth", pack.depth, "Entries kept per topic (default 1000)");
  cmd->add_flag("--lenient", pack.lenient, "Tolerate extra trailing fields in run lines");
  cmd->add_option("--config", pack.config_path,
                  "JSON config file; keys: measures, cutoffs, rbo_p, welch, depth");
  if (with_format)
    pack.format_opt = cmd->add_option("--format", pack.format, "Output format: text or json")
                          ->check(CLI::IsMember({"text", "json"}));
}

struct Settings {
  ReportOptions report;
  ParseOptions parse;
  std::string format = "text";
};

void apply_config(Settings& settings, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json config;
  try {
    in >> config;
    if (!config.is_object()) throw std::invalid_argument("config: top level must be an object");
    for (const auto& [key, value] : config.items()) {
      if (key == "measures") {
        settings.report.measures.clear();
        for (const auto& name : value)
          settings.report.measures.push_back(MeasureSpec::parse(name.get<std::string>()));
      } else if (key == "cutoffs") {
        settings.report.cutoffs = value.get<std::vector<int>>();
      } else if (key == "rbo_p") {
        settings.report.rbo_p = value.get<double>();
      } else if (key == "welch") {
        settings.report.welch = value.get<bool>();
      } else if (key == "depth") {
        settings.parse.depth = value.get<int>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
}

Settings resolve_settings(const OptionPack& pack) {
  Settings settings;
  if (const char* env = std::getenv("REPROKIT_DEPTH")) {
    char* end = nullptr;
    const long depth = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || depth < 1)
      throw std::invalid_argument("REPROKIT_DEPTH must be a positive integer, got '" +
                                  std::string(env) + "'");
    settings.parse.depth = static_cast<int>(depth);
  }
  if (!pack.config_path.empty()) apply_config(settings, pack.config_path);

  if (pack.measures_opt->count() > 0) {
    settings.report.measures.clear();
    for (const std::string& name : pack.measures)
      settings.report.measures.push_back(MeasureSpec::parse(name));
  }
  if (pack.cutoffs_opt->count() > 0) settings.report.cutoffs = pack.cutoffs;
  if (pack.rbo_p_opt->count() > 0) settings.report.rbo_p = pack.rbo_p;
  if (pack.welch_opt->count() > 0) settings.report.welch = pack.welch;
  if (pack.depth_opt->count() > 0) settings.parse.depth = pack.depth;
  if (pack.format_opt && pack.format_opt->count() > 0) settings.format = pack.format;
  settings.parse.lenient = pack.lenient;

  if (settings.report.measures.empty())
    throw std::invalid_argument("measure list must not be empty");
  if (!(settings.report.rbo_p > 0.0 && settings.report.rbo_p < 1.0))
    throw std::invalid_argument("rbo_p must lie in (0,1)");
  if (settings.parse.depth < 1) throw std::invalid_argument("depth must be >= 1");
  return settings;
}

Run load_run(const std::string& path, const ParseOptions& options, bool allow_stdin) {
  if (path == "-") {
    if (!allow_stdin)
      throw std::invalid_argument("stdin ('-') is only supported for single-run evaluate");
    try {
      return parse_run(std::cin, options);
    } catch (const ParseError& e) {
      throw ParseError("<stdin>: " + e.message(), e.line());
    }
  }
  return parse_run_file(path, options);
}

void emit(const ReproReport& report, const std::string& format) {
  if (format == "json")
    render_json(std::cout, report);
  else
    render_text(std::cout, report);
}

ReproReport build_for_mode(const std::string& mode, const std::vector<std::string>& files,
                           const Settings& settings) {
  if (mode == "evaluate") {
    if (files.size() != 2)
      throw std::invalid_argument("evaluate takes RUN QRELS (got " +
                                  std::to_string(files.size()) + " paths)");
    Run run = load_run(files[0], settings.parse, true);
    Qrels qrels = parse_qrels_file(files[1], settings.parse);
    return build_evaluate(run, qrels, settings.report);
  }
  if (mode == "reproduce") {
    if (files.size() != 3)
      throw std::invalid_argument("reproduce takes ORIG_RUN REP_RUN QRELS (got " +
                                  std::to_string(files.size()) + " paths)");
    Run orig = load_run(files[0], settings.parse, false);
    Run rep = load_run(files[1], settings.parse, false);
    Qrels qrels = parse_qrels_file(files[2], settings.parse);
    return build_reproduce(orig, rep, qrels, settings.report);
  }
  if (mode == "replicate") {
    if (files.size() != 6)
      throw std::invalid_argument(
          "replicate takes ORIG_BASE ORIG_ADV REP_BASE REP_ADV QRELS_ORIG QRELS_REP (got " +
          std::to_string(files.size()) + " paths)");
    Run orig_base = load_run(files[0], settings.parse, false);
    Run orig_adv = load_run(files[1], settings.parse, false);
    Run rep_base = load_run(files[2], settings.parse, false);
    Run rep_adv = load_run(files[3], settings.parse, false);
    Qrels qrels_orig = parse_qrels_file(files[4], settings.parse);
    Qrels qrels_rep = parse_qrels_file(files[5], settings.parse);
    return build_replicate(orig_base, orig_adv, rep_base, rep_adv, qrels_orig, qrels_rep,
                           settings.report);
  }
  throw std::invalid_argument("unknown plotdata mode '" + mode +
                              "' (expected evaluate, reproduce or replicate)");
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);

  CLI::App app{"reprokit: quantify how exactly a reimplemented retrieval system reproduces "
               "or replicates the original runs"};
  app.require_subcommand(1);

  OptionPack eval_pack, repro_pack, repli_pack, plot_pack;

  CLI::App* cmd_evaluate = app.add_subcommand(
      "evaluate", "Score one run against qrels (trec_eval-style output)");
  std::string eval_run, eval_qrels;
  cmd_evaluate->add_option("run", eval_run, "Run file ('-' for stdin)")->required();
  cmd_evaluate->add_option("qrels", eval_qrels, "Qrels file")->required();
  add_common_options(cmd_evaluate, eval_pack, true);

  CLI::App* cmd_reproduce = app.add_subcommand(
      "reproduce", "Compare a reproduced run against the original on the same collection");
  std::string repro_orig, repro_rep, repro_qrels;
  cmd_reproduce->add_option("orig_run", repro_orig, "Original run file")->required();
  cmd_reproduce->add_option("rep_run", repro_rep, "Reproduced run file")->required();
  cmd_reproduce->add_option("qrels", repro_qrels, "Qrels file")->required();
  add_common_options(cmd_reproduce, repro_pack, true);

  CLI::App* cmd_replicate = app.add_subcommand(
      "replicate", "Compare replicated baseline/advanced runs against the originals on "
                   "a different collection");
  std::string repli_paths[6];
  cmd_replicate->add_option("orig_base", repli_paths[0], "Original baseline run")->required();
  cmd_replicate->add_option("orig_adv", repli_paths[1], "Original advanced run")->required();
  cmd_replicate->add_option("rep_base", repli_paths[2], "Replicated baseline run")->required();
  cmd_replicate->add_option("rep_adv", repli_paths[3], "Replicated advanced run")->required();
  cmd_replicate->add_option("qrels_orig", repli_paths[4], "Qrels of the original collection")
      ->required();
  cmd_replicate->add_option("qrels_rep", repli_paths[5], "Qrels of the replication collection")
      ->required();
  add_common_options(cmd_replicate, repli_pack, true);

  CLI::App* cmd_plotdata = app.add_subcommand(
      "plotdata", "Emit plot-ready CSV: arp-bars, cutoff-curves or er-dri-scatter");
  std::string plot_kind, plot_mode;
  std::vector<std::string> plot_files;
  cmd_plotdata->add_option("kind", plot_kind, "arp-bars | cutoff-curves | er-dri-scatter")
      ->required();
  cmd_plotdata->add_option("mode", plot_mode, "evaluate | reproduce | replicate")->required();
  cmd_plotdata->add_option("files", plot_files, "Input paths in the mode's positional order")
      ->required()
      ->expected(-1);
  add_common_options(cmd_plotdata, plot_pack, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_evaluate->parsed()) {
      const Settings settings = resolve_settings(eval_pack);
      Run run = load_run(eval_run, settings.parse, true);
      Qrels qrels = parse_qrels_file(eval_qrels, settings.parse);
      emit(build_evaluate(run, qrels, settings.report), settings.format);
    } else if (cmd_reproduce->parsed()) {
      const Settings settings = resolve_settings(repro_pack);
      Run orig = load_run(repro_orig, settings.parse, false);
      Run rep = load_run(repro_rep, settings.parse, false);
      Qrels qrels = parse_qrels_file(repro_qrels, settings.parse);
      emit(build_reproduce(orig, rep, qrels, settings.report), settings.format);
    } else if (cmd_replicate->parsed()) {
      const Settings settings = resolve_settings(repli_pack);
      Run orig_base = load_run(repli_paths[0], settings.parse, false);
      Run orig_adv = load_run(repli_paths[1], settings.parse, false);
      Run rep_base = load_run(repli_paths[2], settings.parse, false);
      Run rep_adv = load_run(repli_paths[3], settings.parse, false);
      Qrels qrels_orig = parse_qrels_file(repli_paths[4], settings.parse);
      Qrels qrels_rep = parse_qrels_file(repli_paths[5], settings.parse);
      emit(build_replicate(orig_base, orig_adv, rep_base, rep_adv, qrels_orig, qrels_rep,
                           settings.report),
           settings.format);
    } else if (cmd_plotdata->parsed()) {
      const PlotKind kind = parse_plot_kind(plot_kind);
      const Settings settings = resolve_settings(plot_pack);
      const ReproReport report = build_for_mode(plot_mode, plot_files, settings);
      render_plot_csv(std::cout, report, kind);
    }
    std::cout.flush();
    return 0;
  } catch (const UnsupportedError& e) {
    std::cerr << "reprokit: " << e.what() << '\n';
    return 4;
  } catch (const SemanticError& e) {
    std::cerr << "reprokit: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "reprokit: " << e.what() << '\n';
    return 2;
  }
}
