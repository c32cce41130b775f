#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "reprokit/effects.hpp"
#include "reprokit/errors.hpp"
#include "reprokit/eval.hpp"
#include "reprokit/fidelity.hpp"
#include "reprokit/numerics.hpp"
#include "reprokit/ordering.hpp"
#include "reprokit/run_model.hpp"
#include "reprokit/stats.hpp"

// Report assembly and serialization. The three build functions run the full
// measure pipeline once; the renderers are pure views of the resulting
// struct, so text, JSON and CSV of one invocation always agree numerically.

namespace reprokit {

enum class ReportMode { evaluate, reproduce, replicate };

inline const char* report_mode_name(ReportMode mode) {
  switch (mode) {
    case ReportMode::evaluate: return "evaluate";
    case ReportMode::reproduce: return "reproduce";
    case ReportMode::replicate: return "replicate";
  }
  return "?";
}

struct MeasureColumn {
  std::string measure;
  double arp = 0.0;
  TopicScoreMap per_topic;
};

// One evaluated run. label is the run's role in the comparison ("orig",
// "rep", "orig_base", ...); in single-run evaluate mode it is the run tag.
struct RunReport {
  std::string label;
  std::string tag;
  std::vector<std::string> skipped;  // unjudged or zero-relevant topics
  std::size_t depth_dropped = 0;
  std::vector<MeasureColumn> columns;  // aligned with ReproReport::measures
};

// Reproduction comparison of one measure (same collection, paired).
struct MeasureComparison {
  std::string measure;
  double arp_delta = 0.0;
  double rmse = 0.0;
  TestResult paired_t;
};

// Replication comparison of one measure (different collections, unpaired).
struct ReplicateComparison {
  std::string measure;
  std::optional<double> er;
  std::optional<double> delta_ri;
  TestResult baseline_t;  // rep_base vs orig_base
  TestResult advanced_t;  // rep_adv vs orig_adv
};

struct ReproReport {
  ReportMode mode = ReportMode::evaluate;
  std::vector<MeasureSpec> measures;
  std::vector<int> cutoffs;  // effective grid after depth clipping
  double rbo_p = 0.0;
  std::vector<RunReport> runs;
  std::vector<MeasureComparison> comparisons;   // reproduce only
  std::vector<ReplicateComparison> effects;     // replicate only
  std::vector<CutoffCurve> curves;              // reproduce only
  std::optional<RboResult> rbo;                 // reproduce only
  std::string run_pair;                         // replicate only: rep_adv vs orig_adv tags
};

struct ReportOptions {
  std::vector<MeasureSpec> measures = default_measures();
  // empty means automatic: the default grid clipped to the available depth.
  // An explicit grid is honored verbatim (deduplicated, ascending).
  std::vector<int> cutoffs;
  double rbo_p = 0.8;
  bool welch = false;
};

namespace detail {

inline RunReport evaluate_one(const Run& run, const Qrels& qrels, const std::string& label,
                              const std::vector<MeasureSpec>& measures) {
  RunReport report;
  report.label = label;
  report.tag = run.tag;
  report.depth_dropped = run.stats.dropped_beyond_depth;
  for (const MeasureSpec& spec : measures) {
    Evaluation eval = evaluate_run(run, qrels, spec);
    // the skip set depends only on run topics and qrels, not on the measure
    if (report.skipped.empty()) report.skipped = eval.skipped;
    MeasureColumn column;
    column.measure = spec.name();
    column.arp = arp(eval.scores);
    column.per_topic = std::move(eval.scores);
    report.columns.push_back(std::move(column));
  }
  return report;
}

inline std::string preview_ids(const std::vector<std::string>& ids) {
  std::string out;
  const std::size_t limit = std::min<std::size_t>(ids.size(), 5);
  for (std::size_t i = 0; i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += ", ...";
  return out;
}

inline void require_same_run_topics(const Run& a, const Run& b, const std::string& a_name,
                                    const std::string& b_name) {
  const PairingReport pairing = pair_topics(a, b);
  if (pairing.only_a.empty() && pairing.only_b.empty()) return;
  std::string message = "topic sets differ: " + std::to_string(pairing.only_a.size()) +
                        " only in " + a_name;
  if (!pairing.only_a.empty()) message += " (" + preview_ids(pairing.only_a) + ")";
  message += ", " + std::to_string(pairing.only_b.size()) + " only in " + b_name;
  if (!pairing.only_b.empty()) message += " (" + preview_ids(pairing.only_b) + ")";
  message += "; " + std::to_string(pairing.shared.size()) + " shared";
  throw SemanticError(message);
}

// Distinct cutoff-bearing measure kinds in request order.
inline std::vector<MeasureKind> curve_kinds(const std::vector<MeasureSpec>& measures) {
  std::vector<MeasureKind> kinds;
  for (const MeasureSpec& spec : measures) {
    if (!spec.needs_cutoff()) continue;
    if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end())
      kinds.push_back(spec.kind);
  }
  return kinds;
}

// An explicit cutoff grid passes through untouched apart from ordering; the
// default grid is clipped to what the runs actually retrieved.
inline std::vector<int> resolve_cutoffs(const std::vector<int>& requested, std::size_t max_depth) {
  if (requested.empty()) {
    const std::vector<int> grid = default_cutoffs();
    return clip_cutoffs(grid, max_depth);
  }
  std::vector<int> grid = requested;
  for (int k : grid)
    if (k < 1) throw std::invalid_argument("cutoffs must be >= 1");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace detail

inline ReproReport build_evaluate(const Run& run, const Qrels& qrels,
                                  const ReportOptions& options = {}) {
  ReproReport report;
  report.mode = ReportMode::evaluate;
  report.measures = options.measures;
  report.runs.push_back(detail::evaluate_one(run, qrels, run.tag, options.measures));
  return report;
}

inline ReproReport build_reproduce(const Run& orig, const Run& rep, const Qrels& qrels,
                                   const ReportOptions& options = {}) {
  detail::require_same_run_topics(orig, rep, "original", "reproduction");

  ReproReport report;
  report.mode = ReportMode::reproduce;
  report.measures = options.measures;
  report.rbo_p = options.rbo_p;
  report.cutoffs =
      detail::resolve_cutoffs(options.cutoffs, std::max(orig.max_depth(), rep.max_depth()));
  report.runs.push_back(detail::evaluate_one(orig, qrels, "orig", options.measures));
  report.runs.push_back(detail::evaluate_one(rep, qrels, "rep", options.measures));

  const RunReport& orig_report = report.runs[0];
  const RunReport& rep_report = report.runs[1];
  for (std::size_t i = 0; i < options.measures.size(); ++i) {
    MeasureComparison cmp;
    cmp.measure = orig_report.columns[i].measure;
    cmp.arp_delta = arp_delta(orig_report.columns[i].per_topic, rep_report.columns[i].per_topic);
    cmp.rmse = rmse(orig_report.columns[i].per_topic, rep_report.columns[i].per_topic);
    cmp.paired_t = paired_t_test(orig_report.columns[i].per_topic, rep_report.columns[i].per_topic);
    report.comparisons.push_back(std::move(cmp));
  }

  report.curves.push_back(ktu(orig, rep, report.cutoffs));
  for (MeasureKind kind : detail::curve_kinds(options.measures))
    report.curves.push_back(rmse_curve(orig, rep, qrels, kind, report.cutoffs));
  report.rbo = rbo_run(orig, rep, options.rbo_p);
  return report;
}

inline ReproReport build_replicate(const Run& orig_base, const Run& orig_adv, const Run& rep_base,
                                   const Run& rep_adv, const Qrels& qrels_orig,
                                   const Qrels& qrels_rep, const ReportOptions& options = {}) {
  detail::require_same_run_topics(orig_base, orig_adv, "original baseline", "original advanced");
  detail::require_same_run_topics(rep_base, rep_adv, "replicated baseline", "replicated advanced");

  ReproReport report;
  report.mode = ReportMode::replicate;
  report.measures = options.measures;
  report.runs.push_back(detail::evaluate_one(orig_base, qrels_orig, "orig_base", options.measures));
  report.runs.push_back(detail::evaluate_one(orig_adv, qrels_orig, "orig_adv", options.measures));
  report.runs.push_back(detail::evaluate_one(rep_base, qrels_rep, "rep_base", options.measures));
  report.runs.push_back(detail::evaluate_one(rep_adv, qrels_rep, "rep_adv", options.measures));
  report.run_pair = rep_adv.tag + "_vs_" + orig_adv.tag;

  for (std::size_t i = 0; i < options.measures.size(); ++i) {
    ExperimentQuadruple quad;
    quad.orig_baseline = report.runs[0].columns[i].per_topic;
    quad.orig_advanced = report.runs[1].columns[i].per_topic;
    quad.rep_baseline = report.runs[2].columns[i].per_topic;
    quad.rep_advanced = report.runs[3].columns[i].per_topic;

    ReplicateComparison cmp;
    cmp.measure = report.runs[0].columns[i].measure;
    cmp.er = effect_ratio(quad);
    cmp.delta_ri = delta_relative_improvement(quad);
    // statistic sign follows rep - orig
    cmp.baseline_t = unpaired_t_test(quad.rep_baseline, quad.orig_baseline, options.welch);
    cmp.advanced_t = unpaired_t_test(quad.rep_advanced, quad.orig_advanced, options.welch);
    report.effects.push_back(std::move(cmp));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Text rendering. Tab-separated rows keyed by a leading row kind; every
// number at 6 decimals, undefined values as "undef", mean rows keyed "all".

namespace detail {

inline void render_test_row(std::ostream& out, const char* row, const std::string& measure,
                            const std::string& role, const TestResult& t) {
  out << row << '\t' << measure << '\t';
  if (!role.empty()) out << role << '\t';
  out << fixed6(t.statistic) << '\t' << fixed6(t.df) << '\t' << fixed6(t.p_value) << '\n';
}

inline void render_curve_rows(std::ostream& out, const CutoffCurve& curve,
                              const std::vector<int>& cutoffs) {
  for (const auto& [topic, by_cutoff] : curve.per_topic) {
    for (int k : cutoffs) {
      const auto it = by_cutoff.find(k);
      const std::optional<double> v = it == by_cutoff.end() ? std::optional<double>{} : it->second;
      out << "curve\t" << curve.measure << '\t' << topic << '\t' << k << '\t' << fixed6(v) << '\n';
    }
  }
  for (int k : cutoffs) {
    const auto it = curve.mean_per_cutoff.find(k);
    const std::optional<double> v =
        it == curve.mean_per_cutoff.end() ? std::optional<double>{} : it->second;
    out << "curve\t" << curve.measure << "\tmean\t" << k << '\t' << fixed6(v) << '\n';
  }
}

inline void render_diagnostics(std::ostream& out, const ReproReport& report) {
  for (const RunReport& run : report.runs)
    for (const std::string& topic : run.skipped)
      out << "# skipped\t" << run.label << '\t' << topic << '\n';
  for (const RunReport& run : report.runs)
    if (run.depth_dropped > 0)
      out << "# depth_dropped\t" << run.label << '\t' << run.depth_dropped << '\n';
}

}  // namespace detail

inline void render_text(std::ostream& out, const ReproReport& report) {
  if (report.mode == ReportMode::evaluate) {
    // trec_eval-style three-column view: measure, topic, value; mean as "all"
    const RunReport& run = report.runs.front();
    for (const MeasureColumn& column : run.columns) {
      for (const auto& [topic, value] : column.per_topic.scores)
        out << column.measure << '\t' << topic << '\t' << fixed6(value) << '\n';
      out << column.measure << "\tall\t" << fixed6(column.arp) << '\n';
    }
    for (const std::string& topic : run.skipped) out << "# skipped\t" << topic << '\n';
    if (run.depth_dropped > 0) out << "# depth_dropped\t" << run.depth_dropped << '\n';
    return;
  }

  out << "mode\t" << report_mode_name(report.mode) << '\n';
  for (const RunReport& run : report.runs) out << "tag\t" << run.label << '\t' << run.tag << '\n';
  for (const RunReport& run : report.runs)
    for (const MeasureColumn& column : run.columns)
      out << "arp\t" << run.label << '\t' << column.measure << '\t' << fixed6(column.arp) << '\n';
  for (const RunReport& run : report.runs)
    for (const MeasureColumn& column : run.columns)
      for (const auto& [topic, value] : column.per_topic.scores)
        out << "score\t" << run.label << '\t' << column.measure << '\t' << topic << '\t'
            << fixed6(value) << '\n';

  if (report.mode == ReportMode::reproduce) {
    for (const MeasureComparison& cmp : report.comparisons)
      out << "arp_delta\t" << cmp.measure << '\t' << fixed6(cmp.arp_delta) << '\n';
    for (const MeasureComparison& cmp : report.comparisons)
      out << "rmse\t" << cmp.measure << '\t' << fixed6(cmp.rmse) << '\n';
    for (const MeasureComparison& cmp : report.comparisons)
      detail::render_test_row(out, "paired_t", cmp.measure, "", cmp.paired_t);
    if (report.rbo) {
      for (const auto& [topic, value] : report.rbo->per_topic.scores)
        out << "rbo\t" << topic << '\t' << fixed6(value) << '\n';
      out << "rbo\tall\t" << fixed6(report.rbo->mean) << '\n';
    }
    for (const CutoffCurve& curve : report.curves)
      detail::render_curve_rows(out, curve, report.cutoffs);
  } else {
    for (const ReplicateComparison& cmp : report.effects)
      out << "er\t" << cmp.measure << '\t' << fixed6(cmp.er) << '\n';
    for (const ReplicateComparison& cmp : report.effects)
      out << "delta_ri\t" << cmp.measure << '\t' << fixed6(cmp.delta_ri) << '\n';
    for (const ReplicateComparison& cmp : report.effects) {
      detail::render_test_row(out, "unpaired_t", cmp.measure, "baseline", cmp.baseline_t);
      detail::render_test_row(out, "unpaired_t", cmp.measure, "advanced", cmp.advanced_t);
    }
  }
  detail::render_diagnostics(out, report);
}

// ---------------------------------------------------------------------------
// JSON rendering: same content at full double precision, undefined as null.

namespace detail {

inline nlohmann::ordered_json json_opt(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

inline nlohmann::ordered_json json_test(const TestResult& t) {
  nlohmann::ordered_json j;
  j["kind"] = test_kind_name(t.kind);
  j["t"] = json_opt(t.statistic);
  j["df"] = t.df;
  j["p"] = json_opt(t.p_value);
  return j;
}

inline nlohmann::ordered_json json_curve(const CutoffCurve& curve) {
  nlohmann::ordered_json j;
  j["measure"] = curve.measure;
  nlohmann::ordered_json per_topic = nlohmann::ordered_json::object();
  for (const auto& [topic, by_cutoff] : curve.per_topic) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const auto& [k, v] : by_cutoff) row[std::to_string(k)] = json_opt(v);
    per_topic[topic] = std::move(row);
  }
  j["per_topic"] = std::move(per_topic);
  nlohmann::ordered_json means = nlohmann::ordered_json::object();
  for (const auto& [k, v] : curve.mean_per_cutoff) means[std::to_string(k)] = json_opt(v);
  j["mean"] = std::move(means);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ReproReport& report) {
  nlohmann::ordered_json j;
  j["mode"] = report_mode_name(report.mode);
  nlohmann::ordered_json measures = nlohmann::ordered_json::array();
  for (const MeasureSpec& spec : report.measures) measures.push_back(spec.name());
  j["measures"] = std::move(measures);

  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const RunReport& run : report.runs) {
    nlohmann::ordered_json r;
    r["label"] = run.label;
    r["tag"] = run.tag;
    nlohmann::ordered_json arp_by_measure = nlohmann::ordered_json::object();
    nlohmann::ordered_json per_topic = nlohmann::ordered_json::object();
    for (const MeasureColumn& column : run.columns) {
      arp_by_measure[column.measure] = column.arp;
      nlohmann::ordered_json scores = nlohmann::ordered_json::object();
      for (const auto& [topic, value] : column.per_topic.scores) scores[topic] = value;
      per_topic[column.measure] = std::move(scores);
    }
    r["arp"] = std::move(arp_by_measure);
    r["per_topic"] = std::move(per_topic);
    r["skipped"] = run.skipped;
    r["depth_dropped"] = run.depth_dropped;
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);

  if (report.mode == ReportMode::reproduce) {
    j["cutoffs"] = report.cutoffs;
    nlohmann::ordered_json comparisons = nlohmann::ordered_json::array();
    for (const MeasureComparison& cmp : report.comparisons) {
      nlohmann::ordered_json c;
      c["measure"] = cmp.measure;
      c["arp_delta"] = cmp.arp_delta;
      c["rmse"] = cmp.rmse;
      c["paired_t"] = detail::json_test(cmp.paired_t);
      comparisons.push_back(std::move(c));
    }
    j["comparisons"] = std::move(comparisons);
    if (report.rbo) {
      nlohmann::ordered_json rbo_json;
      rbo_json["p"] = report.rbo->p;
      nlohmann::ordered_json per_topic = nlohmann::ordered_json::object();
      for (const auto& [topic, value] : report.rbo->per_topic.scores) per_topic[topic] = value;
      rbo_json["per_topic"] = std::move(per_topic);
      rbo_json["mean"] = report.rbo->mean;
      j["rbo"] = std::move(rbo_json);
    }
    nlohmann::ordered_json curves = nlohmann::ordered_json::array();
    for (const CutoffCurve& curve : report.curves) curves.push_back(detail::json_curve(curve));
    j["curves"] = std::move(curves);
  } else if (report.mode == ReportMode::replicate) {
    j["run_pair"] = report.run_pair;
    nlohmann::ordered_json effects = nlohmann::ordered_json::array();
    for (const ReplicateComparison& cmp : report.effects) {
      nlohmann::ordered_json e;
      e["measure"] = cmp.measure;
      e["er"] = detail::json_opt(cmp.er);
      e["delta_ri"] = detail::json_opt(cmp.delta_ri);
      e["baseline_t"] = detail::json_test(cmp.baseline_t);
      e["advanced_t"] = detail::json_test(cmp.advanced_t);
      effects.push_back(std::move(e));
    }
    j["effects"] = std::move(effects);
  }
  return j;
}

inline void render_json(std::ostream& out, const ReproReport& report) {
  out << to_json(report).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Plot-ready CSV. One kind per invocation; a kind the mode cannot feed is an
// UnsupportedError.

enum class PlotKind { arp_bars, cutoff_curves, er_dri_scatter };

inline PlotKind parse_plot_kind(const std::string& name) {
  if (name == "arp-bars") return PlotKind::arp_bars;
  if (name == "cutoff-curves") return PlotKind::cutoff_curves;
  if (name == "er-dri-scatter") return PlotKind::er_dri_scatter;
  throw std::invalid_argument("unknown plot kind '" + name +
                              "' (expected arp-bars, cutoff-curves or er-dri-scatter)");
}

inline void render_plot_csv(std::ostream& out, const ReproReport& report, PlotKind kind) {
  switch (kind) {
    case PlotKind::arp_bars:
      out << "run,measure,value\n";
      for (const RunReport& run : report.runs)
        for (const MeasureColumn& column : run.columns)
          out << run.label << ',' << column.measure << ',' << fixed6(column.arp) << '\n';
      return;
    case PlotKind::cutoff_curves: {
      if (report.mode != ReportMode::reproduce)
        throw UnsupportedError("cutoff-curves requires reproduce-mode inputs");
      out << "measure,topic,cutoff,value\n";
      for (const CutoffCurve& curve : report.curves) {
        for (const auto& [topic, by_cutoff] : curve.per_topic) {
          for (int k : report.cutoffs) {
            const auto it = by_cutoff.find(k);
            const std::optional<double> v =
                it == by_cutoff.end() ? std::optional<double>{} : it->second;
            out << curve.measure << ',' << topic << ',' << k << ',' << fixed6(v) << '\n';
          }
        }
        for (int k : report.cutoffs) {
          const auto it = curve.mean_per_cutoff.find(k);
          const std::optional<double> v =
              it == curve.mean_per_cutoff.end() ? std::optional<double>{} : it->second;
          out << curve.measure << ",mean," << k << ',' << fixed6(v) << '\n';
        }
      }
      return;
    }
    case PlotKind::er_dri_scatter:
      if (report.mode != ReportMode::replicate)
        throw UnsupportedError("er-dri-scatter requires replicate-mode inputs");
      out << "run_pair,measure,er,delta_ri\n";
      for (const ReplicateComparison& cmp : report.effects)
        out << report.run_pair << ',' << cmp.measure << ',' << fixed6(cmp.er) << ','
            << fixed6(cmp.delta_ri) << '\n';
      return;
  }
}

}  // namespace reprokit
