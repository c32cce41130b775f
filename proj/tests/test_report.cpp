#include "reprokit/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "golden_values.hpp"
#include "test_paths.hpp"

using namespace reprokit;
using namespace reprokit::golden;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct Fixtures {
  Qrels mini = parse_qrels_file(test_data_path("mini.qrels"));
  Qrels rep2 = parse_qrels_file(test_data_path("rep2.qrels"));
  reprokit::Run orig_b = parse_run_file(test_data_path("orig_b.run"));
  reprokit::Run orig_a = parse_run_file(test_data_path("orig_a.run"));
  reprokit::Run rep_b = parse_run_file(test_data_path("rep_b.run"));
  reprokit::Run rep2_b = parse_run_file(test_data_path("rep2_b.run"));
  reprokit::Run rep2_a = parse_run_file(test_data_path("rep2_a.run"));
};

const Fixtures& fixtures() {
  static Fixtures f;
  return f;
}

TEST(BuildEvaluate, SingleRunStructure) {
  const auto& f = fixtures();
  const ReproReport report = build_evaluate(f.orig_b, f.mini);
  EXPECT_EQ(report.mode, ReportMode::evaluate);
  ASSERT_EQ(report.runs.size(), 1u);
  EXPECT_EQ(report.runs[0].label, "origbase");  // evaluate labels by tag
  EXPECT_EQ(report.runs[0].tag, "origbase");
  ASSERT_EQ(report.runs[0].columns.size(), 3u);
  EXPECT_EQ(report.runs[0].columns[0].measure, "P@10");
  EXPECT_EQ(report.runs[0].columns[1].measure, "AP");
  EXPECT_EQ(report.runs[0].columns[2].measure, "nDCG@10");
  EXPECT_NEAR(report.runs[0].columns[0].arp, kOrigP10Mean, 1e-12);
  EXPECT_NEAR(report.runs[0].columns[1].arp, kOrigApMean, 1e-12);
  EXPECT_NEAR(report.runs[0].columns[2].arp, kOrigNdcg10Mean, 1e-12);
  EXPECT_TRUE(report.runs[0].skipped.empty());
}

TEST(BuildEvaluate, ApTextMatchesFrozenBytes) {
  const auto& f = fixtures();
  ReportOptions options;
  options.measures = {MeasureSpec::parse("ap")};
  const ReproReport report = build_evaluate(f.orig_b, f.mini, options);
  std::ostringstream out;
  render_text(out, report);
  EXPECT_EQ(out.str(), slurp(test_data_path("golden_evaluate_ap.txt")));
}

TEST(BuildReproduce, ComparisonsMatchGolden) {
  const auto& f = fixtures();
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini);
  EXPECT_EQ(report.mode, ReportMode::reproduce);
  ASSERT_EQ(report.runs.size(), 2u);
  EXPECT_EQ(report.runs[0].label, "orig");
  EXPECT_EQ(report.runs[1].label, "rep");
  EXPECT_EQ(report.runs[0].tag, "origbase");
  EXPECT_EQ(report.runs[1].tag, "repbase");

  ASSERT_EQ(report.comparisons.size(), 3u);
  const MeasureComparison& p10 = report.comparisons[0];
  const MeasureComparison& ap = report.comparisons[1];
  const MeasureComparison& ndcg = report.comparisons[2];

  EXPECT_EQ(ap.measure, "AP");
  EXPECT_NEAR(ap.arp_delta, kArpDeltaAp, 1e-12);
  EXPECT_NEAR(ap.rmse, kRmseAp, 1e-12);
  EXPECT_NEAR(*ap.paired_t.statistic, kPairedApT, 1e-9);
  EXPECT_NEAR(*ap.paired_t.p_value, kPairedApP, 1e-9);
  EXPECT_EQ(ap.paired_t.kind, TestKind::paired);

  EXPECT_NEAR(ndcg.rmse, kRmseNdcg10, 1e-12);
  EXPECT_NEAR(*ndcg.paired_t.statistic, kPairedNdcgT, 1e-9);

  // P@10 agrees per topic: zero distance and the degenerate paired test
  EXPECT_EQ(p10.measure, "P@10");
  EXPECT_EQ(p10.rmse, 0.0);
  EXPECT_EQ(*p10.paired_t.statistic, 0.0);
  EXPECT_EQ(*p10.paired_t.p_value, 1.0);
}

TEST(BuildReproduce, RboAndCurvesMatchGolden) {
  const auto& f = fixtures();
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini);

  ASSERT_TRUE(report.rbo.has_value());
  EXPECT_DOUBLE_EQ(report.rbo->p, 0.8);
  EXPECT_NEAR(report.rbo->mean, kRboMean, 1e-10);

  // default measures carry two cutoff kinds: KTU + RMSE(P) + RMSE(nDCG)
  ASSERT_EQ(report.curves.size(), 3u);
  EXPECT_EQ(report.curves[0].measure, "KTU");
  EXPECT_EQ(report.curves[1].measure, "RMSE(P)");
  EXPECT_EQ(report.curves[2].measure, "RMSE(nDCG)");
  EXPECT_EQ(report.curves[0].aggregation, CutoffCurve::Aggregation::arithmetic);
  EXPECT_EQ(report.curves[1].aggregation, CutoffCurve::Aggregation::quadratic);

  // fixture depth is 7, so the automatic grid clips to {5, 7}
  EXPECT_EQ(report.cutoffs, (std::vector<int>{5, 7}));
  std::size_t i = 0;
  for (const auto& [topic, points] : report.curves[0].per_topic)
    EXPECT_NEAR(*points.at(5), kKtuAt5ByTopic[i++], 1e-12) << topic;
  EXPECT_NEAR(*report.curves[1].mean_per_cutoff.at(5), kRmsePAt5, 1e-12);
  EXPECT_NEAR(*report.curves[2].mean_per_cutoff.at(5), kRmseNdcgAt5, 1e-12);
}

TEST(BuildReproduce, ExplicitCutoffsPassThroughVerbatim) {
  const auto& f = fixtures();
  ReportOptions options;
  options.cutoffs = {10, 5, 5};  // unsorted with a duplicate
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini, options);
  // 10 exceeds the depth of 7 and still stays: explicit grids are not clipped
  EXPECT_EQ(report.cutoffs, (std::vector<int>{5, 10}));
  std::size_t i = 0;
  for (const auto& [topic, points] : report.curves[0].per_topic) {
    EXPECT_NEAR(*points.at(10), kKtuAt10ByTopic[i++], 1e-12) << topic;
  }

  ReportOptions bad;
  bad.cutoffs = {5, 0};
  EXPECT_THROW(build_reproduce(f.orig_b, f.rep_b, f.mini, bad), std::invalid_argument);
}

TEST(BuildReproduce, DisjointTopicSetsRaiseWithDiagnostics) {
  const auto& f = fixtures();
  try {
    build_reproduce(f.orig_b, f.rep2_b, f.mini);
    FAIL() << "expected SemanticError";
  } catch (const SemanticError& e) {
    const std::string message = e.what();
    EXPECT_NE(message.find("topic sets differ"), std::string::npos);
    EXPECT_NE(message.find("301"), std::string::npos);  // previews name topics
    EXPECT_NE(message.find("401"), std::string::npos);
    EXPECT_NE(message.find("0 shared"), std::string::npos);
  }
}

TEST(BuildReplicate, EffectsMatchGolden) {
  const auto& f = fixtures();
  const ReproReport report =
      build_replicate(f.orig_b, f.orig_a, f.rep2_b, f.rep2_a, f.mini, f.rep2);
  EXPECT_EQ(report.mode, ReportMode::replicate);
  EXPECT_EQ(report.run_pair, "rep2adv_vs_origadv");
  ASSERT_EQ(report.runs.size(), 4u);
  EXPECT_EQ(report.runs[0].label, "orig_base");
  EXPECT_EQ(report.runs[1].label, "orig_adv");
  EXPECT_EQ(report.runs[2].label, "rep_base");
  EXPECT_EQ(report.runs[3].label, "rep_adv");
  EXPECT_NEAR(report.runs[1].columns[1].arp, kAdvApMean, 1e-12);
  EXPECT_NEAR(report.runs[2].columns[1].arp, kRep2BaseApMean, 1e-12);

  ASSERT_EQ(report.effects.size(), 3u);
  const ReplicateComparison& p10 = report.effects[0];
  const ReplicateComparison& ap = report.effects[1];
  const ReplicateComparison& ndcg = report.effects[2];

  EXPECT_EQ(ap.measure, "AP");
  EXPECT_NEAR(*ap.er, kErAp, 1e-12);
  EXPECT_NEAR(*ap.delta_ri, kDriAp, 1e-12);
  EXPECT_NEAR(*ap.baseline_t.statistic, kUnpairedBaseApT, 1e-9);
  EXPECT_DOUBLE_EQ(ap.baseline_t.df, kUnpairedBaseApDf);
  EXPECT_NEAR(*ap.baseline_t.p_value, kUnpairedBaseApP, 1e-9);
  EXPECT_NEAR(*ap.advanced_t.statistic, kUnpairedAdvApT, 1e-9);
  EXPECT_EQ(ap.baseline_t.kind, TestKind::unpaired_pooled);

  EXPECT_EQ(*p10.er, kErP10);
  EXPECT_NEAR(*p10.delta_ri, kDriP10, 1e-12);
  EXPECT_NEAR(*ndcg.er, kErNdcg10, 1e-12);
  EXPECT_NEAR(*ndcg.delta_ri, kDriNdcg10, 1e-12);
}

TEST(BuildReplicate, WelchFlagSwitchesTheTest) {
  const auto& f = fixtures();
  ReportOptions options;
  options.welch = true;
  const ReproReport report =
      build_replicate(f.orig_b, f.orig_a, f.rep2_b, f.rep2_a, f.mini, f.rep2, options);
  const ReplicateComparison& ap = report.effects[1];
  EXPECT_EQ(ap.baseline_t.kind, TestKind::unpaired_welch);
  EXPECT_NEAR(*ap.baseline_t.statistic, kWelchBaseApT, 1e-9);
  EXPECT_NEAR(ap.baseline_t.df, kWelchBaseApDf, 1e-9);
  EXPECT_NEAR(*ap.baseline_t.p_value, kWelchBaseApP, 1e-9);
}

TEST(BuildReplicate, IntraPairMismatchRaises) {
  const auto& f = fixtures();
  // rep2_b against orig_a: different collections inside one pair
  EXPECT_THROW(build_replicate(f.orig_b, f.rep2_a, f.rep2_b, f.rep2_a, f.mini, f.rep2),
               SemanticError);
}

TEST(Render, TextIsDeterministic) {
  const auto& f = fixtures();
  const ReproReport reproduce = build_reproduce(f.orig_b, f.rep_b, f.mini);
  std::ostringstream a, b;
  render_text(a, reproduce);
  render_text(b, reproduce);
  EXPECT_EQ(a.str(), b.str());
  const ReproReport rebuilt = build_reproduce(f.orig_b, f.rep_b, f.mini);
  std::ostringstream c;
  render_text(c, rebuilt);
  EXPECT_EQ(a.str(), c.str());  // a fresh pipeline run renders the same bytes
}

TEST(Render, TextCarriesTheGoldenNumbersAtSixDecimals) {
  const auto& f = fixtures();
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini);
  std::ostringstream out;
  render_text(out, report);
  const std::string text = out.str();
  EXPECT_NE(text.find("mode\treproduce\n"), std::string::npos);
  EXPECT_NE(text.find("tag\torig\torigbase\n"), std::string::npos);
  EXPECT_NE(text.find("arp_delta\tAP\t" + fixed6(kArpDeltaAp) + "\n"), std::string::npos);
  EXPECT_NE(text.find("rmse\tAP\t" + fixed6(kRmseAp) + "\n"), std::string::npos);
  EXPECT_NE(text.find("rbo\tall\t" + fixed6(kRboMean) + "\n"), std::string::npos);
  EXPECT_NE(text.find("paired_t\tP@10\t0.000000\t4.000000\t1.000000\n"), std::string::npos);
  EXPECT_NE(text.find("curve\tKTU\tmean\t5\t"), std::string::npos);
}

TEST(Render, JsonAgreesWithStructAtFullPrecision) {
  const auto& f = fixtures();
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini);
  const nlohmann::ordered_json j = to_json(report);
  EXPECT_EQ(j["mode"], "reproduce");
  EXPECT_EQ(j["runs"][0]["label"], "orig");
  EXPECT_DOUBLE_EQ(j["comparisons"][1]["arp_delta"].get<double>(), report.comparisons[1].arp_delta);
  EXPECT_DOUBLE_EQ(j["comparisons"][1]["rmse"].get<double>(), report.comparisons[1].rmse);
  EXPECT_DOUBLE_EQ(j["rbo"]["mean"].get<double>(), report.rbo->mean);
  EXPECT_DOUBLE_EQ(j["runs"][0]["arp"]["AP"].get<double>(), report.runs[0].columns[1].arp);
  // degenerate P@10 paired test: defined zeros, not nulls
  EXPECT_DOUBLE_EQ(j["comparisons"][0]["paired_t"]["t"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j["comparisons"][0]["paired_t"]["p"].get<double>(), 1.0);
  EXPECT_EQ(j["cutoffs"], (std::vector<int>{5, 7}));

  std::ostringstream out_a, out_b;
  render_json(out_a, report);
  render_json(out_b, report);
  EXPECT_EQ(out_a.str(), out_b.str());
  EXPECT_EQ(out_a.str().back(), '\n');
}

TEST(Render, JsonUsesNullForUndefinedValues) {
  // constant nonzero drift: paired t undefined on every topic pair
  TopicScoreMap a, b;
  a.measure = b.measure = "AP";
  a.scores = {{"1", 0.5}, {"2", 0.5}};
  b.scores = {{"1", 0.25}, {"2", 0.25}};
  ReproReport report;
  report.mode = ReportMode::reproduce;
  MeasureComparison cmp;
  cmp.measure = "AP";
  cmp.arp_delta = -0.25;
  cmp.rmse = 0.25;
  cmp.paired_t = paired_t_test(a, b);
  report.comparisons.push_back(cmp);
  const nlohmann::ordered_json j = to_json(report);
  EXPECT_TRUE(j["comparisons"][0]["paired_t"]["t"].is_null());
  EXPECT_TRUE(j["comparisons"][0]["paired_t"]["p"].is_null());

  std::ostringstream out;
  detail::render_test_row(out, "paired_t", "AP", "", cmp.paired_t);
  EXPECT_EQ(out.str(), "paired_t\tAP\tundef\t1.000000\tundef\n");
}

TEST(PlotCsv, ArpBarsWorksForEveryMode) {
  const auto& f = fixtures();
  const ReproReport evaluate = build_evaluate(f.orig_b, f.mini);
  std::ostringstream out;
  render_plot_csv(out, evaluate, PlotKind::arp_bars);
  const std::string text = out.str();
  EXPECT_EQ(text.find("run,measure,value\n"), 0u);
  EXPECT_NE(text.find("origbase,AP," + fixed6(kOrigApMean) + "\n"), std::string::npos);

  const ReproReport replicate =
      build_replicate(f.orig_b, f.orig_a, f.rep2_b, f.rep2_a, f.mini, f.rep2);
  std::ostringstream out2;
  render_plot_csv(out2, replicate, PlotKind::arp_bars);
  // 4 runs x 3 measures + header
  const std::string csv = out2.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(PlotCsv, CutoffCurveRowCountIsCurvesTimesTopicsPlusMeanTimesCutoffs) {
  const auto& f = fixtures();
  const ReproReport report = build_reproduce(f.orig_b, f.rep_b, f.mini);
  std::ostringstream out;
  render_plot_csv(out, report, PlotKind::cutoff_curves);
  const std::string text = out.str();
  EXPECT_EQ(text.find("measure,topic,cutoff,value\n"), 0u);
  // 3 curves x (5 topics + mean) x 2 cutoffs + header
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3 * 6 * 2 + 1);
  EXPECT_NE(text.find("KTU,301,5,"), std::string::npos);
  EXPECT_NE(text.find("RMSE(P),mean,7,"), std::string::npos);
}

TEST(PlotCsv, ScatterHoldsOnePointPerMeasure) {
  const auto& f = fixtures();
  const ReproReport report =
      build_replicate(f.orig_b, f.orig_a, f.rep2_b, f.rep2_a, f.mini, f.rep2);
  std::ostringstream out;
  render_plot_csv(out, report, PlotKind::er_dri_scatter);
  const std::string text = out.str();
  EXPECT_EQ(text.find("run_pair,measure,er,delta_ri\n"), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_NE(text.find("rep2adv_vs_origadv,AP," + fixed6(kErAp) + "," + fixed6(kDriAp) + "\n"),
            std::string::npos);
}

TEST(PlotCsv, KindsRejectIncompatibleModes) {
  const auto& f = fixtures();
  const ReproReport evaluate = build_evaluate(f.orig_b, f.mini);
  std::ostringstream out;
  EXPECT_THROW(render_plot_csv(out, evaluate, PlotKind::cutoff_curves), UnsupportedError);
  EXPECT_THROW(render_plot_csv(out, evaluate, PlotKind::er_dri_scatter), UnsupportedError);
  const ReproReport reproduce = build_reproduce(f.orig_b, f.rep_b, f.mini);
  EXPECT_THROW(render_plot_csv(out, reproduce, PlotKind::er_dri_scatter), UnsupportedError);
  const ReproReport replicate =
      build_replicate(f.orig_b, f.orig_a, f.rep2_b, f.rep2_a, f.mini, f.rep2);
  EXPECT_THROW(render_plot_csv(out, replicate, PlotKind::cutoff_curves), UnsupportedError);
}

TEST(PlotCsv, KindParserAcceptsTheThreeNames) {
  EXPECT_EQ(parse_plot_kind("arp-bars"), PlotKind::arp_bars);
  EXPECT_EQ(parse_plot_kind("cutoff-curves"), PlotKind::cutoff_curves);
  EXPECT_EQ(parse_plot_kind("er-dri-scatter"), PlotKind::er_dri_scatter);
  EXPECT_THROW(parse_plot_kind("pie"), std::invalid_argument);
}

}  // namespace
