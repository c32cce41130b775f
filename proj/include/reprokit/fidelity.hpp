#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <span>
#include <string>

#include "reprokit/errors.hpp"
#include "reprokit/eval.hpp"
#include "reprokit/ordering.hpp"
#include "reprokit/run_model.hpp"

// Closeness of per-topic score distributions between an original and a
// reproduced run. RMSE is a reproduction-only measure: the two score maps
// must cover exactly the same topics, mismatches are an error rather than a
// silent intersection.

namespace reprokit {

struct RmseOptions {
  bool normalized = false;  // divide by the original ARP
};

inline double rmse(const TopicScoreMap& orig, const TopicScoreMap& rep,
                   const RmseOptions& options = {}) {
  if (orig.measure != rep.measure)
    throw SemanticError("rmse: measures differ ('" + orig.measure + "' vs '" + rep.measure + "')");
  if (orig.scores.empty() || rep.scores.empty()) throw SemanticError("rmse: empty score map");
  const PairingReport pairing = pair_topics(orig, rep);
  if (!pairing.only_a.empty() || !pairing.only_b.empty())
    throw SemanticError("rmse: topic sets differ (" + std::to_string(pairing.only_a.size()) +
                        " only in original, " + std::to_string(pairing.only_b.size()) +
                        " only in reproduction)");
  KahanSum acc;
  for (const auto& [topic, orig_score] : orig.scores) {
    const double d = orig_score - rep.scores.at(topic);
    acc.add(d * d);
  }
  double value = std::sqrt(acc.value() / static_cast<double>(orig.scores.size()));
  if (options.normalized) {
    const double base = arp(orig);
    if (base == 0.0) throw SemanticError("rmse: cannot normalize by a zero original ARP");
    value /= base;
  }
  return value;
}

// RMSE at each cutoff of a cutoff-parameterized measure (P@k or nDCG@k).
// per_topic holds |orig - rep| per topic, i.e. the single-topic RMSE; the
// aggregate is their quadratic mean.
inline CutoffCurve rmse_curve(const Run& orig_run, const Run& rep_run, const Qrels& qrels,
                              MeasureKind kind, std::span<const int> cutoffs,
                              const RmseOptions& options = {}) {
  if (kind == MeasureKind::average_precision)
    throw std::invalid_argument("rmse_curve: measure must take a cutoff");
  CutoffCurve curve;
  curve.measure = kind == MeasureKind::precision ? "RMSE(P)" : "RMSE(nDCG)";
  curve.aggregation = CutoffCurve::Aggregation::quadratic;
  for (int k : cutoffs) {
    const MeasureSpec spec{kind, k};
    const Evaluation orig_eval = evaluate_run(orig_run, qrels, spec);
    const Evaluation rep_eval = evaluate_run(rep_run, qrels, spec);
    curve.mean_per_cutoff[k] = rmse(orig_eval.scores, rep_eval.scores, options);
    for (const auto& [topic, orig_score] : orig_eval.scores.scores)
      curve.per_topic[topic][k] = std::fabs(orig_score - rep_eval.scores.scores.at(topic));
  }
  return curve;
}

// arp(rep) - arp(orig). Topic sets may differ; this is the coarse
// comparison that RMSE exists to sharpen.
inline double arp_delta(const TopicScoreMap& orig, const TopicScoreMap& rep) {
  return arp(rep) - arp(orig);
}

}  // namespace reprokit
