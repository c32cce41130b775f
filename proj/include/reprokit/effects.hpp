#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprokit/errors.hpp"
#include "reprokit/eval.hpp"
#include "reprokit/numerics.hpp"
#include "reprokit/run_model.hpp"

// Overall-effect comparison between an original baseline/advanced pair and
// its reimplemented counterpart. The two pairs may come from different
// collections, so only within-pair topic alignment is required.

namespace reprokit {

struct ExperimentQuadruple {
  TopicScoreMap orig_baseline;
  TopicScoreMap orig_advanced;
  TopicScoreMap rep_baseline;
  TopicScoreMap rep_advanced;

  // All four maps must carry the same measure, each pair must share its
  // topic set exactly, and no side may be empty.
  void validate() const {
    const std::string& m = orig_baseline.measure;
    if (orig_advanced.measure != m || rep_baseline.measure != m || rep_advanced.measure != m)
      throw SemanticError("effect comparison: measure mismatch across the four score sets");
    if (orig_baseline.scores.empty() || rep_baseline.scores.empty())
      throw SemanticError("effect comparison: empty score set");
    const PairingReport orig_pairing = pair_topics(orig_baseline, orig_advanced);
    if (!orig_pairing.only_a.empty() || !orig_pairing.only_b.empty())
      throw SemanticError("effect comparison: original baseline/advanced topic sets differ");
    const PairingReport rep_pairing = pair_topics(rep_baseline, rep_advanced);
    if (!rep_pairing.only_a.empty() || !rep_pairing.only_b.empty())
      throw SemanticError("effect comparison: reimplementation baseline/advanced topic sets differ");
  }
};

namespace detail {

inline double mean_delta(const TopicScoreMap& advanced, const TopicScoreMap& baseline) {
  KahanSum sum;
  for (const auto& [topic, v] : advanced.scores) sum.add(v - baseline.scores.at(topic));
  return sum.value() / static_cast<double>(advanced.scores.size());
}

}  // namespace detail

// ER = mean per-topic improvement of the reimplementation over the mean
// per-topic improvement of the original. An exactly zero original effect
// leaves the ratio undefined.
inline std::optional<double> effect_ratio(const ExperimentQuadruple& q) {
  q.validate();
  const double orig = detail::mean_delta(q.orig_advanced, q.orig_baseline);
  const double rep = detail::mean_delta(q.rep_advanced, q.rep_baseline);
  if (orig == 0.0) return std::nullopt;
  return rep / orig;
}

// Relative improvement of one pair: (ARP_adv - ARP_base) / ARP_base.
// Undefined when the baseline ARP is exactly zero.
inline std::optional<double> relative_improvement(const TopicScoreMap& baseline,
                                                  const TopicScoreMap& advanced) {
  const double base = arp(baseline);
  const double adv = arp(advanced);
  if (base == 0.0) return std::nullopt;
  return (adv - base) / base;
}

// DeltaRI = RI_orig - RI_rep; zero signals the relative improvement carried
// over intact. Undefined whenever either side's RI is undefined.
inline std::optional<double> delta_relative_improvement(const ExperimentQuadruple& q) {
  q.validate();
  const std::optional<double> ri_orig = relative_improvement(q.orig_baseline, q.orig_advanced);
  const std::optional<double> ri_rep = relative_improvement(q.rep_baseline, q.rep_advanced);
  if (!ri_orig || !ri_rep) return std::nullopt;
  return *ri_orig - *ri_rep;
}

// One (ER, DeltaRI) coordinate per measure, ready for scatter plotting.
// Perfect replication sits at (1, 0).
struct EffectPoint {
  std::string measure;
  std::optional<double> er;
  std::optional<double> delta_ri;
};

inline std::vector<EffectPoint> effect_points(std::span<const ExperimentQuadruple> quadruples) {
  std::vector<EffectPoint> points;
  points.reserve(quadruples.size());
  for (const ExperimentQuadruple& q : quadruples) {
    EffectPoint point;
    point.measure = q.orig_baseline.measure;
    point.er = effect_ratio(q);
    point.delta_ri = delta_relative_improvement(q);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace reprokit
