#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reprokit/errors.hpp"
#include "reprokit/numerics.hpp"
#include "reprokit/run_model.hpp"

// Per-topic effectiveness measures compatible with trec_eval: P@k, AP and
// nDCG@k (linear gain, log2 discount, the ndcg_cut convention). Unjudged
// documents count as non-relevant; topics without any relevant judged
// document are skipped rather than scored 0.

namespace reprokit {

enum class MeasureKind { precision, average_precision, ndcg };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::average_precision;
  int cutoff = 0;  // required for precision/ndcg, ignored for AP

  // Accepts "P@10"/"p_10", "ap"/"map", "ndcg@10"/"ndcg_10"/"ndcg_cut_10".
  static MeasureSpec parse(std::string_view text) {
    std::string lower;
    lower.reserve(text.size());
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    if (lower == "ap" || lower == "map") return {MeasureKind::average_precision, 0};

    auto split_cutoff = [&](std::string_view name) -> int {
      // name is the part after the separator; must be a positive integer
      int k = 0;
      for (char c : name) {
        if (c < '0' || c > '9') return 0;
        k = k * 10 + (c - '0');
        if (k > 1000000) return 0;
      }
      return name.empty() ? 0 : k;
    };

    std::string_view rest;
    if (lower.rfind("p@", 0) == 0) rest = std::string_view(lower).substr(2);
    else if (lower.rfind("p_", 0) == 0) rest = std::string_view(lower).substr(2);
    if (!rest.empty()) {
      int k = split_cutoff(rest);
      if (k >= 1) return {MeasureKind::precision, k};
      throw std::invalid_argument("bad precision cutoff in measure: '" + std::string(text) + "'");
    }
    if (lower.rfind("ndcg_cut_", 0) == 0) rest = std::string_view(lower).substr(9);
    else if (lower.rfind("ndcg@", 0) == 0) rest = std::string_view(lower).substr(5);
    else if (lower.rfind("ndcg_", 0) == 0) rest = std::string_view(lower).substr(5);
    if (!rest.empty()) {
      int k = split_cutoff(rest);
      if (k >= 1) return {MeasureKind::ndcg, k};
      throw std::invalid_argument("bad ndcg cutoff in measure: '" + std::string(text) + "'");
    }
    throw std::invalid_argument("unknown measure: '" + std::string(text) + "'");
  }

  std::string name() const {
    switch (kind) {
      case MeasureKind::precision: return "P@" + std::to_string(cutoff);
      case MeasureKind::average_precision: return "AP";
      case MeasureKind::ndcg: return "nDCG@" + std::to_string(cutoff);
    }
    return "?";
  }

  bool needs_cutoff() const { return kind != MeasureKind::average_precision; }

  bool operator==(const MeasureSpec& other) const {
    if (kind != other.kind) return false;
    return kind == MeasureKind::average_precision || cutoff == other.cutoff;
  }
};

inline std::vector<MeasureSpec> default_measures() {
  return {MeasureSpec{MeasureKind::precision, 10}, MeasureSpec{MeasureKind::average_precision, 0},
          MeasureSpec{MeasureKind::ndcg, 10}};
}

namespace detail {
inline int grade_of(const std::map<std::string, int>& judged, const std::string& doc) {
  auto it = judged.find(doc);
  return it == judged.end() ? 0 : it->second;
}
}  // namespace detail

// |relevant docs in the top-min(k,n)| / k. The divisor stays k even when
// fewer than k documents were retrieved, as in trec_eval.
inline double precision_at_k(std::span<const std::string> ranking,
                             const std::map<std::string, int>& judged, int k) {
  if (k < 1) throw std::invalid_argument("precision cutoff must be >= 1");
  const std::size_t limit = std::min<std::size_t>(k, ranking.size());
  int hits = 0;
  for (std::size_t i = 0; i < limit; ++i)
    if (detail::grade_of(judged, ranking[i]) > 0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

// (1/R) * sum of P@i over ranks i holding a relevant document, with R the
// number of relevant documents in the judgments. Unretrieved relevant
// documents contribute nothing to the sum but stay in R.
inline double average_precision(std::span<const std::string> ranking,
                                const std::map<std::string, int>& judged) {
  int total_relevant = 0;
  for (const auto& [doc, g] : judged)
    if (g > 0) ++total_relevant;
  if (total_relevant == 0)
    throw std::invalid_argument("average precision needs a topic with relevant documents");
  KahanSum acc;
  int hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (detail::grade_of(judged, ranking[i]) > 0) {
      ++hits;
      acc.add(static_cast<double>(hits) / static_cast<double>(i + 1));
    }
  }
  return acc.value() / static_cast<double>(total_relevant);
}

// DCG@k / IDCG@k with gain = raw grade and discount 1/log2(i+1), position i
// starting at 1. The ideal ordering sorts all judged grades descending.
inline double ndcg_at_k(std::span<const std::string> ranking,
                        const std::map<std::string, int>& judged, int k) {
  if (k < 1) throw std::invalid_argument("ndcg cutoff must be >= 1");
  std::vector<int> ideal;
  ideal.reserve(judged.size());
  for (const auto& [doc, g] : judged)
    if (g > 0) ideal.push_back(g);
  if (ideal.empty()) throw std::invalid_argument("ndcg needs a topic with a positive grade");
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());

  auto discount = [](std::size_t pos1) { return 1.0 / std::log2(static_cast<double>(pos1) + 1.0); };

  KahanSum dcg;
  const std::size_t limit = std::min<std::size_t>(k, ranking.size());
  for (std::size_t i = 0; i < limit; ++i) {
    const int g = detail::grade_of(judged, ranking[i]);
    if (g > 0) dcg.add(static_cast<double>(g) * discount(i + 1));
  }
  KahanSum idcg;
  const std::size_t ideal_limit = std::min<std::size_t>(k, ideal.size());
  for (std::size_t i = 0; i < ideal_limit; ++i)
    idcg.add(static_cast<double>(ideal[i]) * discount(i + 1));
  return dcg.value() / idcg.value();
}

struct Evaluation {
  TopicScoreMap scores;
  std::vector<std::string> skipped;  // run topics unjudged or without relevant docs
};

// One score per evaluable topic of the run. A topic is evaluable when the
// qrels judge it with at least one relevant document; everything else lands
// on the skip list.
inline Evaluation evaluate_run(const Run& run, const Qrels& qrels, const MeasureSpec& spec) {
  Evaluation result;
  result.scores.measure = spec.name();
  for (const auto& [topic, entries] : run.topics) {
    auto judged_it = qrels.topics.find(topic);
    if (judged_it == qrels.topics.end() || qrels.relevant_count(topic) == 0) {
      result.skipped.push_back(topic);
      continue;
    }
    std::vector<std::string> ranking;
    ranking.reserve(entries.size());
    for (const RunEntry& e : entries) ranking.push_back(e.doc_id);
    double score = 0.0;
    switch (spec.kind) {
      case MeasureKind::precision:
        score = precision_at_k(ranking, judged_it->second, spec.cutoff);
        break;
      case MeasureKind::average_precision:
        score = average_precision(ranking, judged_it->second);
        break;
      case MeasureKind::ndcg:
        score = ndcg_at_k(ranking, judged_it->second, spec.cutoff);
        break;
    }
    result.scores.scores.emplace(topic, score);
  }
  if (result.scores.scores.empty())
    throw SemanticError("no evaluable topic: run and qrels share no topic with relevant documents");
  return result;
}

// Average retrieval performance: the arithmetic mean over topics.
inline double arp(const TopicScoreMap& scores) {
  if (scores.scores.empty()) throw SemanticError("ARP of an empty score map");
  KahanSum acc;
  for (const auto& [topic, v] : scores.scores) acc.add(v);
  return acc.value() / static_cast<double>(scores.scores.size());
}

}  // namespace reprokit
