#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reprokit/errors.hpp"
#include "reprokit/run_model.hpp"

// Rank-correlation and overlap measures between original and reproduced
// document orderings: tie-corrected Kendall's tau_b, its union variant over
// top-k prefixes (KTU), and extrapolated rank-biased overlap (RBO).

namespace reprokit {

struct CutoffCurve {
  enum class Aggregation { arithmetic, quadratic };

  std::string measure;
  Aggregation aggregation = Aggregation::arithmetic;
  // topic -> cutoff -> value; nullopt marks an undefined point (e.g. tau over
  // a single-element union), which is excluded from the aggregate
  std::map<std::string, std::map<int, std::optional<double>>> per_topic;
  std::map<int, std::optional<double>> mean_per_cutoff;
};

namespace detail {

// Pairs (i < j) with v[i] > v[j]; ties are not inversions. Bottom-up merge
// sort; buf must have the same size as v.
inline long long count_inversions(std::vector<double>& v, std::vector<double>& buf) {
  const std::size_t n = v.size();
  long long inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += static_cast<long long>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

inline long long tied_pairs(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  long long tied = 0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const long long t = static_cast<long long>(j - i);
    tied += t * (t - 1) / 2;
    i = j;
  }
  return tied;
}

}  // namespace detail

// tau_b = (P - Q) / sqrt((P + Q + T_a)(P + Q + T_b)) with P/Q the
// concordant/discordant pair counts and T_a/T_b the pairs tied only in one
// vector. Computed via a merge-sort inversion count (Knight's algorithm);
// the integer pair counts are identical to what direct pair enumeration
// yields, so the result matches the quadratic oracle exactly.
// Returns nullopt when n < 2 or either vector is all-tied.
inline std::optional<double> kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    if (a[i] != a[j]) return a[i] < a[j];
    return b[i] < b[j];
  });

  long long xtie = 0, xytie = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && a[idx[j]] == a[idx[i]]) ++j;
    const long long t = static_cast<long long>(j - i);
    xtie += t * (t - 1) / 2;
    std::size_t u = i;
    while (u < j) {
      std::size_t v = u;
      while (v < j && b[idx[v]] == b[idx[u]]) ++v;
      const long long s = static_cast<long long>(v - u);
      xytie += s * (s - 1) / 2;
      u = v;
    }
    i = j;
  }
  const long long ytie = detail::tied_pairs(std::vector<double>(b.begin(), b.end()));

  // With x sorted ascending and x-ties broken by ascending y, strict
  // inversions in the y sequence are exactly the discordant pairs.
  std::vector<double> y_seq(n), buf(n);
  for (std::size_t k = 0; k < n; ++k) y_seq[k] = b[idx[k]];
  const long long discordant = detail::count_inversions(y_seq, buf);

  const long long total = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
  const long long den_a = total - ytie;  // P + Q + pairs tied only in a
  const long long den_b = total - xtie;  // P + Q + pairs tied only in b
  if (den_a == 0 || den_b == 0) return std::nullopt;
  const long long con_minus_dis = total - xtie - ytie + xytie - 2 * discordant;
  return static_cast<double>(con_minus_dis) /
         std::sqrt(static_cast<double>(den_a) * static_cast<double>(den_b));
}

inline std::vector<int> default_cutoffs() { return {5, 10, 20, 30, 50, 100, 200, 500, 1000}; }

// Clips every cutoff to the available depth and deduplicates, preserving
// ascending order. Never returns an empty grid for a non-empty input.
inline std::vector<int> clip_cutoffs(std::span<const int> cutoffs, std::size_t max_depth) {
  std::vector<int> clipped;
  for (int k : cutoffs) {
    if (k < 1) throw std::invalid_argument("cutoffs must be >= 1");
    clipped.push_back(static_cast<int>(std::min<std::size_t>(k, std::max<std::size_t>(max_depth, 1))));
  }
  std::sort(clipped.begin(), clipped.end());
  clipped.erase(std::unique(clipped.begin(), clipped.end()), clipped.end());
  return clipped;
}

// Kendall's tau union. For each shared topic and cutoff k the two top-k
// document sets are merged; a document absent from one side receives the
// synthetic tied rank k+1 there, so divergence shows up as manufactured
// ties and tau_b is the natural variant. When both top-k sets coincide this
// degenerates to plain tau_b over the shared prefix.
inline CutoffCurve ktu(const Run& orig, const Run& rep, std::span<const int> cutoffs) {
  const PairingReport pairing = pair_topics(orig, rep);
  if (pairing.shared.empty())
    throw SemanticError("ktu: runs share no topic");

  CutoffCurve curve;
  curve.measure = "KTU";
  curve.aggregation = CutoffCurve::Aggregation::arithmetic;

  for (const std::string& topic : pairing.shared) {
    const std::vector<std::string> docs_a = orig.doc_list(topic);
    const std::vector<std::string> docs_b = rep.doc_list(topic);
    for (int k : cutoffs) {
      std::unordered_map<std::string, int> pos_a, pos_b;
      const std::size_t ka = std::min<std::size_t>(k, docs_a.size());
      const std::size_t kb = std::min<std::size_t>(k, docs_b.size());
      for (std::size_t i = 0; i < ka; ++i) pos_a.emplace(docs_a[i], static_cast<int>(i) + 1);
      for (std::size_t i = 0; i < kb; ++i) pos_b.emplace(docs_b[i], static_cast<int>(i) + 1);

      std::vector<std::string> union_docs;
      union_docs.reserve(pos_a.size() + pos_b.size());
      for (const auto& [doc, pos] : pos_a) union_docs.push_back(doc);
      for (const auto& [doc, pos] : pos_b)
        if (!pos_a.count(doc)) union_docs.push_back(doc);
      std::sort(union_docs.begin(), union_docs.end());

      std::vector<double> ranks_a, ranks_b;
      ranks_a.reserve(union_docs.size());
      ranks_b.reserve(union_docs.size());
      for (const std::string& doc : union_docs) {
        auto ia = pos_a.find(doc);
        auto ib = pos_b.find(doc);
        ranks_a.push_back(ia == pos_a.end() ? static_cast<double>(k + 1)
                                            : static_cast<double>(ia->second));
        ranks_b.push_back(ib == pos_b.end() ? static_cast<double>(k + 1)
                                            : static_cast<double>(ib->second));
      }
      curve.per_topic[topic][k] = kendall_tau_b(ranks_a, ranks_b);
    }
  }

  for (int k : cutoffs) {
    KahanSum acc;
    std::size_t defined = 0;
    for (const auto& [topic, by_cutoff] : curve.per_topic) {
      const auto it = by_cutoff.find(k);
      if (it != by_cutoff.end() && it->second) {
        acc.add(*it->second);
        ++defined;
      }
    }
    curve.mean_per_cutoff[k] =
        defined == 0 ? std::optional<double>{} : acc.value() / static_cast<double>(defined);
  }
  return curve;
}

// Extrapolated rank-biased overlap (the RBO_EXT form for uneven lists).
// The overlap X_d at successive depths is maintained incrementally: it grows
// by one whenever the next element of one list has already appeared in the
// other. Elements seen exactly once wait in a single lookup set, which is
// sound because document ids are unique within a list.
inline double rbo(std::span<const std::string> list_a, std::span<const std::string> list_b,
                  double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("rbo: p must lie in (0,1)");
  if (list_a.empty() || list_b.empty()) throw std::invalid_argument("rbo: lists must be non-empty");
  {
    std::unordered_set<std::string_view> unique_a, unique_b;
    for (const std::string& d : list_a)
      if (!unique_a.insert(d).second) throw std::invalid_argument("rbo: duplicate item in list");
    for (const std::string& d : list_b)
      if (!unique_b.insert(d).second) throw std::invalid_argument("rbo: duplicate item in list");
  }

  const std::size_t short_len = std::min(list_a.size(), list_b.size());
  const std::size_t long_len = std::max(list_a.size(), list_b.size());
  std::span<const std::string> longer = list_a.size() >= list_b.size() ? list_a : list_b;

  std::unordered_set<std::string_view> seen_once;
  long long overlap = 0;
  double weight = (1.0 - p) / p;  // becomes (1-p) * p^(d-1) after the first step
  double sum = 0.0;

  for (std::size_t d = 1; d <= short_len; ++d) {
    const std::string& ea = list_a[d - 1];
    const std::string& eb = list_b[d - 1];
    if (ea == eb) {
      ++overlap;
    } else {
      if (seen_once.erase(ea) == 1) ++overlap; else seen_once.insert(ea);
      if (seen_once.erase(eb) == 1) ++overlap; else seen_once.insert(eb);
    }
    weight *= p;
    sum += (static_cast<double>(overlap) / static_cast<double>(d)) * weight;
  }

  const long long short_overlap = overlap;
  for (std::size_t d = short_len + 1; d <= long_len; ++d) {
    if (seen_once.erase(longer[d - 1]) == 1) ++overlap;
    weight *= p;
    sum += (static_cast<double>(overlap) / static_cast<double>(d)) * weight;
    // extrapolate the agreement the short list showed at its own depth
    sum += (static_cast<double>(short_overlap) * static_cast<double>(d - short_len)) /
           (static_cast<double>(short_len) * static_cast<double>(d)) * weight;
  }

  const double p_l = std::pow(p, static_cast<double>(long_len));
  sum += (static_cast<double>(overlap - short_overlap) / static_cast<double>(long_len) +
          static_cast<double>(short_overlap) / static_cast<double>(short_len)) *
         p_l;
  return sum;
}

struct RboResult {
  TopicScoreMap per_topic;  // measure "RBO"
  double mean = 0.0;
  double p = 0.0;
};

// Per-topic RBO over the full canonical lists of the shared topics, plus
// the ARP-style mean.
inline RboResult rbo_run(const Run& orig, const Run& rep, double p) {
  const PairingReport pairing = pair_topics(orig, rep);
  if (pairing.shared.empty()) throw SemanticError("rbo_run: runs share no topic");
  RboResult result;
  result.p = p;
  result.per_topic.measure = "RBO";
  KahanSum acc;
  for (const std::string& topic : pairing.shared) {
    const double value = rbo(orig.doc_list(topic), rep.doc_list(topic), p);
    result.per_topic.scores.emplace(topic, value);
    acc.add(value);
  }
  result.mean = acc.value() / static_cast<double>(pairing.shared.size());
  return result;
}

}  // namespace reprokit
