#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reprokit/errors.hpp"
#include "reprokit/numerics.hpp"

// Domain types for TREC-style runs and qrels plus strict parsers/writers.
//
// Run format, one entry per line:   topic Q0 doc_id rank score tag
// Qrels format, one entry per line: topic iteration doc_id relevance
//
// Fields are separated by any mix of spaces and tabs; blank lines are
// ignored. The rank column of a run is never trusted for ordering: entries
// are re-sorted by (score descending, doc_id descending) and ranks are
// rewritten to match, which is also what trec_eval does on tied scores.

namespace reprokit {

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  int rank = 0;        // position in the canonical ordering, 1-based
  int input_rank = 0;  // rank column as found in the input, diagnostics only
};

struct ParseStats {
  std::size_t lines = 0;                // non-blank lines consumed
  std::size_t entries = 0;              // entries kept after depth truncation
  std::size_t dropped_beyond_depth = 0; // entries discarded by the depth cap
};

struct Run {
  std::string tag;
  std::map<std::string, std::vector<RunEntry>> topics;
  ParseStats stats;

  std::vector<std::string> topic_ids() const {
    std::vector<std::string> ids;
    ids.reserve(topics.size());
    for (const auto& [id, entries] : topics) ids.push_back(id);
    return ids;
  }

  // Canonically ordered document ids of one topic.
  std::vector<std::string> doc_list(const std::string& topic_id) const {
    std::vector<std::string> docs;
    auto it = topics.find(topic_id);
    if (it == topics.end()) return docs;
    docs.reserve(it->second.size());
    for (const RunEntry& e : it->second) docs.push_back(e.doc_id);
    return docs;
  }

  std::size_t max_depth() const {
    std::size_t depth = 0;
    for (const auto& [id, entries] : topics) depth = std::max(depth, entries.size());
    return depth;
  }
};

struct Qrels {
  // topic -> doc -> grade; grades are clamped to >= 0 at parse time
  std::map<std::string, std::map<std::string, int>> topics;

  int grade(const std::string& topic_id, const std::string& doc_id) const {
    auto t = topics.find(topic_id);
    if (t == topics.end()) return 0;
    auto d = t->second.find(doc_id);
    return d == t->second.end() ? 0 : d->second;
  }

  int relevant_count(const std::string& topic_id) const {
    auto t = topics.find(topic_id);
    if (t == topics.end()) return 0;
    int n = 0;
    for (const auto& [doc, g] : t->second)
      if (g > 0) ++n;
    return n;
  }
};

struct TopicScoreMap {
  std::string measure;
  std::map<std::string, double> scores;
};

struct PairingReport {
  std::vector<std::string> shared;
  std::vector<std::string> only_a;
  std::vector<std::string> only_b;
  std::size_t dropped_a = 0;  // depth-cap drops carried over from the inputs
  std::size_t dropped_b = 0;
};

struct ParseOptions {
  int depth = 1000;      // entries kept per topic after canonical sorting
  bool lenient = false;  // accept (and ignore) trailing fields
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

inline bool parse_int(std::string_view s, long& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtol(buf.c_str(), &end, 10);
  return errno == 0 && end == buf.c_str() + buf.size();
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return errno == 0 && end == buf.c_str() + buf.size() && std::isfinite(out);
}

inline std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

}  // namespace detail

inline Run parse_run(std::istream& in, const ParseOptions& options = {}) {
  Run run;
  std::map<std::string, std::set<std::string>> seen_docs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::chomp(std::move(raw));
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    run.stats.lines++;
    if (fields.size() < 6)
      throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), line_no);
    if (fields.size() > 6 && !options.lenient)
      throw ParseError("expected 6 fields, found " + std::to_string(fields.size()) +
                           " (pass lenient to ignore extras)",
                       line_no);
    const std::string topic(fields[0]);
    // fields[1] is the conventional "Q0" column; not validated
    const std::string doc(fields[2]);
    long input_rank = 0;
    if (!detail::parse_int(fields[3], input_rank))
      throw ParseError("rank is not an integer: '" + std::string(fields[3]) + "'", line_no);
    double score = 0.0;
    if (!detail::parse_double(fields[4], score))
      throw ParseError("score is not a number: '" + std::string(fields[4]) + "'", line_no);
    if (!seen_docs[topic].insert(doc).second)
      throw ParseError("duplicate document '" + doc + "' in topic '" + topic + "'", line_no);
    if (run.tag.empty()) run.tag = std::string(fields[5]);
    run.topics[topic].push_back(
        RunEntry{doc, score, 0, static_cast<int>(input_rank)});
  }
  if (run.topics.empty()) throw ParseError("empty run input", 0);

  for (auto& [topic, entries] : run.topics) {
    std::sort(entries.begin(), entries.end(), [](const RunEntry& a, const RunEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id > b.doc_id;
    });
    if (options.depth > 0 && entries.size() > static_cast<std::size_t>(options.depth)) {
      run.stats.dropped_beyond_depth += entries.size() - options.depth;
      entries.resize(options.depth);
    }
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i) + 1;
    run.stats.entries += entries.size();
  }
  return run;
}

inline Qrels parse_qrels(std::istream& in, const ParseOptions& options = {}) {
  Qrels qrels;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t entries = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::chomp(std::move(raw));
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 4)
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), line_no);
    if (fields.size() > 4 && !options.lenient)
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()) +
                           " (pass lenient to ignore extras)",
                       line_no);
    const std::string topic(fields[0]);
    // fields[1] is the iteration column; ignored
    const std::string doc(fields[2]);
    long grade = 0;
    if (!detail::parse_int(fields[3], grade))
      throw ParseError("relevance is not an integer: '" + std::string(fields[3]) + "'", line_no);
    if (grade < 0) grade = 0;  // TREC convention: negative means unjudged-as-nonrelevant
    auto [it, inserted] = qrels.topics[topic].emplace(doc, static_cast<int>(grade));
    if (!inserted)
      throw ParseError("duplicate judgment for document '" + doc + "' in topic '" + topic + "'",
                       line_no);
    ++entries;
  }
  if (entries == 0) throw ParseError("empty qrels input", 0);
  return qrels;
}

inline Run parse_run_file(const std::filesystem::path& path, const ParseOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run file: " + path.string());
  try {
    return parse_run(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line());
  }
}

inline Qrels parse_qrels_file(const std::filesystem::path& path, const ParseOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open qrels file: " + path.string());
  try {
    return parse_qrels(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line());
  }
}

// Emits the canonical form: topics in sorted order, entries in canonical
// ranking, scores in shortest round-trip notation. parse_run(write_run(r))
// reproduces r exactly.
inline void write_run(std::ostream& out, const Run& run) {
  for (const auto& [topic, entries] : run.topics) {
    for (const RunEntry& e : entries) {
      out << topic << '\t' << "Q0" << '\t' << e.doc_id << '\t' << e.rank << '\t'
          << shortest_repr(e.score) << '\t' << run.tag << '\n';
    }
  }
}

namespace detail {

inline PairingReport pair_sorted_ids(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
  PairingReport report;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(report.shared));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(report.only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(),
                      std::back_inserter(report.only_b));
  return report;
}

}  // namespace detail

inline PairingReport pair_topics(const Run& a, const Run& b) {
  PairingReport report = detail::pair_sorted_ids(a.topic_ids(), b.topic_ids());
  report.dropped_a = a.stats.dropped_beyond_depth;
  report.dropped_b = b.stats.dropped_beyond_depth;
  return report;
}

inline PairingReport pair_topics(const TopicScoreMap& a, const TopicScoreMap& b) {
  std::vector<std::string> ids_a, ids_b;
  for (const auto& [id, s] : a.scores) ids_a.push_back(id);
  for (const auto& [id, s] : b.scores) ids_b.push_back(id);
  return detail::pair_sorted_ids(ids_a, ids_b);
}

}  // namespace reprokit
