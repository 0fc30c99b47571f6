// zrs/subjective.hpp

// Copyright 2026  zrscore authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ZRS_SUBJECTIVE_HPP
#define ZRS_SUBJECTIVE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zrs/common.hpp"
#include "zrs/distance.hpp"
#include "zrs/textio.hpp"

namespace zrs {

enum class ResponseKind { transcription, mos, similarity };

inline const char* to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::transcription: return "transcription";
    case ResponseKind::mos: return "mos";
    case ResponseKind::similarity: return "similarity";
  }
  return "?";
}

struct Response {
  std::string evaluator_id;
  std::string item_id;
  ResponseKind kind = ResponseKind::transcription;
  std::string text;  // transcription payload
  int rating = 0;    // 1-5 for mos/similarity
  bool is_catch_trial = false;
};

/// CSV columns: evaluator_id, item_id, kind, payload, is_catch_trial. A
/// header row naming the first column is skipped.
inline std::vector<Response> parse_responses_csv(std::string_view text,
                                                 std::string_view source = "responses") {
  std::vector<Response> out;
  bool first = true;
  for (const Row& row : parse_csv(text, source)) {
    if (first) {
      first = false;
      if (!row.fields.empty() && row.fields[0] == "evaluator_id") continue;
    }
    if (row.fields.size() != 5)
      throw ParseError(source, row.line_no,
                       "expected 5 columns (evaluator_id,item_id,kind,payload,is_catch_trial)");
    Response r;
    r.evaluator_id = row.fields[0];
    r.item_id = row.fields[1];
    const std::string& kind = row.fields[2];
    if (kind == "transcription")
      r.kind = ResponseKind::transcription;
    else if (kind == "mos")
      r.kind = ResponseKind::mos;
    else if (kind == "similarity")
      r.kind = ResponseKind::similarity;
    else
      throw ParseError(source, row.line_no, "unknown response kind: '" + kind + "'");
    if (r.kind == ResponseKind::transcription) {
      r.text = row.fields[3];
    } else {
      long long v = parse_int_token(row.fields[3], source, row.line_no);
      if (v < 1 || v > 5) throw ParseError(source, row.line_no, "rating must be in 1..5");
      r.rating = static_cast<int>(v);
    }
    const std::string& flag = row.fields[4];
    if (flag == "1" || flag == "true")
      r.is_catch_trial = true;
    else if (flag == "0" || flag == "false")
      r.is_catch_trial = false;
    else
      throw ParseError(source, row.line_no, "is_catch_trial must be 0/1/true/false");
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline bool is_ascii_space(std::uint32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_ascii_punct(std::uint32_t c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
         (c >= '{' && c <= '~');
}

/// UTF-8 decoder; malformed bytes become U+FFFD.
inline std::vector<std::uint32_t> decode_utf8(std::string_view s) {
  std::vector<std::uint32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < s.size()) {
      cp = (c & 0x1F) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < s.size()) {
      cp = (c & 0x0F) << 12 | (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < s.size()) {
      cp = (c & 0x07) << 18 | (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12 |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace detail

/// Lowercases (ASCII), strips ASCII punctuation, and collapses whitespace
/// runs into single spaces. Returns code points ready for edit distance.
inline std::vector<std::uint32_t> normalize_text(std::string_view utf8) {
  std::vector<std::uint32_t> cps = detail::decode_utf8(utf8);
  std::vector<std::uint32_t> out;
  bool pending_space = false;
  for (std::uint32_t c : cps) {
    if (detail::is_ascii_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (detail::is_ascii_punct(c)) continue;
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

/// Character error rate: Levenshtein distance over normalized code points,
/// divided by the reference length.
inline double cer(std::string_view hypothesis, std::string_view reference) {
  std::vector<std::uint32_t> h = normalize_text(hypothesis);
  std::vector<std::uint32_t> r = normalize_text(reference);
  if (r.empty()) throw Error("cer: reference empty after normalization");
  return static_cast<double>(edit_distance(h, r)) / static_cast<double>(r.size());
}

/// Evaluators kept iff their mean catch-trial CER is strictly below
/// `threshold`. Evaluators without any catch trial are excluded and counted.
inline std::set<std::string> filter_participants(std::span<const Response> responses,
                                                 const std::map<std::string, std::string>& references,
                                                 double threshold = 0.80,
                                                 WarningCounters* warnings = nullptr) {
  std::map<std::string, std::pair<double, std::uint64_t>> catch_cer;  // evaluator -> (sum, n)
  std::set<std::string> evaluators;
  for (const Response& r : responses) {
    evaluators.insert(r.evaluator_id);
    if (!r.is_catch_trial || r.kind != ResponseKind::transcription) continue;
    auto ref = references.find(r.item_id);
    if (ref == references.end()) throw Error("missing reference transcription for catch item " + r.item_id);
    auto& acc = catch_cer[r.evaluator_id];
    acc.first += cer(r.text, ref->second);
    acc.second += 1;
  }
  std::set<std::string> retained;
  for (const std::string& e : evaluators) {
    auto it = catch_cer.find(e);
    if (it == catch_cer.end()) {
      if (warnings) warnings->evaluators_without_catch_trials.fetch_add(1, std::memory_order_relaxed);
      continue;
    }
    double mean = it->second.first / static_cast<double>(it->second.second);
    if (mean < threshold) retained.insert(e);
  }
  return retained;
}

struct OpinionScore {
  double mean = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::uint64_t n = 0;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNotApplicable;
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1 - w) + sorted[hi] * w;
}

}  // namespace detail

/// Mean rating with a seeded percentile-bootstrap 95% interval.
inline OpinionScore bootstrap_mean(std::span<const int> ratings, std::uint64_t seed,
                                   std::size_t resamples = 10000) {
  if (ratings.empty()) throw Error("no retained responses to aggregate");
  OpinionScore score;
  score.n = ratings.size();
  double sum = 0;
  for (int v : ratings) sum += v;
  score.mean = sum / static_cast<double>(ratings.size());
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    double s = 0;
    for (std::size_t i = 0; i < ratings.size(); ++i)
      s += ratings[rng.below(ratings.size())];
    means[b] = s / static_cast<double>(ratings.size());
  }
  std::sort(means.begin(), means.end());
  score.ci_lo = detail::quantile_sorted(means, 0.025);
  score.ci_hi = detail::quantile_sorted(means, 0.975);
  return score;
}

/// Per-system mean opinion scores over retained evaluators, for one rating
/// kind (mos or similarity). `systems` maps item_id -> system id.
inline std::map<std::string, OpinionScore> aggregate_opinion(std::span<const Response> responses,
                                                             const std::set<std::string>& retained,
                                                             const std::map<std::string, std::string>& systems,
                                                             ResponseKind kind, std::uint64_t seed = 0,
                                                             std::size_t resamples = 10000) {
  std::map<std::string, std::vector<int>> ratings;
  for (const Response& r : responses) {
    if (r.kind != kind || r.is_catch_trial) continue;
    if (!retained.count(r.evaluator_id)) continue;
    auto sys = systems.find(r.item_id);
    if (sys == systems.end()) throw Error("item not mapped to a system: " + r.item_id);
    ratings[sys->second].push_back(r.rating);
  }
  std::map<std::string, OpinionScore> out;
  for (const auto& [system, values] : ratings)
    out[system] = bootstrap_mean(values, hash_mix(fnv1a(system), fnv1a(to_string(kind), seed ^ 0x9e3779b97f4a7c15ull)),
                                 resamples);
  return out;
}

/// Per-system mean CER of retained non-catch transcription responses.
inline std::map<std::string, OpinionScore> aggregate_cer(std::span<const Response> responses,
                                                         const std::set<std::string>& retained,
                                                         const std::map<std::string, std::string>& systems,
                                                         const std::map<std::string, std::string>& references) {
  std::map<std::string, std::pair<double, std::uint64_t>> acc;
  for (const Response& r : responses) {
    if (r.kind != ResponseKind::transcription || r.is_catch_trial) continue;
    if (!retained.count(r.evaluator_id)) continue;
    auto sys = systems.find(r.item_id);
    if (sys == systems.end()) throw Error("item not mapped to a system: " + r.item_id);
    auto ref = references.find(r.item_id);
    if (ref == references.end()) throw Error("missing reference transcription for item " + r.item_id);
    auto& a = acc[sys->second];
    a.first += cer(r.text, ref->second);
    a.second += 1;
  }
  std::map<std::string, OpinionScore> out;
  for (const auto& [system, a] : acc) {
    OpinionScore s;
    s.mean = a.first / static_cast<double>(a.second);
    s.ci_lo = s.ci_hi = kNotApplicable;
    s.n = a.second;
    out[system] = s;
  }
  return out;
}

}  // namespace zrs

#endif  // ZRS_SUBJECTIVE_HPP

