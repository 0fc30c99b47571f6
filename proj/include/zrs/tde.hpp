// zrs/tde.hpp

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

#ifndef ZRS_TDE_HPP
#define ZRS_TDE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zrs/alignment.hpp"
#include "zrs/distance.hpp"
#include "zrs/parallel.hpp"

namespace zrs {

/// Precision/recall/F-score triple; NaN marks a value whose denominator is
/// empty (reported as "n/a").
struct PRF {
  double precision = 0;
  double recall = 0;
  double fscore = 0;

  static PRF from_counts(double hits, double n_discovered, double n_gold) {
    PRF out;
    out.precision = n_discovered > 0 ? hits / n_discovered : kNotApplicable;
    out.recall = n_gold > 0 ? hits / n_gold : kNotApplicable;
    out.fscore = harmonic(out.precision, out.recall);
    return out;
  }
  static double harmonic(double p, double r) {
    if (std::isnan(p) || std::isnan(r)) return kNotApplicable;
    if (p + r == 0) return 0;
    return 2 * p * r / (p + r);
  }
};

struct Clustering {
  struct Cluster {
    std::string id;
    std::vector<Fragment> fragments;
  };
  std::vector<Cluster> clusters;

  std::size_t total_fragments() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.fragments.size();
    return n;
  }
};

/// Class file grammar: `Class` SP id NL (file SP onset SP offset NL)+ NL.
/// The trailing blank line may be omitted at end of input.
inline Clustering parse_class_file(std::string_view text, std::string_view source = "classes") {
  Clustering out;
  Clustering::Cluster* current = nullptr;
  bool after_blank = true;  // file start behaves like a fresh block
  std::size_t last_line = 0;
  for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
    last_line = line_no;
    std::string_view line = trim(raw);
    if (line.empty()) {
      if (current != nullptr && current->fragments.empty())
        throw ParseError(source, line_no, "class block with no fragments");
      current = nullptr;
      after_blank = true;
      return;
    }
    if (line.front() == '#') return;
    std::vector<std::string> fields = split_ws(line);
    if (!fields.empty() && fields[0] == "Class") {
      if (fields.size() != 2)
        throw ParseError(source, line_no, "class header must be 'Class <id>'");
      if (!after_blank)
        throw ParseError(source, line_no, "missing blank line before new class block");
      out.clusters.push_back(Clustering::Cluster{fields[1], {}});
      current = &out.clusters.back();
      after_blank = false;
      return;
    }
    if (current == nullptr)
      throw ParseError(source, line_no, "expected 'Class <id>' header");
    if (fields.size() != 3)
      throw ParseError(source, line_no, "expected 'file onset offset', got " + std::to_string(fields.size()) +
                                            " fields");
    Fragment f;
    f.file_id = fields[0];
    f.onset = parse_double_token(fields[1], source, line_no);
    f.offset = parse_double_token(fields[2], source, line_no);
    if (!(f.offset > f.onset))
      throw ParseError(source, line_no, "fragment offset must exceed onset");
    current->fragments.push_back(std::move(f));
    after_blank = false;
  });
  if (current != nullptr && current->fragments.empty())
    throw ParseError(source, last_line, "class block with no fragments");
  return out;
}

inline std::string write_class_file(const Clustering& clustering) {
  std::string out;
  for (const auto& c : clustering.clusters) {
    out += "Class ";
    out += c.id;
    out += '\n';
    for (const Fragment& f : c.fragments) {
      out += f.file_id;
      out += ' ';
      out += format_seconds(f.onset);
      out += ' ';
      out += format_seconds(f.offset);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

namespace detail {

/// Per-fragment transcriptions, cluster structure preserved.
inline std::vector<std::vector<Transcription>> transcribe_clusters(const Clustering& c,
                                                                   const ForcedAlignment& align,
                                                                   WarningCounters* warnings = nullptr) {
  std::vector<std::vector<Transcription>> out(c.clusters.size());
  for (std::size_t i = 0; i < c.clusters.size(); ++i) {
    out[i].reserve(c.clusters[i].fragments.size());
    for (const Fragment& f : c.clusters[i].fragments) out[i].push_back(transcribe_fragment(align, f, warnings));
  }
  return out;
}

inline std::uint64_t pairs_of(std::uint64_t n) { return n * (n - 1) / 2; }

}  // namespace detail

/// Average normalized edit distance over all unordered within-cluster pairs.
/// A pair of empty transcriptions contributes 0, a single empty one
/// contributes 1.
inline double ned(const Clustering& c, const ForcedAlignment& align, std::size_t threads = 0,
                  WarningCounters* warnings = nullptr) {
  auto transcripts = detail::transcribe_clusters(c, align, warnings);
  struct Partial {
    double sum = 0;
    std::uint64_t count = 0;
  };
  std::vector<Partial> partials(transcripts.size());
  parallel_for(transcripts.size(), threads, [&](std::size_t ci) {
    const auto& ts = transcripts[ci];
    Partial p;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        const auto& a = ts[i].phones;
        const auto& b = ts[j].phones;
        double v;
        if (a.empty() && b.empty())
          v = 0;
        else if (a.empty() || b.empty())
          v = 1;
        else
          v = static_cast<double>(edit_distance(a, b)) / static_cast<double>(std::max(a.size(), b.size()));
        p.sum += v;
        ++p.count;
      }
    }
    partials[ci] = p;
  });
  double sum = 0;
  std::uint64_t count = 0;
  for (const Partial& p : partials) {
    sum += p.sum;
    count += p.count;
  }
  if (count == 0) throw NoMatchesError("no matches: clustering has no within-cluster pair");
  return sum / static_cast<double>(count);
}

/// Fraction of non-silence gold phones overlapped (per the edge-phone rule)
/// by fragments belonging to clusters of size >= 2.
inline double coverage(const Clustering& c, const ForcedAlignment& align, WarningCounters* warnings = nullptr) {
  std::map<std::string, std::vector<char>> covered;
  for (const auto& fa : align.files) covered[fa.file_id].assign(fa.phones.size(), 0);
  for (const auto& cluster : c.clusters) {
    if (cluster.fragments.size() < 2) continue;
    for (const Fragment& f : cluster.fragments) {
      Transcription t = transcribe_fragment(align, f, warnings);
      auto& mask = covered.at(f.file_id);
      for (std::size_t i = t.span_begin; i < t.span_end; ++i) mask[i] = 1;
    }
  }
  std::uint64_t total = 0, hit = 0;
  for (const auto& fa : align.files) {
    const auto& mask = covered.at(fa.file_id);
    for (std::size_t i = 0; i < fa.phones.size(); ++i) {
      if (align.is_silence(fa.phones[i].label)) continue;
      ++total;
      if (mask[i]) ++hit;
    }
  }
  if (total == 0) throw Error("alignment has no non-silence phones");
  return static_cast<double>(hit) / static_cast<double>(total);
}

/// Pairwise cluster purity (precision) and inverse fragmentation (recall):
/// within-cluster pairs against all pairs of clustered fragments that share a
/// transcription.
inline PRF grouping_scores(const Clustering& c, const ForcedAlignment& align,
                           WarningCounters* warnings = nullptr) {
  auto transcripts = detail::transcribe_clusters(c, align, warnings);
  std::uint64_t clus_pairs = 0, matching_within = 0;
  std::map<std::vector<std::string>, std::uint64_t> global_counts;
  for (const auto& ts : transcripts) {
    clus_pairs += detail::pairs_of(ts.size());
    std::map<std::vector<std::string>, std::uint64_t> local_counts;
    for (const auto& t : ts) {
      ++local_counts[t.phones];
      ++global_counts[t.phones];
    }
    for (const auto& [_, n] : local_counts) matching_within += detail::pairs_of(n);
  }
  std::uint64_t type_pairs = 0;
  for (const auto& [_, n] : global_counts) type_pairs += detail::pairs_of(n);
  if (clus_pairs == 0) throw NoMatchesError("no matches: clustering has no within-cluster pair");
  return PRF::from_counts(static_cast<double>(matching_within), static_cast<double>(clus_pairs),
                          static_cast<double>(type_pairs));
}

/// Discovered lexicon (distinct 3-20 phone transcriptions of clustered
/// fragments) against the gold lexicon.
inline PRF type_scores(const Clustering& c, const ForcedAlignment& align, std::size_t min_len = 3,
                       std::size_t max_len = 20, WarningCounters* warnings = nullptr) {
  auto gold = gold_lexicon(align, min_len, max_len);
  std::set<std::vector<std::string>> discovered;
  for (const auto& cluster : c.clusters) {
    for (const Fragment& f : cluster.fragments) {
      Transcription t = transcribe_fragment(align, f, warnings);
      if (t.size() >= min_len && t.size() <= max_len) discovered.insert(std::move(t.phones));
    }
  }
  std::uint64_t hits = 0;
  for (const auto& t : discovered)
    if (gold.count(t)) ++hits;
  return PRF::from_counts(static_cast<double>(hits), static_cast<double>(discovered.size()),
                          static_cast<double>(gold.size()));
}

namespace detail {

inline std::size_t speech_phones_in_span(const ForcedAlignment& align, const FileAlignment& fa,
                                         std::size_t begin, std::size_t end) {
  std::size_t n = 0;
  for (std::size_t i = begin; i < end; ++i)
    if (!align.is_silence(fa.phones[i].label)) ++n;
  return n;
}

}  // namespace detail

/// Exact span match between discovered fragments and gold word tokens, both
/// sides restricted to 3-20 (non-silence) phones.
inline PRF token_scores(const Clustering& c, const ForcedAlignment& align, std::size_t min_len = 3,
                        std::size_t max_len = 20, WarningCounters* warnings = nullptr) {
  if (!align.has_words()) throw NoGoldWordsError("no gold words");
  using SpanKey = std::pair<std::string, std::pair<std::size_t, std::size_t>>;
  std::set<SpanKey> discovered;
  for (const auto& cluster : c.clusters) {
    for (const Fragment& f : cluster.fragments) {
      Transcription t = transcribe_fragment(align, f, warnings);
      if (t.span_end <= t.span_begin) continue;
      std::size_t len = detail::speech_phones_in_span(align, align.file(f.file_id), t.span_begin, t.span_end);
      if (len >= min_len && len <= max_len) discovered.insert({f.file_id, {t.span_begin, t.span_end}});
    }
  }
  std::set<SpanKey> gold;
  for (const auto& fa : align.files) {
    for (const auto& w : fa.words) {
      std::size_t len = detail::speech_phones_in_span(align, fa, w.phone_begin, w.phone_end);
      if (len >= min_len && len <= max_len) gold.insert({fa.file_id, {w.phone_begin, w.phone_end}});
    }
  }
  std::uint64_t hits = 0;
  for (const auto& s : discovered)
    if (gold.count(s)) ++hits;
  return PRF::from_counts(static_cast<double>(hits), static_cast<double>(discovered.size()),
                          static_cast<double>(gold.size()));
}

/// Fragment edges snapped to the boundaries of the span's first and last
/// speech phones, compared against gold word boundaries. A fragment whose
/// span holds no speech phone contributes nothing.
inline PRF boundary_scores(const Clustering& c, const ForcedAlignment& align,
                           WarningCounters* warnings = nullptr) {
  if (!align.has_words()) throw NoGoldWordsError("no gold words");
  std::map<std::string, std::set<double>> discovered;
  for (const auto& cluster : c.clusters) {
    for (const Fragment& f : cluster.fragments) {
      Transcription t = transcribe_fragment(align, f, warnings);
      const FileAlignment& fa = align.file(f.file_id);
      std::size_t lo = t.span_begin, hi = t.span_end;
      while (lo < hi && align.is_silence(fa.phones[lo].label)) ++lo;
      while (hi > lo && align.is_silence(fa.phones[hi - 1].label)) --hi;
      if (lo >= hi) continue;
      discovered[f.file_id].insert(fa.phones[lo].onset);
      discovered[f.file_id].insert(fa.phones[hi - 1].offset);
    }
  }
  auto gold = gold_boundaries(align);
  std::uint64_t n_disc = 0, n_gold = 0, hits = 0;
  for (const auto& [_, times] : gold) n_gold += times.size();
  for (const auto& [file_id, times] : discovered) {
    n_disc += times.size();
    auto g = gold.find(file_id);
    if (g == gold.end()) continue;
    for (double t : times)
      if (g->second.count(t)) ++hits;
  }
  return PRF::from_counts(static_cast<double>(hits), static_cast<double>(n_disc),
                          static_cast<double>(n_gold));
}

}  // namespace zrs

#endif  // ZRS_TDE_HPP
