// zrs/alignment.hpp

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

#ifndef ZRS_ALIGNMENT_HPP
#define ZRS_ALIGNMENT_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zrs/textio.hpp"

namespace zrs {

// Word edges must land on a phone edge within this tolerance (absorbs decimal
// rounding in aligner output).
inline constexpr double kEdgeMatchTolerance = 1e-4;

// Guard against floating-point dust when applying the strict '>' comparisons
// of the edge-phone rule; far below the time resolution of any aligner.
inline constexpr double kOverlapEpsilon = 1e-9;

inline const std::set<std::string>& default_silence_labels() {
  static const std::set<std::string> labels{"SIL", "SPN", "NSN"};
  return labels;
}

struct PhoneInterval {
  double onset = 0;
  double offset = 0;
  std::string label;
};

struct WordInterval {
  double onset = 0;
  double offset = 0;
  std::string label;
  std::size_t phone_begin = 0;  // half-open span into the file's phone list
  std::size_t phone_end = 0;
};

struct FileAlignment {
  std::string file_id;
  std::string speaker;
  std::vector<PhoneInterval> phones;  // sorted by onset, non-overlapping
  std::vector<WordInterval> words;    // sorted by onset

  double start() const { return phones.empty() ? 0.0 : phones.front().onset; }
  double end() const { return phones.empty() ? 0.0 : phones.back().offset; }
};

struct Fragment {
  std::string file_id;
  double onset = 0;
  double offset = 0;
};

struct ForcedAlignment {
  std::vector<FileAlignment> files;  // sorted by file_id
  std::set<std::string> silence_labels = default_silence_labels();

  const FileAlignment& file(const std::string& file_id) const {
    auto it = index_.find(file_id);
    if (it == index_.end()) throw Error("unknown file_id: " + file_id);
    return files[it->second];
  }
  bool has_file(const std::string& file_id) const { return index_.count(file_id) != 0; }
  bool is_silence(const std::string& label) const { return silence_labels.count(label) != 0; }
  bool has_words() const {
    for (const auto& f : files)
      if (!f.words.empty()) return true;
    return false;
  }
  void rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < files.size(); ++i) index_[files[i].file_id] = i;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses phone and word tables (whitespace-separated columns, '#' comments).
/// Phone rows: file_id onset offset label speaker. Word rows: file_id onset
/// offset label. Word phone spans are resolved by matching edges to phone
/// edges within kEdgeMatchTolerance.
inline ForcedAlignment parse_alignment(std::string_view phone_table, std::string_view word_table,
                                       std::set<std::string> silence_labels = default_silence_labels(),
                                       std::string_view phone_source = "phones",
                                       std::string_view word_source = "words") {
  struct RawWord {
    double onset, offset;
    std::string label;
    std::size_t line_no;
  };
  std::map<std::string, FileAlignment> by_file;
  std::map<std::string, std::vector<RawWord>> words_by_file;
  std::map<std::string, std::size_t> phone_line;  // first line per file, for error context

  for (const Row& row : parse_table(phone_table)) {
    if (row.fields.size() != 5)
      throw ParseError(phone_source, row.line_no,
                       "expected 5 columns (file_id onset offset label speaker), got " +
                           std::to_string(row.fields.size()));
    PhoneInterval p;
    p.onset = parse_double_token(row.fields[1], phone_source, row.line_no);
    p.offset = parse_double_token(row.fields[2], phone_source, row.line_no);
    p.label = row.fields[3];
    if (!(p.offset > p.onset))
      throw ParseError(phone_source, row.line_no, "phone offset must exceed onset");
    auto& fa = by_file[row.fields[0]];
    if (fa.file_id.empty()) {
      fa.file_id = row.fields[0];
      fa.speaker = row.fields[4];
      phone_line[fa.file_id] = row.line_no;
    } else if (fa.speaker != row.fields[4]) {
      throw ParseError(phone_source, row.line_no,
                       "file " + fa.file_id + " has conflicting speakers '" + fa.speaker + "' and '" +
                           row.fields[4] + "'");
    }
    fa.phones.push_back(std::move(p));
  }

  for (const Row& row : parse_table(word_table)) {
    if (row.fields.size() != 4)
      throw ParseError(word_source, row.line_no,
                       "expected 4 columns (file_id onset offset label), got " +
                           std::to_string(row.fields.size()));
    RawWord w;
    w.onset = parse_double_token(row.fields[1], word_source, row.line_no);
    w.offset = parse_double_token(row.fields[2], word_source, row.line_no);
    w.label = row.fields[3];
    w.line_no = row.line_no;
    if (!(w.offset > w.onset))
      throw ParseError(word_source, row.line_no, "word offset must exceed onset");
    if (!by_file.count(row.fields[0]))
      throw ParseError(word_source, row.line_no, "word references file with no phones: " + row.fields[0]);
    words_by_file[row.fields[0]].push_back(std::move(w));
  }

  ForcedAlignment out;
  out.silence_labels = std::move(silence_labels);
  for (auto& [file_id, fa] : by_file) {
    std::stable_sort(fa.phones.begin(), fa.phones.end(),
                     [](const PhoneInterval& a, const PhoneInterval& b) { return a.onset < b.onset; });
    for (std::size_t i = 1; i < fa.phones.size(); ++i) {
      if (fa.phones[i].onset < fa.phones[i - 1].offset - kOverlapEpsilon)
        throw ParseError(phone_source, phone_line[file_id],
                         "overlapping phones in file " + file_id + " around t=" +
                             format_seconds(fa.phones[i].onset));
    }
    auto words = words_by_file.find(file_id);
    if (words != words_by_file.end()) {
      std::stable_sort(words->second.begin(), words->second.end(),
                       [](const RawWord& a, const RawWord& b) { return a.onset < b.onset; });
      for (const RawWord& rw : words->second) {
        WordInterval w;
        w.onset = rw.onset;
        w.offset = rw.offset;
        w.label = rw.label;
        std::size_t i = 0;
        while (i < fa.phones.size() && fa.phones[i].onset < rw.onset - kEdgeMatchTolerance) ++i;
        if (i == fa.phones.size() || std::abs(fa.phones[i].onset - rw.onset) > kEdgeMatchTolerance)
          throw ParseError(word_source, rw.line_no,
                           "word onset " + format_seconds(rw.onset) + " not aligned to a phone edge");
        std::size_t j = i;
        while (j < fa.phones.size() && fa.phones[j].offset < rw.offset - kEdgeMatchTolerance) ++j;
        if (j == fa.phones.size() || std::abs(fa.phones[j].offset - rw.offset) > kEdgeMatchTolerance)
          throw ParseError(word_source, rw.line_no,
                           "word offset " + format_seconds(rw.offset) + " not aligned to a phone edge");
        w.phone_begin = i;
        w.phone_end = j + 1;
        fa.words.push_back(std::move(w));
      }
    }
    out.files.push_back(std::move(fa));
  }
  out.rebuild_index();
  return out;
}

struct Transcription {
  std::vector<std::string> phones;  // silence labels removed
  std::size_t span_begin = 0;       // half-open phone index span before silence removal
  std::size_t span_end = 0;

  bool empty() const { return phones.empty(); }
  std::size_t size() const { return phones.size(); }
};

/// Applies the edge-phone rule: interior phones always belong to the
/// fragment; a partially covered phone belongs iff the overlap exceeds 30 ms
/// or half the phone's duration (both strict).
inline bool edge_phone_included(double overlap, double phone_duration) {
  return overlap > 0.030 + kOverlapEpsilon || overlap > 0.5 * phone_duration + kOverlapEpsilon;
}

inline Transcription transcribe_fragment(const ForcedAlignment& align, const Fragment& frag,
                                         WarningCounters* warnings = nullptr) {
  const FileAlignment& fa = align.file(frag.file_id);
  if (!(frag.offset > frag.onset)) throw Error("fragment offset must exceed onset: " + frag.file_id);
  double on = frag.onset;
  double off = frag.offset;
  if (on < fa.start() || off > fa.end()) {
    on = std::max(on, fa.start());
    off = std::min(off, fa.end());
    if (warnings) warnings->clamped_fragments.fetch_add(1, std::memory_order_relaxed);
  }

  Transcription t;
  // First phone whose offset extends past the fragment onset.
  auto first = std::partition_point(fa.phones.begin(), fa.phones.end(),
                                    [&](const PhoneInterval& p) { return p.offset <= on; });
  std::size_t i = static_cast<std::size_t>(first - fa.phones.begin());
  t.span_begin = t.span_end = i;
  bool any = false;
  for (; i < fa.phones.size() && fa.phones[i].onset < off; ++i) {
    const PhoneInterval& p = fa.phones[i];
    double overlap = std::min(p.offset, off) - std::max(p.onset, on);
    if (overlap <= 0) continue;
    bool interior = p.onset >= on && p.offset <= off;
    bool included = interior || edge_phone_included(overlap, p.offset - p.onset);
    if (included) {
      if (!any) {
        t.span_begin = i;
        any = true;
      }
      t.span_end = i + 1;
      if (!align.is_silence(p.label)) t.phones.push_back(p.label);
    }
  }
  if (!any) {
    t.span_begin = t.span_end = static_cast<std::size_t>(first - fa.phones.begin());
  }
  return t;
}

/// Labels of a word's phone span with silences removed.
inline std::vector<std::string> word_transcription(const ForcedAlignment& align, const FileAlignment& fa,
                                                   const WordInterval& w) {
  std::vector<std::string> out;
  for (std::size_t i = w.phone_begin; i < w.phone_end; ++i)
    if (!align.is_silence(fa.phones[i].label)) out.push_back(fa.phones[i].label);
  return out;
}

/// Distinct word-type transcriptions whose length falls in [min_len, max_len].
inline std::set<std::vector<std::string>> gold_lexicon(const ForcedAlignment& align, std::size_t min_len = 3,
                                                       std::size_t max_len = 20) {
  if (!align.has_words()) throw NoGoldWordsError("no gold words");
  std::set<std::vector<std::string>> lexicon;
  for (const auto& fa : align.files) {
    for (const auto& w : fa.words) {
      std::vector<std::string> t = word_transcription(align, fa, w);
      if (t.size() >= min_len && t.size() <= max_len) lexicon.insert(std::move(t));
    }
  }
  return lexicon;
}

/// Word edges per file, canonicalized to the matched phone boundaries so they
/// compare exactly against boundaries snapped from fragments.
inline std::map<std::string, std::set<double>> gold_boundaries(const ForcedAlignment& align) {
  if (!align.has_words()) throw NoGoldWordsError("no gold words");
  std::map<std::string, std::set<double>> out;
  for (const auto& fa : align.files) {
    if (fa.words.empty()) continue;
    auto& set = out[fa.file_id];
    for (const auto& w : fa.words) {
      set.insert(fa.phones[w.phone_begin].onset);
      set.insert(fa.phones[w.phone_end - 1].offset);
    }
  }
  return out;
}

}  // namespace zrs

#endif  // ZRS_ALIGNMENT_HPP
