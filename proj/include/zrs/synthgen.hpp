// zrs/synthgen.hpp

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

#ifndef ZRS_SYNTHGEN_HPP
#define ZRS_SYNTHGEN_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "zrs/abx.hpp"
#include "zrs/alignment.hpp"
#include "zrs/features.hpp"
#include "zrs/tde.hpp"

namespace zrs {

/// Knobs for the synthetic gold corpus generator. Generation is single
/// threaded and fully determined by the seed: all randomness flows through
/// one mt19937_64 stream in a fixed consumption order.
struct GenSpec {
  std::uint64_t seed = 1;
  std::size_t n_files = 10;
  std::size_t phone_inventory = 5;
  std::size_t lexicon_size = 8;
  std::size_t words_per_file = 6;
  std::size_t speakers = 2;
  double phone_dur_min = 0.05;  // seconds; quantized to the millisecond grid
  double phone_dur_max = 0.15;
  std::size_t word_len_min = 3;
  std::size_t word_len_max = 6;
  double silence_prob = 0.0;  // chance of a silence stretch before a word / at file end
};

struct GeneratedCorpus {
  ForcedAlignment alignment;
  std::vector<Item> items;
  std::map<std::string, double> item_durations;
  // Exact file contents in the formats the evaluators consume.
  std::string phones_tsv;
  std::string words_tsv;
  std::string items_tsv;
  std::string durations_tsv;
};

struct Submission {
  std::vector<FrameSequence> features;  // one per item, item order
  Clustering classes;
};

namespace detail {

inline std::string phone_label(std::size_t i, std::size_t inventory) {
  if (inventory <= 26) return std::string(1, static_cast<char>('a' + i));
  return "p" + std::to_string(i);
}

inline std::string zero_pad(std::size_t v, std::size_t width) {
  std::string s = std::to_string(v);
  return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

}  // namespace detail

inline void validate_spec(const GenSpec& spec) {
  if (spec.n_files == 0 || spec.lexicon_size == 0 || spec.words_per_file == 0 || spec.speakers == 0)
    throw Error("gen_corpus: all counts must be >= 1");
  if (spec.phone_inventory < 2)
    throw Error("gen_corpus: infeasible spec: need >= 2 phones to form minimal pairs");
  if (!(spec.phone_dur_min > 0) || spec.phone_dur_max < spec.phone_dur_min)
    throw Error("gen_corpus: phone duration range must satisfy 0 < min <= max");
  if (spec.word_len_min == 0 || spec.word_len_max < spec.word_len_min)
    throw Error("gen_corpus: word length range must satisfy 1 <= min <= max");
  if (spec.silence_prob < 0 || spec.silence_prob > 1)
    throw Error("gen_corpus: silence_prob must be in [0,1]");
  if (spec.speakers >= 2 && spec.n_files < 2)
    throw Error("gen_corpus: infeasible spec: >= 2 speakers need >= 2 files");
  if (spec.n_files * spec.words_per_file < 2 * spec.lexicon_size)
    throw Error("gen_corpus: infeasible spec: every lexicon type must fit twice (need n_files * words_per_file >= 2 * lexicon_size)");
}

/// Generates a silence-free-by-default corpus in which every lexicon type
/// occurs at least twice, with the two guaranteed copies placed on different
/// speakers so that triphone contexts are shared across speakers.
inline GeneratedCorpus gen_corpus(const GenSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);

  std::vector<std::string> phones(spec.phone_inventory);
  for (std::size_t i = 0; i < phones.size(); ++i) phones[i] = detail::phone_label(i, spec.phone_inventory);

  // Distinct phone sequences.
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::size_t>> lexicon;
  std::size_t attempts = 0;
  while (lexicon.size() < spec.lexicon_size) {
    if (++attempts > 1000 * spec.lexicon_size + 1000)
      throw Error("gen_corpus: infeasible spec: cannot draw enough distinct words");
    std::size_t len = spec.word_len_min + static_cast<std::size_t>(rng.below(spec.word_len_max - spec.word_len_min + 1));
    std::vector<std::size_t> w(len);
    for (auto& p : w) p = static_cast<std::size_t>(rng.below(spec.phone_inventory));
    if (seen.insert(w).second) lexicon.push_back(std::move(w));
  }

  const std::size_t n_files = spec.n_files;
  std::vector<std::string> file_ids(n_files), file_speakers(n_files);
  std::size_t pad = std::to_string(n_files - 1).size();
  for (std::size_t f = 0; f < n_files; ++f) {
    file_ids[f] = "f" + detail::zero_pad(f, std::max<std::size_t>(pad, 3));
    file_speakers[f] = "s" + std::to_string(f % spec.speakers);
  }

  // Token placement: two copies of each type on different speakers, then
  // random fill. Always taking the emptiest eligible file keeps the greedy
  // feasible whenever capacity allows a valid pairing at all.
  std::vector<std::vector<std::size_t>> file_tokens(n_files);
  auto capacity = [&](std::size_t f) { return spec.words_per_file - file_tokens[f].size(); };
  auto emptiest = [&](const std::string& avoid_speaker) -> std::size_t {
    std::size_t best = n_files;
    for (std::size_t f = 0; f < n_files; ++f) {
      if (capacity(f) == 0) continue;
      if (!avoid_speaker.empty() && file_speakers[f] == avoid_speaker) continue;
      if (best == n_files || capacity(f) > capacity(best)) best = f;
    }
    if (best == n_files)
      throw Error("gen_corpus: infeasible spec: cannot place both copies of every type on distinct speakers");
    return best;
  };
  for (std::size_t t = 0; t < lexicon.size(); ++t) {
    std::size_t f1 = emptiest("");
    file_tokens[f1].push_back(t);
    std::size_t f2 = emptiest(spec.speakers >= 2 ? file_speakers[f1] : "");
    file_tokens[f2].push_back(t);
  }
  for (std::size_t f = 0; f < n_files; ++f)
    while (capacity(f) > 0) file_tokens[f].push_back(static_cast<std::size_t>(rng.below(lexicon.size())));
  for (std::size_t f = 0; f < n_files; ++f) rng.shuffle(file_tokens[f]);

  const std::int64_t dur_min_ms = static_cast<std::int64_t>(spec.phone_dur_min * 1000.0 + 0.5);
  const std::int64_t dur_max_ms = static_cast<std::int64_t>(spec.phone_dur_max * 1000.0 + 0.5);
  if (dur_min_ms < 1) throw Error("gen_corpus: phone durations below the millisecond grid");
  auto draw_dur_ms = [&]() {
    return dur_min_ms + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(dur_max_ms - dur_min_ms + 1)));
  };

  GeneratedCorpus out;
  std::string& phones_tsv = out.phones_tsv;
  std::string& words_tsv = out.words_tsv;
  phones_tsv = "# file_id\tonset\toffset\tlabel\tspeaker\n";
  words_tsv = "# file_id\tonset\toffset\tlabel\n";

  struct FilePhones {
    std::vector<std::size_t> labels;  // index into phones, SIZE_MAX = silence
  };
  std::vector<FilePhones> file_phones(n_files);

  for (std::size_t f = 0; f < n_files; ++f) {
    std::int64_t cursor = 0;
    auto emit_phone = [&](const std::string& label, std::int64_t dur_ms) {
      phones_tsv += file_ids[f] + "\t" + format_seconds(cursor / 1000.0) + "\t" +
                    format_seconds((cursor + dur_ms) / 1000.0) + "\t" + label + "\t" + file_speakers[f] + "\n";
      cursor += dur_ms;
    };
    for (std::size_t token : file_tokens[f]) {
      if (spec.silence_prob > 0 && rng.unit() < spec.silence_prob) {
        file_phones[f].labels.push_back(SIZE_MAX);
        emit_phone("SIL", draw_dur_ms());
      }
      std::int64_t word_start = cursor;
      for (std::size_t p : lexicon[token]) {
        file_phones[f].labels.push_back(p);
        emit_phone(phones[p], draw_dur_ms());
      }
      words_tsv += file_ids[f] + "\t" + format_seconds(word_start / 1000.0) + "\t" +
                   format_seconds(cursor / 1000.0) + "\tw" + std::to_string(token) + "\n";
    }
    if (spec.silence_prob > 0 && rng.unit() < spec.silence_prob) {
      file_phones[f].labels.push_back(SIZE_MAX);
      emit_phone("SIL", draw_dur_ms());
    }
  }

  out.alignment = parse_alignment(phones_tsv, words_tsv);

  out.items_tsv = "# item_id\tprev\tcenter\tnext\tspeaker\n";
  out.durations_tsv = "# item_id\tduration_seconds\n";
  for (std::size_t f = 0; f < n_files; ++f) {
    const FileAlignment& fa = out.alignment.file(file_ids[f]);
    for (std::size_t i = 1; i + 1 < fa.phones.size(); ++i) {
      bool speech = !out.alignment.is_silence(fa.phones[i - 1].label) &&
                    !out.alignment.is_silence(fa.phones[i].label) &&
                    !out.alignment.is_silence(fa.phones[i + 1].label);
      if (!speech) continue;
      Item item;
      item.item_id = file_ids[f] + "_" + detail::zero_pad(i, 4);
      item.prev = fa.phones[i - 1].label;
      item.center = fa.phones[i].label;
      item.next = fa.phones[i + 1].label;
      item.speaker = file_speakers[f];
      out.items_tsv += item.item_id + "\t" + item.prev + "\t" + item.center + "\t" + item.next + "\t" +
                       item.speaker + "\n";
      double duration = fa.phones[i + 1].offset - fa.phones[i - 1].onset;
      out.durations_tsv += item.item_id + "\t" + format_seconds(duration) + "\n";
      out.item_durations[item.item_id] = parse_double_token(format_seconds(duration), "durations", 0);
      out.items.push_back(std::move(item));
    }
  }
  return out;
}

namespace detail {

inline std::map<std::string, std::size_t> label_index(const ForcedAlignment& align) {
  std::set<std::string> labels;
  for (const auto& fa : align.files)
    for (const auto& p : fa.phones) labels.insert(p.label);
  std::map<std::string, std::size_t> out;
  std::size_t i = 0;
  for (const auto& l : labels) out[l] = i++;
  return out;
}

inline std::vector<double> one_hot(std::size_t index, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  v[index] = 1.0;
  return v;
}

}  // namespace detail

/// The reference submission: every item encoded as the one-hot sequence of
/// its three phones, and a class file listing every gold token grouped by
/// word type.
inline Submission gen_gold_submission(const GeneratedCorpus& corpus) {
  Submission out;
  auto labels = detail::label_index(corpus.alignment);
  const std::size_t dim = labels.size();
  for (const Item& item : corpus.items) {
    FrameSequence seq;
    seq.item_id = item.item_id;
    seq.dim = dim;
    for (const std::string& phone : {item.prev, item.center, item.next}) {
      auto v = detail::one_hot(labels.at(phone), dim);
      seq.data.insert(seq.data.end(), v.begin(), v.end());
    }
    out.features.push_back(std::move(seq));
  }
  std::map<std::string, std::vector<Fragment>> by_type;
  for (const auto& fa : corpus.alignment.files)
    for (const auto& w : fa.words)
      by_type[w.label].push_back(Fragment{fa.file_id, w.onset, w.offset});
  for (auto& [label, fragments] : by_type)
    out.classes.clusters.push_back(Clustering::Cluster{label, std::move(fragments)});
  return out;
}

/// Degrades the gold submission. With probability flip_rate, a frame's
/// symbol is replaced by a random different phone and a fragment is moved to
/// a random other cluster; fragment edges are jittered uniformly in
/// [-boundary_jitter, boundary_jitter] seconds (snapped back to the
/// millisecond grid and clamped to the file extent).
inline Submission gen_noisy_submission(const GeneratedCorpus& corpus, double flip_rate,
                                       double boundary_jitter, std::uint64_t seed) {
  if (flip_rate < 0 || flip_rate > 1) throw Error("flip_rate must be in [0,1]");
  if (boundary_jitter < 0) throw Error("boundary_jitter must be >= 0");
  Submission out = gen_gold_submission(corpus);
  Rng rng(hash_mix(seed, 0x5eed5eed5eed5eedull));
  auto labels = detail::label_index(corpus.alignment);
  const std::size_t dim = labels.size();

  for (FrameSequence& seq : out.features) {
    for (std::size_t fidx = 0; fidx < seq.frames(); ++fidx) {
      if (flip_rate > 0 && rng.unit() < flip_rate) {
        std::size_t current = 0;
        for (std::size_t k = 0; k < dim; ++k)
          if (seq.data[fidx * dim + k] == 1.0) current = k;
        std::size_t replacement = static_cast<std::size_t>(rng.below(dim - 1));
        if (replacement >= current) ++replacement;
        for (std::size_t k = 0; k < dim; ++k) seq.data[fidx * dim + k] = k == replacement ? 1.0 : 0.0;
      }
    }
  }

  if (boundary_jitter > 0) {
    for (auto& cluster : out.classes.clusters) {
      for (Fragment& f : cluster.fragments) {
        const FileAlignment& fa = corpus.alignment.file(f.file_id);
        auto to_ms = [](double s) { return static_cast<std::int64_t>(s * 1000.0 + (s >= 0 ? 0.5 : -0.5)); };
        std::int64_t start_ms = to_ms(fa.start()), end_ms = to_ms(fa.end());
        std::int64_t on = to_ms(f.onset + rng.uniform(-boundary_jitter, boundary_jitter));
        std::int64_t off = to_ms(f.offset + rng.uniform(-boundary_jitter, boundary_jitter));
        on = std::clamp(on, start_ms, end_ms - 1);
        off = std::clamp(off, on + 1, end_ms);
        f.onset = static_cast<double>(on) / 1000.0;
        f.offset = static_cast<double>(off) / 1000.0;
      }
    }
  }

  if (flip_rate > 0 && out.classes.clusters.size() > 1) {
    struct Move {
      std::size_t from, index, to;
    };
    std::vector<Move> moves;
    const std::size_t n_clusters = out.classes.clusters.size();
    for (std::size_t ci = 0; ci < n_clusters; ++ci) {
      for (std::size_t fi = 0; fi < out.classes.clusters[ci].fragments.size(); ++fi) {
        if (rng.unit() >= flip_rate) continue;
        std::size_t to = static_cast<std::size_t>(rng.below(n_clusters - 1));
        if (to >= ci) ++to;
        moves.push_back({ci, fi, to});
      }
    }
    // Apply in reverse index order so earlier indices stay valid.
    for (auto it = moves.rbegin(); it != moves.rend(); ++it) {
      auto& from = out.classes.clusters[it->from].fragments;
      out.classes.clusters[it->to].fragments.push_back(from[it->index]);
      from.erase(from.begin() + static_cast<std::ptrdiff_t>(it->index));
    }
    std::erase_if(out.classes.clusters,
                  [](const Clustering::Cluster& c) { return c.fragments.empty(); });
  }
  return out;
}

inline void write_corpus_dir(const std::filesystem::path& dir, const GeneratedCorpus& corpus) {
  write_file(dir / "alignment_phones.tsv", corpus.phones_tsv);
  write_file(dir / "alignment_words.tsv", corpus.words_tsv);
  write_file(dir / "items.tsv", corpus.items_tsv);
  write_file(dir / "durations.tsv", corpus.durations_tsv);
}

inline void write_submission_dir(const std::filesystem::path& dir, const Submission& submission) {
  for (const FrameSequence& seq : submission.features)
    write_file(dir / "features" / (seq.item_id + ".txt"), write_feature_file(seq));
  if (!submission.classes.clusters.empty())
    write_file(dir / "classes.txt", write_class_file(submission.classes));
}

}  // namespace zrs

#endif  // ZRS_SYNTHGEN_HPP
