// zrs/evaluate.hpp

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

#ifndef ZRS_EVALUATE_HPP
#define ZRS_EVALUATE_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zrs/abx.hpp"
#include "zrs/alignment.hpp"
#include "zrs/distance.hpp"
#include "zrs/features.hpp"
#include "zrs/parallel.hpp"
#include "zrs/report.hpp"
#include "zrs/subjective.hpp"
#include "zrs/tde.hpp"
#include "zrs/version.hpp"

namespace zrs {

namespace fs = std::filesystem;

enum class Track { units, terms, human };

inline const char* to_string(Track t) {
  switch (t) {
    case Track::units: return "units";
    case Track::terms: return "terms";
    case Track::human: return "human";
  }
  return "?";
}

enum class DistanceMode { angle, kl, edit };

inline const char* to_string(DistanceMode m) {
  switch (m) {
    case DistanceMode::angle: return "angle";
    case DistanceMode::kl: return "kl";
    case DistanceMode::edit: return "edit";
  }
  return "?";
}

inline DistanceMode distance_mode_from_string(std::string_view s) {
  if (s == "angle") return DistanceMode::angle;
  if (s == "kl") return DistanceMode::kl;
  if (s == "edit") return DistanceMode::edit;
  throw Error("unknown distance mode: '" + std::string(s) + "' (expected angle, kl or edit)");
}

struct EvalOptions {
  DistanceMode distance = DistanceMode::angle;
  std::size_t threads = 0;  // 0 = all cores
  std::uint64_t seed = 0;
  std::size_t max_tokens_per_role = 10;
  std::set<std::string> silence_labels = default_silence_labels();
  bool time_column = false;
  std::string language = "unspecified";
  std::size_t bootstrap_resamples = 10000;
};

struct GoldData {
  ForcedAlignment alignment;
  std::vector<Item> items;
  std::map<std::string, double> durations;
  std::map<std::string, std::string> references;  // item -> gold transcription
  std::map<std::string, std::string> systems;     // item -> system id
};

namespace detail {

/// Two-column table split on the first tab: id TAB free text.
inline std::map<std::string, std::string> parse_id_text_table(std::string_view text,
                                                              std::string_view source) {
  std::map<std::string, std::string> out;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') return;
    std::size_t tab = t.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError(source, line_no, "expected 'id<TAB>text'");
    std::string id(trim(t.substr(0, tab)));
    std::string value(trim(t.substr(tab + 1)));
    if (id.empty()) throw ParseError(source, line_no, "empty id");
    if (!out.emplace(std::move(id), std::move(value)).second)
      throw ParseError(source, line_no, "duplicate id");
  });
  return out;
}

}  // namespace detail

inline GoldData load_gold(const fs::path& gold_dir, Track track, const EvalOptions& opt = {}) {
  GoldData g;
  if (track == Track::units) {
    g.items = parse_items(read_file(gold_dir / "items.tsv"), (gold_dir / "items.tsv").string());
    g.durations = parse_manifest(read_file(gold_dir / "durations.tsv"), (gold_dir / "durations.tsv").string());
  } else if (track == Track::terms) {
    fs::path words = gold_dir / "alignment_words.tsv";
    std::string word_text = fs::exists(words) ? read_file(words) : std::string();
    g.alignment = parse_alignment(read_file(gold_dir / "alignment_phones.tsv"), word_text,
                                  opt.silence_labels, (gold_dir / "alignment_phones.tsv").string(),
                                  words.string());
  } else {
    g.references = detail::parse_id_text_table(read_file(gold_dir / "references.tsv"),
                                               (gold_dir / "references.tsv").string());
    g.systems = detail::parse_id_text_table(read_file(gold_dir / "systems.tsv"),
                                            (gold_dir / "systems.tsv").string());
  }
  return g;
}

struct Finding {
  std::string location;  // "path" or "path:line"
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  std::string to_text() const {
    if (findings.empty()) return "validation: clean\n";
    std::string out;
    for (const auto& f : findings) {
      out += f.location;
      out += ": ";
      out += f.message;
      out += '\n';
    }
    return out;
  }
};

namespace detail {

inline void check_feature_files(const fs::path& submission_dir, const GoldData& gold,
                                const EvalOptions& opt, ValidationReport& report) {
  std::size_t dim = 0;
  std::string dim_item;
  for (const Item& item : gold.items) {
    fs::path path = submission_dir / "features" / (item.item_id + ".txt");
    if (!fs::exists(path)) {
      report.findings.push_back({path.string(), "missing feature file for item " + item.item_id});
      continue;
    }
    try {
      FrameSequence seq = parse_feature_file(read_file(path), opt.time_column, item.item_id, path.string());
      if (dim == 0) {
        dim = seq.dim;
        dim_item = item.item_id;
      } else if (seq.dim != dim) {
        report.findings.push_back({path.string(), "dimension " + std::to_string(seq.dim) +
                                                      " differs from " + std::to_string(dim) + " (item " +
                                                      dim_item + ")"});
      }
    } catch (const ParseError& e) {
      report.findings.push_back({path.string() + ":" + std::to_string(e.line()), e.what()});
    }
    if (!gold.durations.count(item.item_id))
      report.findings.push_back({(submission_dir / "features").string(),
                                 "no duration in gold manifest for item " + item.item_id});
  }
}

inline void check_class_file(const fs::path& submission_dir, const GoldData& gold,
                             ValidationReport& report) {
  fs::path path = submission_dir / "classes.txt";
  if (!fs::exists(path)) {
    report.findings.push_back({path.string(), "missing class file"});
    return;
  }
  Clustering clustering;
  try {
    clustering = parse_class_file(read_file(path), path.string());
  } catch (const ParseError& e) {
    report.findings.push_back({path.string() + ":" + std::to_string(e.line()), e.what()});
    return;
  }
  for (const auto& cluster : clustering.clusters) {
    for (const Fragment& f : cluster.fragments) {
      if (!gold.alignment.has_file(f.file_id)) {
        report.findings.push_back({path.string(), "fragment references unknown file " + f.file_id});
        continue;
      }
      const FileAlignment& fa = gold.alignment.file(f.file_id);
      if (f.onset < fa.start() - kOverlapEpsilon || f.offset > fa.end() + kOverlapEpsilon)
        report.findings.push_back({path.string(), "fragment [" + format_seconds(f.onset) + ", " +
                                                      format_seconds(f.offset) + "] outside extent of file " +
                                                      f.file_id});
    }
  }
}

inline void check_responses(const fs::path& submission_dir, const GoldData& gold,
                            ValidationReport& report) {
  fs::path path = submission_dir / "responses.csv";
  if (!fs::exists(path)) {
    report.findings.push_back({path.string(), "missing responses file"});
    return;
  }
  std::vector<Response> responses;
  try {
    responses = parse_responses_csv(read_file(path), path.string());
  } catch (const ParseError& e) {
    report.findings.push_back({path.string() + ":" + std::to_string(e.line()), e.what()});
    return;
  }
  for (const Response& r : responses) {
    if (r.kind == ResponseKind::transcription && !gold.references.count(r.item_id))
      report.findings.push_back({path.string(), "no reference transcription for item " + r.item_id});
    if (!r.is_catch_trial && !gold.systems.count(r.item_id))
      report.findings.push_back({path.string(), "item not mapped to a system: " + r.item_id});
  }
}

}  // namespace detail

/// Structural checks for one track's submission against the gold directory.
inline ValidationReport validate(const fs::path& submission_dir, const fs::path& gold_dir, Track track,
                                 const EvalOptions& opt = {}) {
  ValidationReport report;
  if (!fs::is_directory(submission_dir)) {
    report.findings.push_back({submission_dir.string(), "submission directory does not exist"});
    return report;
  }
  if (!fs::is_directory(gold_dir)) {
    report.findings.push_back({gold_dir.string(), "gold directory does not exist"});
    return report;
  }
  GoldData gold;
  try {
    gold = load_gold(gold_dir, track, opt);
  } catch (const Error& e) {
    report.findings.push_back({gold_dir.string(), std::string("gold data: ") + e.what()});
    return report;
  }
  switch (track) {
    case Track::units:
      detail::check_feature_files(submission_dir, gold, opt, report);
      break;
    case Track::terms:
      detail::check_class_file(submission_dir, gold, report);
      break;
    case Track::human:
      detail::check_responses(submission_dir, gold, report);
      break;
  }
  return report;
}

namespace detail {

inline void fill_meta(ScoreReport& report, Track track, const EvalOptions& opt) {
  report.set("meta.tool", kToolName);
  report.set("meta.version", kVersion);
  report.set("meta.language", opt.language);
  report.set("meta.track", to_string(track));
  // The thread count is execution configuration, not scoring configuration;
  // echoing it would break byte-identical reports across thread counts.
  report.set("config.seed", static_cast<std::uint64_t>(opt.seed));
  std::string silences;
  for (const auto& s : opt.silence_labels) {
    if (!silences.empty()) silences += ',';
    silences += s;
  }
  report.set("config.silence_labels", silences);
}

inline void fill_prf(ScoreReport& report, std::string_view prefix, const PRF& prf) {
  report.set(std::string(prefix) + ".precision", prf.precision);
  report.set(std::string(prefix) + ".recall", prf.recall);
  report.set(std::string(prefix) + ".fscore", prf.fscore);
}

}  // namespace detail

/// Loads per-item feature files in item order. Missing files fail the run and
/// name every absent item.
inline std::vector<FrameSequence> load_features(const fs::path& submission_dir,
                                                std::span<const Item> items, const EvalOptions& opt) {
  std::vector<FrameSequence> seqs(items.size());
  std::string missing;
  for (const Item& item : items) {
    fs::path path = submission_dir / "features" / (item.item_id + ".txt");
    if (!fs::exists(path)) missing += (missing.empty() ? "" : ", ") + item.item_id;
  }
  if (!missing.empty()) throw Error("missing encodings for items: " + missing);
  parallel_for(items.size(), opt.threads, [&](std::size_t i) {
    fs::path path = submission_dir / "features" / (items[i].item_id + ".txt");
    seqs[i] = parse_feature_file(read_file(path), opt.time_column, items[i].item_id, path.string());
  });
  return seqs;
}

/// Bitrate plus ABX in the selected distance mode.
inline ScoreReport evaluate_units(const fs::path& submission_dir, const fs::path& gold_dir,
                                  const EvalOptions& opt = {}) {
  GoldData gold = load_gold(gold_dir, Track::units, opt);
  std::vector<FrameSequence> seqs = load_features(submission_dir, gold.items, opt);

  ScoreReport report;
  detail::fill_meta(report, Track::units, opt);
  report.set("config.distance", to_string(opt.distance));
  report.set("config.max_tokens_per_role", static_cast<std::uint64_t>(opt.max_tokens_per_role));
  report.set("config.time_column", opt.time_column ? "true" : "false");

  SymbolInventory inventory = build_symbol_inventory(seqs, gold.durations);
  report.set("bitrate.bits_per_second", bitrate(inventory));
  report.set("bitrate.entropy_bits", shannon_entropy_bits(inventory));
  report.set("bitrate.n_frames", inventory.total_frames);
  report.set("bitrate.n_symbols", static_cast<std::uint64_t>(inventory.size()));
  report.set("bitrate.duration_seconds", inventory.total_duration);

  AbxTaskOptions task_opt;
  task_opt.max_tokens_per_role = opt.max_tokens_per_role;
  task_opt.seed = opt.seed;
  std::vector<AbxCell> cells = build_task(gold.items, task_opt);

  WarningCounters warnings;
  std::vector<double> scores;
  if (opt.distance == DistanceMode::edit) {
    std::vector<std::vector<std::uint32_t>> ids = symbol_ids(seqs, inventory);
    scores = score_cells(cells, [&](std::uint32_t i, std::uint32_t j) {
      return static_cast<double>(edit_distance(ids[i], ids[j]));
    }, opt.threads);
  } else {
    FrameMetricKind kind = opt.distance == DistanceMode::angle ? FrameMetricKind::angle
                                                               : FrameMetricKind::symmetrized_kl;
    scores = score_cells(cells, [&](std::uint32_t i, std::uint32_t j) {
      return dtw_distance(seqs[i], seqs[j], kind, &warnings);
    }, opt.threads);
  }
  AbxResult abx = aggregate_error(cells, scores);
  std::string prefix = std::string("abx.") + to_string(opt.distance);
  report.set(prefix + ".error_percent", abx.error_percent);
  report.set(prefix + ".cells", abx.cells);
  report.set(prefix + ".triplets", abx.triplets);
  for (const auto& [pair, err] : abx.per_phone_pair) report.set(prefix + ".pair." + pair, err);
  for (const auto& [ctx, err] : abx.per_context) report.set(prefix + ".context." + ctx, err);
  report.set("warnings.zero_vector_frames",
             static_cast<std::uint64_t>(warnings.zero_vectors.load()));
  return report;
}

/// NED, coverage, grouping, type, token and boundary scores for a class-file
/// submission.
inline ScoreReport evaluate_terms(const fs::path& submission_dir, const fs::path& gold_dir,
                                  const EvalOptions& opt = {}) {
  GoldData gold = load_gold(gold_dir, Track::terms, opt);
  Clustering clustering = parse_class_file(read_file(submission_dir / "classes.txt"),
                                           (submission_dir / "classes.txt").string());

  ScoreReport report;
  detail::fill_meta(report, Track::terms, opt);
  report.set("tde.clusters", static_cast<std::uint64_t>(clustering.clusters.size()));
  report.set("tde.fragments", static_cast<std::uint64_t>(clustering.total_fragments()));

  WarningCounters warnings;
  try {
    report.set("tde.ned", ned(clustering, gold.alignment, opt.threads, &warnings));
  } catch (const NoMatchesError&) {
    report.set("tde.ned", kNotApplicable);
  }
  report.set("tde.coverage", coverage(clustering, gold.alignment, &warnings));
  try {
    detail::fill_prf(report, "tde.grouping", grouping_scores(clustering, gold.alignment, &warnings));
  } catch (const NoMatchesError&) {
    detail::fill_prf(report, "tde.grouping", PRF{kNotApplicable, kNotApplicable, kNotApplicable});
  }
  auto word_metric = [&](std::string_view prefix, auto&& fn) {
    try {
      detail::fill_prf(report, prefix, fn());
    } catch (const NoGoldWordsError&) {
      detail::fill_prf(report, prefix, PRF{kNotApplicable, kNotApplicable, kNotApplicable});
    }
  };
  word_metric("tde.type", [&] { return type_scores(clustering, gold.alignment, 3, 20, &warnings); });
  word_metric("tde.token", [&] { return token_scores(clustering, gold.alignment, 3, 20, &warnings); });
  word_metric("tde.boundary", [&] { return boundary_scores(clustering, gold.alignment, &warnings); });
  report.set("warnings.clamped_fragments",
             static_cast<std::uint64_t>(warnings.clamped_fragments.load()));
  return report;
}

/// CER, MOS and similarity aggregation over retained evaluators.
inline ScoreReport evaluate_human(const fs::path& submission_dir, const fs::path& gold_dir,
                                  const EvalOptions& opt = {}) {
  GoldData gold = load_gold(gold_dir, Track::human, opt);
  std::vector<Response> responses = parse_responses_csv(read_file(submission_dir / "responses.csv"),
                                                        (submission_dir / "responses.csv").string());
  ScoreReport report;
  detail::fill_meta(report, Track::human, opt);

  WarningCounters warnings;
  std::set<std::string> retained = filter_participants(responses, gold.references, 0.80, &warnings);
  std::set<std::string> all;
  for (const Response& r : responses) all.insert(r.evaluator_id);
  report.set("subjective.evaluators", static_cast<std::uint64_t>(all.size()));
  report.set("subjective.retained_evaluators", static_cast<std::uint64_t>(retained.size()));
  report.set("warnings.evaluators_without_catch_trials",
             static_cast<std::uint64_t>(warnings.evaluators_without_catch_trials.load()));

  auto mos = aggregate_opinion(responses, retained, gold.systems, ResponseKind::mos, opt.seed,
                               opt.bootstrap_resamples);
  auto similarity = aggregate_opinion(responses, retained, gold.systems, ResponseKind::similarity,
                                      opt.seed, opt.bootstrap_resamples);
  auto cer_scores = aggregate_cer(responses, retained, gold.systems, gold.references);
  auto fill = [&](const std::string& metric, const std::map<std::string, OpinionScore>& scores,
                  bool with_ci) {
    for (const auto& [system, s] : scores) {
      std::string prefix = "subjective." + system + "." + metric;
      report.set(prefix + ".mean", s.mean);
      report.set(prefix + ".n", s.n);
      if (with_ci) {
        report.set(prefix + ".ci95_lo", s.ci_lo);
        report.set(prefix + ".ci95_hi", s.ci_hi);
      }
    }
  };
  fill("mos", mos, true);
  fill("similarity", similarity, true);
  fill("cer", cer_scores, false);
  return report;
}

inline ScoreReport evaluate(const fs::path& submission_dir, const fs::path& gold_dir, Track track,
                            const EvalOptions& opt = {}) {
  switch (track) {
    case Track::units: return evaluate_units(submission_dir, gold_dir, opt);
    case Track::terms: return evaluate_terms(submission_dir, gold_dir, opt);
    case Track::human: return evaluate_human(submission_dir, gold_dir, opt);
  }
  throw Error("unknown track");
}

}  // namespace zrs

#endif  // ZRS_EVALUATE_HPP
