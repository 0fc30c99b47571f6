// tools/zrscore.cpp

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

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zrs/evaluate.hpp"
#include "zrs/synthgen.hpp"
#include "zrs/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScoreFailed = 1;
constexpr int kExitValidationFailed = 2;

struct CommonArgs {
  std::string submission_dir;
  std::string gold_dir;
  std::string distance = "angle";
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  std::size_t max_tokens_per_role = 10;
  std::vector<std::string> silence_labels = {"SIL", "SPN", "NSN"};
  bool time_column = false;
  std::string language = "unspecified";
  std::string output;
  std::string csv;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_distance) {
  cmd->add_option("submission", args.submission_dir, "submission directory")->required();
  cmd->add_option("gold", args.gold_dir, "gold (reference) directory")->required();
  if (with_distance)
    cmd->add_option("--distance", args.distance, "distance mode: angle, kl or edit")
        ->check(CLI::IsMember({"angle", "kl", "edit"}))
        ->capture_default_str();
  cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--seed", args.seed, "seed for subsampling and bootstrap")->capture_default_str();
  cmd->add_option("--max-tokens-per-role", args.max_tokens_per_role,
                  "cap on A/B/X tokens per ABX cell (0 = unlimited)")
      ->capture_default_str();
  cmd->add_option("--silence-labels", args.silence_labels, "phone labels treated as non-speech")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_flag("--time-column", args.time_column, "feature files carry a leading time column");
  cmd->add_option("--language", args.language, "language tag echoed in the report")->capture_default_str();
  cmd->add_option("-o,--output", args.output, "write the report here instead of stdout");
  cmd->add_option("--csv", args.csv, "also write the report as flat CSV");
}

zrs::EvalOptions to_options(const CommonArgs& args) {
  zrs::EvalOptions opt;
  opt.distance = zrs::distance_mode_from_string(args.distance);
  opt.threads = args.threads;
  opt.seed = args.seed;
  opt.max_tokens_per_role = args.max_tokens_per_role;
  opt.silence_labels = std::set<std::string>(args.silence_labels.begin(), args.silence_labels.end());
  opt.time_column = args.time_column;
  opt.language = args.language;
  return opt;
}

int run_eval(const CommonArgs& args, zrs::Track track) {
  zrs::EvalOptions opt = to_options(args);
  zrs::ValidationReport validation = zrs::validate(args.submission_dir, args.gold_dir, track, opt);
  if (!validation.ok()) {
    std::cerr << validation.to_text();
    std::cerr << "validation failed with " << validation.findings.size() << " finding(s)\n";
    return kExitValidationFailed;
  }
  zrs::ScoreReport report = zrs::evaluate(args.submission_dir, args.gold_dir, track, opt);
  std::string text = report.to_text();
  if (args.output.empty())
    std::cout << text;
  else
    zrs::write_file(args.output, text);
  if (!args.csv.empty()) zrs::write_file(args.csv, report.to_csv());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(zrs::kToolName) + " " + zrs::kVersion +
               " - scoring for unsupervised speech representation benchmarks"};
  app.require_subcommand(1);

  CommonArgs validate_args, units_args, terms_args, human_args;
  std::string validate_track = "units";

  CLI::App* cmd_validate = app.add_subcommand("validate", "check a submission's structure");
  add_common(cmd_validate, validate_args, false);
  cmd_validate->add_option("--track", validate_track, "track to validate: units, terms or human")
      ->check(CLI::IsMember({"units", "terms", "human"}))
      ->capture_default_str();

  CLI::App* cmd_units = app.add_subcommand("eval-units", "bitrate and ABX discriminability");
  add_common(cmd_units, units_args, true);
  CLI::App* cmd_terms = app.add_subcommand("eval-terms", "spoken term discovery metrics");
  add_common(cmd_terms, terms_args, false);
  CLI::App* cmd_human = app.add_subcommand("eval-human", "CER / MOS / similarity post-processing");
  add_common(cmd_human, human_args, false);

  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic gold corpus and submission");
  zrs::GenSpec spec;
  std::string gen_gold_dir, gen_submission_dir;
  double flip_rate = 0.0, jitter = 0.0;
  std::uint64_t noise_seed = 0;
  cmd_gen->add_option("--out-gold", gen_gold_dir, "output gold directory")->required();
  cmd_gen->add_option("--out-submission", gen_submission_dir, "output submission directory");
  cmd_gen->add_option("--seed", spec.seed, "corpus seed")->capture_default_str();
  cmd_gen->add_option("--files", spec.n_files, "number of files")->capture_default_str();
  cmd_gen->add_option("--phones", spec.phone_inventory, "phone inventory size")->capture_default_str();
  cmd_gen->add_option("--lexicon", spec.lexicon_size, "word lexicon size")->capture_default_str();
  cmd_gen->add_option("--words-per-file", spec.words_per_file, "words per file")->capture_default_str();
  cmd_gen->add_option("--speakers", spec.speakers, "number of speakers")->capture_default_str();
  cmd_gen->add_option("--dur-min", spec.phone_dur_min, "min phone duration (s)")->capture_default_str();
  cmd_gen->add_option("--dur-max", spec.phone_dur_max, "max phone duration (s)")->capture_default_str();
  cmd_gen->add_option("--word-len-min", spec.word_len_min, "min word length in phones")->capture_default_str();
  cmd_gen->add_option("--word-len-max", spec.word_len_max, "max word length in phones")->capture_default_str();
  cmd_gen->add_option("--silence-prob", spec.silence_prob, "chance of silence before a word")
      ->capture_default_str();
  cmd_gen->add_option("--flip-rate", flip_rate, "per-frame symbol flip probability")->capture_default_str();
  cmd_gen->add_option("--jitter", jitter, "fragment boundary jitter (s)")->capture_default_str();
  cmd_gen->add_option("--noise-seed", noise_seed, "seed for flips and jitter")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_validate->parsed()) {
      zrs::Track track = validate_track == "units"   ? zrs::Track::units
                         : validate_track == "terms" ? zrs::Track::terms
                                                     : zrs::Track::human;
      zrs::ValidationReport report =
          zrs::validate(validate_args.submission_dir, validate_args.gold_dir, track,
                        to_options(validate_args));
      std::cout << report.to_text();
      return report.ok() ? kExitOk : kExitValidationFailed;
    }
    if (cmd_units->parsed()) return run_eval(units_args, zrs::Track::units);
    if (cmd_terms->parsed()) return run_eval(terms_args, zrs::Track::terms);
    if (cmd_human->parsed()) return run_eval(human_args, zrs::Track::human);
    if (cmd_gen->parsed()) {
      zrs::GeneratedCorpus corpus = zrs::gen_corpus(spec);
      zrs::write_corpus_dir(gen_gold_dir, corpus);
      if (!gen_submission_dir.empty()) {
        zrs::Submission submission = (flip_rate > 0 || jitter > 0)
                                         ? zrs::gen_noisy_submission(corpus, flip_rate, jitter, noise_seed)
                                         : zrs::gen_gold_submission(corpus);
        zrs::write_submission_dir(gen_submission_dir, submission);
      }
      std::cout << "generated " << corpus.alignment.files.size() << " files, " << corpus.items.size()
                << " items\n";
      return kExitOk;
    }
  } catch (const zrs::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidationFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitScoreFailed;
  }
  return kExitOk;
}
