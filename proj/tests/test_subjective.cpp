// tests/test_subjective.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include "zrs/subjective.hpp"

using namespace zrs;

namespace {

Response transcription(std::string evaluator, std::string item, std::string text, bool is_catch) {
  Response r;
  r.evaluator_id = std::move(evaluator);
  r.item_id = std::move(item);
  r.kind = ResponseKind::transcription;
  r.text = std::move(text);
  r.is_catch_trial = is_catch;
  return r;
}

Response rating(std::string evaluator, std::string item, ResponseKind kind, int value) {
  Response r;
  r.evaluator_id = std::move(evaluator);
  r.item_id = std::move(item);
  r.kind = kind;
  r.rating = value;
  return r;
}

}  // namespace

TEST_CASE("cer basics") {
  CHECK(cer("hello world", "hello world") == 0.0);
  CHECK(cer("", "abcde") == 1.0);
  CHECK(cer("cat", "cut") == Catch::Approx(1.0 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(cer("anything", "..."), Error);  // reference empty after normalization
}

TEST_CASE("cer normalization: case, punctuation and whitespace") {
  CHECK(cer("Hello,   World!", "hello world") == 0.0);
  CHECK(cer("a  b\tc", "A B C") == 0.0);
  // Multi-byte characters count as single symbols.
  CHECK(cer("caf\xC3\xA9", "caf\xC3\xA9") == 0.0);
  CHECK(cer("cafe", "caf\xC3\xA9") == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cer bound: at most max(len_h, len_r) / len_r") {
  Rng rng(1);
  for (int round = 0; round < 100; ++round) {
    std::string h, r;
    for (std::size_t i = 0; i < rng.below(12); ++i) h += static_cast<char>('a' + rng.below(4));
    for (std::size_t i = 0; i < 1 + rng.below(12); ++i) r += static_cast<char>('a' + rng.below(4));
    double v = cer(h, r);
    REQUIRE(v <= static_cast<double>(std::max(h.size(), r.size())) / static_cast<double>(r.size()));
  }
}

TEST_CASE("parse_responses_csv") {
  const char* text =
      "evaluator_id,item_id,kind,payload,is_catch_trial\n"
      "e1,i1,transcription,\"hello, there\",0\n"
      "e1,i2,mos,4,0\n"
      "e2,i3,similarity,5,1\n";
  auto rs = parse_responses_csv(text);
  REQUIRE(rs.size() == 3);
  CHECK(rs[0].text == "hello, there");
  CHECK(rs[1].rating == 4);
  CHECK(rs[2].is_catch_trial);
  CHECK_THROWS_AS(parse_responses_csv("e1,i1,mos,6,0\n"), ParseError);
  CHECK_THROWS_AS(parse_responses_csv("e1,i1,grade,4,0\n"), ParseError);
  CHECK_THROWS_AS(parse_responses_csv("e1,i1,mos,4\n"), ParseError);
  CHECK_THROWS_AS(parse_responses_csv("e1,i1,mos,4,maybe\n"), ParseError);
}

TEST_CASE("filter_participants applies the strict 0.80 threshold") {
  std::map<std::string, std::string> refs{{"c1", std::string(100, 'a')}};
  auto with_cer = [&](double target) {
    // Hypothesis sharing (100 - k) leading symbols with the reference gives
    // CER k/100.
    int k = static_cast<int>(target * 100 + 0.5);
    return std::string(100 - k, 'a') + std::string(k, 'b');
  };
  std::vector<Response> responses{
      transcription("keep", "c1", with_cer(0.79), true),
      transcription("drop", "c1", with_cer(0.80), true),
  };
  auto retained = filter_participants(responses, refs);
  CHECK(retained.count("keep") == 1);
  CHECK(retained.count("drop") == 0);
}

TEST_CASE("filter_participants uses the mean over catch trials") {
  std::map<std::string, std::string> refs{{"c1", std::string(10, 'a')}};
  std::vector<Response> responses{
      transcription("e", "c1", std::string(10, 'a'), true),  // CER 0
      transcription("e", "c1", std::string(10, 'b'), true),  // CER 1
  };
  // Mean 0.5 < 0.8 -> retained even though one trial failed badly.
  CHECK(filter_participants(responses, refs).count("e") == 1);
}

TEST_CASE("evaluators without catch trials are excluded with a warning") {
  std::map<std::string, std::string> refs{{"c1", "aaaa"}};
  std::vector<Response> responses{
      transcription("good", "c1", "aaaa", true),
      rating("lost", "i1", ResponseKind::mos, 5),
  };
  WarningCounters w;
  auto retained = filter_participants(responses, refs, 0.80, &w);
  CHECK(retained == std::set<std::string>{"good"});
  CHECK(w.evaluators_without_catch_trials.load() == 1);
}

TEST_CASE("filter_participants matches a hand-filtered pool") {
  std::map<std::string, std::string> refs{{"c", std::string(10, 'x')}};
  auto hyp_with_errors = [&](int k) { return std::string(10 - k, 'x') + std::string(k, 'y'); };
  std::vector<Response> responses;
  // e0..e9 have mean catch CER k/10.
  for (int k = 0; k < 10; ++k)
    responses.push_back(transcription("e" + std::to_string(k), "c", hyp_with_errors(k), true));
  auto retained = filter_participants(responses, refs);
  std::set<std::string> expected;
  for (int k = 0; k < 8; ++k) expected.insert("e" + std::to_string(k));  // 0.8 itself is out
  CHECK(retained == expected);
}

TEST_CASE("filtering is idempotent") {
  std::map<std::string, std::string> refs{{"c", "abcab"}};
  std::vector<Response> responses{
      transcription("e1", "c", "abcab", true),
      transcription("e2", "c", "zzzzz", true),
      rating("e1", "i", ResponseKind::mos, 3),
  };
  auto retained = filter_participants(responses, refs);
  // Re-filtering the responses of retained evaluators changes nothing.
  std::vector<Response> subset;
  for (const auto& r : responses)
    if (retained.count(r.evaluator_id)) subset.push_back(r);
  CHECK(filter_participants(subset, refs) == retained);
}

TEST_CASE("aggregate_opinion means") {
  std::map<std::string, std::string> systems{{"i1", "sysA"}, {"i2", "sysA"}, {"i3", "sysA"}};
  std::set<std::string> retained{"e1", "e2", "e3"};
  SECTION("all fives -> 5.0") {
    std::vector<Response> rs{
        rating("e1", "i1", ResponseKind::mos, 5),
        rating("e2", "i2", ResponseKind::mos, 5),
        rating("e3", "i3", ResponseKind::mos, 5),
    };
    auto scores = aggregate_opinion(rs, retained, systems, ResponseKind::mos, 1);
    CHECK(scores.at("sysA").mean == 5.0);
    CHECK(scores.at("sysA").ci_lo == 5.0);
    CHECK(scores.at("sysA").ci_hi == 5.0);
  }
  SECTION("3,4,5 -> 4.0 and non-retained/other kinds ignored") {
    std::vector<Response> rs{
        rating("e1", "i1", ResponseKind::mos, 3),
        rating("e2", "i2", ResponseKind::mos, 4),
        rating("e3", "i3", ResponseKind::mos, 5),
        rating("outsider", "i1", ResponseKind::mos, 1),
        rating("e1", "i1", ResponseKind::similarity, 1),
    };
    auto scores = aggregate_opinion(rs, retained, systems, ResponseKind::mos, 1);
    CHECK(scores.at("sysA").mean == 4.0);
    CHECK(scores.at("sysA").n == 3);
    CHECK(scores.at("sysA").ci_lo >= 3.0);
    CHECK(scores.at("sysA").ci_hi <= 5.0);
  }
}

TEST_CASE("bootstrap intervals are deterministic for a fixed seed") {
  std::vector<int> ratings{1, 3, 3, 4, 5, 5, 2, 4};
  OpinionScore a = bootstrap_mean(ratings, 42);
  OpinionScore b = bootstrap_mean(ratings, 42);
  CHECK(a.ci_lo == b.ci_lo);
  CHECK(a.ci_hi == b.ci_hi);
  OpinionScore c = bootstrap_mean(ratings, 43);
  CHECK((a.ci_lo != c.ci_lo || a.ci_hi != c.ci_hi));
  CHECK(a.ci_lo <= a.mean);
  CHECK(a.ci_hi >= a.mean);
}

TEST_CASE("aggregation is unchanged by re-filtering an all-retained pool") {
  std::map<std::string, std::string> refs{{"c", "aaaa"}};
  std::map<std::string, std::string> systems{{"i1", "sys"}};
  std::vector<Response> rs{
      transcription("e1", "c", "aaaa", true), rating("e1", "i1", ResponseKind::mos, 4),
      transcription("e2", "c", "aaaa", true), rating("e2", "i1", ResponseKind::mos, 2),
  };
  auto retained = filter_participants(rs, refs);
  REQUIRE(retained.size() == 2);
  auto scores = aggregate_opinion(rs, retained, systems, ResponseKind::mos, 7);
  auto again = aggregate_opinion(rs, filter_participants(rs, refs), systems, ResponseKind::mos, 7);
  CHECK(scores.at("sys").mean == again.at("sys").mean);
  CHECK(scores.at("sys").ci_lo == again.at("sys").ci_lo);
}

TEST_CASE("aggregate_cer per system") {
  std::map<std::string, std::string> refs{{"i1", "abcd"}, {"i2", "wxyz"}};
  std::map<std::string, std::string> systems{{"i1", "A"}, {"i2", "B"}};
  std::set<std::string> retained{"e1"};
  std::vector<Response> rs{
      transcription("e1", "i1", "abcd", false),  // CER 0
      transcription("e1", "i2", "wxyq", false),  // CER 0.25
      transcription("ignored", "i1", "zzzz", false),
  };
  auto scores = aggregate_cer(rs, retained, systems, refs);
  CHECK(scores.at("A").mean == 0.0);
  CHECK(scores.at("B").mean == Catch::Approx(0.25).epsilon(1e-12));
}
