// tests/test_abx.cpp

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

#include "oracles.hpp"
#include "zrs/abx.hpp"
#include "zrs/synthgen.hpp"

using namespace zrs;

namespace {

Item make_item(std::string id, std::string prev, std::string center, std::string next,
               std::string speaker) {
  return Item{std::move(id), std::move(prev), std::move(center), std::move(next), std::move(speaker)};
}

/// The canonical minimal-pair setup: [aba] and [apa] from each of two
/// speakers.
std::vector<Item> aba_apa_two_speakers() {
  return {
      make_item("i0", "a", "b", "a", "s1"),
      make_item("i1", "a", "p", "a", "s1"),
      make_item("i2", "a", "b", "a", "s2"),
      make_item("i3", "a", "p", "a", "s2"),
  };
}

}  // namespace

TEST_CASE("parse_items") {
  auto items = parse_items("i0\ta\tb\ta\ts1\n# comment\ni1\ta\tp\ta\ts2\n");
  REQUIRE(items.size() == 2);
  CHECK(items[1].center == "p");
  CHECK_THROWS_AS(parse_items("i0\ta\tb\ta\n"), ParseError);
}

TEST_CASE("build_task enumerates two cells per direction on the minimal setup") {
  auto items = aba_apa_two_speakers();
  auto cells = build_task(items);
  // Directions (b as A/X, p as A/X) x speaker-pair orderings (s1->s2, s2->s1).
  REQUIRE(cells.size() == 4);
  int b_direction = 0, p_direction = 0;
  for (const auto& c : cells) {
    REQUIRE(c.prev == "a");
    REQUIRE(c.next == "a");
    REQUIRE(c.ab_speaker != c.x_speaker);
    REQUIRE(c.a.size() == 1);
    REQUIRE(c.b.size() == 1);
    REQUIRE(c.x.size() == 1);
    if (c.phone_ax == "b") ++b_direction;
    if (c.phone_ax == "p") ++p_direction;
  }
  CHECK(b_direction == 2);
  CHECK(p_direction == 2);
}

TEST_CASE("build_task fails without a second speaker") {
  std::vector<Item> items = {
      make_item("i0", "a", "b", "a", "s1"),
      make_item("i1", "a", "p", "a", "s1"),
  };
  CHECK_THROWS_AS(build_task(items), Error);
}

TEST_CASE("build_task fails without any minimal pair") {
  std::vector<Item> items = {
      make_item("i0", "a", "b", "a", "s1"),
      make_item("i1", "a", "b", "a", "s2"),
      make_item("i2", "x", "p", "y", "s1"),
  };
  CHECK_THROWS_AS(build_task(items), Error);
}

TEST_CASE("build_task subsampling is deterministic and capped") {
  Rng rng(17);
  std::vector<Item> items;
  for (int i = 0; i < 40; ++i)
    items.push_back(make_item("a" + std::to_string(i), "a", "b", "a", i % 2 ? "s1" : "s2"));
  for (int i = 0; i < 40; ++i)
    items.push_back(make_item("p" + std::to_string(i), "a", "p", "a", i % 2 ? "s1" : "s2"));
  AbxTaskOptions opt;
  opt.max_tokens_per_role = 5;
  opt.seed = 123;
  auto cells1 = build_task(items, opt);
  auto cells2 = build_task(items, opt);
  REQUIRE(cells1.size() == cells2.size());
  for (std::size_t i = 0; i < cells1.size(); ++i) {
    CHECK(cells1[i].a == cells2[i].a);
    CHECK(cells1[i].b == cells2[i].b);
    CHECK(cells1[i].x == cells2[i].x);
    CHECK(cells1[i].a.size() == 5);
  }
  AbxTaskOptions other = opt;
  other.seed = 124;
  auto cells3 = build_task(items, other);
  bool any_different = false;
  for (std::size_t i = 0; i < cells1.size(); ++i)
    if (cells1[i].a != cells3[i].a || cells1[i].x != cells3[i].x) any_different = true;
  CHECK(any_different);
}

TEST_CASE("score_cell basics") {
  AbxCell cell;
  cell.a = {0, 1};
  cell.b = {2, 3};
  cell.x = {4, 5};
  SECTION("A always closer -> 1") {
    double s = score_cell(cell, [](std::uint32_t i, std::uint32_t) { return i < 2 ? 0.1 : 0.2; });
    CHECK(s == 1.0);
  }
  SECTION("all ties -> 0.5") {
    double s = score_cell(cell, [](std::uint32_t, std::uint32_t) { return 7.0; });
    CHECK(s == 0.5);
  }
  SECTION("2x2x2 hand-set distances equal the naive triple mean") {
    // d(token, x) depends on both endpoints.
    auto dist = [](std::uint32_t i, std::uint32_t j) {
      return static_cast<double>((i * 31 + j * 17) % 7);
    };
    double expected_sum = 0;
    int n = 0;
    for (std::uint32_t x : cell.x)
      for (std::uint32_t a : cell.a)
        for (std::uint32_t b : cell.b) {
          double dax = dist(a, x), dbx = dist(b, x);
          expected_sum += dax < dbx ? 1.0 : dax == dbx ? 0.5 : 0.0;
          ++n;
        }
    CHECK(score_cell(cell, dist) == expected_sum / n);
  }
}

TEST_CASE("aggregate_error reference points") {
  auto items = aba_apa_two_speakers();
  auto cells = build_task(items);
  SECTION("all cells perfect -> 0%") {
    std::vector<double> scores(cells.size(), 1.0);
    CHECK(aggregate_error(cells, scores).error_percent == 0.0);
  }
  SECTION("all cells at chance -> 50%") {
    std::vector<double> scores(cells.size(), 0.5);
    CHECK(aggregate_error(cells, scores).error_percent == 50.0);
  }
}

TEST_CASE("aggregate_error is macro, not triple weighted") {
  // Two phone pairs with different cell counts: pair (b,p) appears in two
  // contexts, pair (b,q) in one. Hand-computed hierarchy:
  //   (b,p) ctx1: dir b: mean(0.9); dir p: mean(0.7) -> 0.8
  //   (b,p) ctx2: dir b: mean(0.5); dir p: mean(0.5) -> 0.5
  //   pair (b,p): (0.8 + 0.5) / 2 = 0.65
  //   (b,q) ctx1: dir b: 1.0; dir q: 0.0 -> 0.5
  //   global score = (0.65 + 0.5) / 2 = 0.575 -> error 42.5%
  std::vector<Item> items = {
      make_item("b1", "a", "b", "a", "s1"), make_item("p1", "a", "p", "a", "s1"),
      make_item("b2", "a", "b", "a", "s2"), make_item("p2", "a", "p", "a", "s2"),
      make_item("b3", "c", "b", "c", "s1"), make_item("p3", "c", "p", "c", "s1"),
      make_item("b4", "c", "b", "c", "s2"), make_item("p4", "c", "p", "c", "s2"),
      make_item("q1", "a", "q", "a", "s1"), make_item("q2", "a", "q", "a", "s2"),
  };
  auto cells = build_task(items);
  std::vector<double> scores(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const AbxCell& c = cells[i];
    std::string pair_lo = std::min(c.phone_ax, c.phone_bx);
    std::string pair_hi = std::max(c.phone_ax, c.phone_bx);
    if (pair_lo == "b" && pair_hi == "p" && c.prev == "a")
      scores[i] = c.phone_ax == "b" ? 0.9 : 0.7;
    else if (pair_lo == "b" && pair_hi == "p")
      scores[i] = 0.5;
    else
      scores[i] = c.phone_ax == "b" ? 1.0 : 0.0;
  }
  AbxResult r = aggregate_error(cells, scores);
  CHECK(r.error_percent == Catch::Approx(42.5).margin(1e-12));
  CHECK(r.per_phone_pair.at("b-p") == Catch::Approx(35.0).margin(1e-12));
  CHECK(r.per_phone_pair.at("b-q") == Catch::Approx(50.0).margin(1e-12));
}

TEST_CASE("gold one-hot encodings score 0% in edit mode") {
  GenSpec spec;
  spec.seed = 31;
  spec.n_files = 6;
  spec.speakers = 3;
  GeneratedCorpus corpus = gen_corpus(spec);
  Submission sub = gen_gold_submission(corpus);
  std::map<std::string, double> durations = corpus.item_durations;
  SymbolInventory inv = build_symbol_inventory(sub.features, durations);
  auto ids = symbol_ids(sub.features, inv);
  auto cells = build_task(corpus.items);
  auto scores = score_cells(cells, [&](std::uint32_t i, std::uint32_t j) {
    return static_cast<double>(edit_distance(ids[i], ids[j]));
  }, 2);
  CHECK(aggregate_error(cells, scores).error_percent == 0.0);
}

TEST_CASE("identical encodings for every item score exactly 50%") {
  auto items = aba_apa_two_speakers();
  auto cells = build_task(items);
  auto scores = score_cells(cells, [](std::uint32_t, std::uint32_t) { return 0.0; }, 1);
  CHECK(aggregate_error(cells, scores).error_percent == 50.0);
}

TEST_CASE("ABX score is invariant under monotone distance transforms") {
  Rng rng(77);
  int instances = 0;
  while (instances < 100) {
    // Random small item set; skip draws with no valid cell.
    std::vector<Item> items;
    std::vector<std::string> phones{"a", "b", "c"};
    std::vector<std::string> speakers{"s1", "s2", "s3"};
    std::size_t n = 8 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) {
      items.push_back(make_item("i" + std::to_string(i), phones[rng.below(2)], phones[rng.below(3)],
                                phones[rng.below(2)], speakers[rng.below(3)]));
    }
    std::vector<AbxCell> cells;
    try {
      cells = build_task(items);
    } catch (const Error&) {
      continue;
    }
    ++instances;
    // Random symmetric distance table.
    std::vector<std::vector<double>> table(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) table[i][j] = table[j][i] = rng.unit();
    auto base = [&](std::uint32_t i, std::uint32_t j) { return table[i][j]; };
    auto transformed = [&](std::uint32_t i, std::uint32_t j) {
      double d = table[i][j];
      return d * d * d + 2.0 * d;  // strictly increasing on [0, inf)
    };
    auto s1 = score_cells(cells, base, 1);
    auto s2 = score_cells(cells, transformed, 1);
    REQUIRE(aggregate_error(cells, s1).error_percent == aggregate_error(cells, s2).error_percent);
  }
}

TEST_CASE("swapping phone labels with role symmetrization leaves the score unchanged") {
  Rng rng(78);
  for (int round = 0; round < 50; ++round) {
    std::vector<Item> items;
    std::size_t n = 8;
    for (std::size_t i = 0; i < n; ++i)
      items.push_back(make_item("i" + std::to_string(i), "a", i % 2 ? "b" : "p", "a",
                                i < n / 2 ? "s1" : "s2"));
    std::vector<std::vector<double>> table(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) table[i][j] = table[j][i] = rng.unit();
    auto dist = [&](std::uint32_t i, std::uint32_t j) { return table[i][j]; };
    auto cells = build_task(items);
    double base = aggregate_error(cells, score_cells(cells, dist, 1)).error_percent;

    std::vector<Item> swapped = items;
    for (auto& it : swapped) it.center = it.center == "b" ? "p" : "b";
    auto cells2 = build_task(swapped);
    double after = aggregate_error(cells2, score_cells(cells2, dist, 1)).error_percent;
    REQUIRE(base == after);
  }
}

TEST_CASE("engine matches the naive oracle bit-exactly on small tasks") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.n_files = 4;
    spec.speakers = 2;
    spec.lexicon_size = 4;
    spec.words_per_file = 2;
    spec.phone_inventory = 3;
    GeneratedCorpus corpus = gen_corpus(spec);
    Submission sub = gen_gold_submission(corpus);
    std::vector<AbxCell> cells;
    AbxTaskOptions opt;
    opt.max_tokens_per_role = 0;  // the oracle does not subsample
    try {
      cells = build_task(corpus.items, opt);
    } catch (const Error&) {
      continue;
    }
    auto dist = [&](std::uint32_t i, std::uint32_t j) {
      return dtw_distance(sub.features[i], sub.features[j], FrameMetricKind::angle);
    };
    double engine = aggregate_error(cells, score_cells(cells, dist, 2)).error_percent;
    double oracle = oracles::abx_error_percent(corpus.items, dist);
    REQUIRE(engine == oracle);
  }
}
