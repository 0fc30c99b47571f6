// tests/test_features.cpp

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
#include "zrs/features.hpp"

using namespace zrs;

namespace {

FrameSequence make_seq(std::string id, std::vector<std::vector<double>> frames) {
  FrameSequence s;
  s.item_id = std::move(id);
  s.dim = frames.empty() ? 0 : frames[0].size();
  for (const auto& f : frames) s.data.insert(s.data.end(), f.begin(), f.end());
  return s;
}

}  // namespace

TEST_CASE("parse_feature_file with time column") {
  FrameSequence s = parse_feature_file("0.01 1 0\n0.02 0 1\n", true, "item");
  REQUIRE(s.frames() == 2);
  CHECK(s.dim == 2);
  CHECK(s.times == std::vector<double>{0.01, 0.02});
  CHECK(s.frame(1)[1] == 1.0);
}

TEST_CASE("parse_feature_file errors") {
  try {
    parse_feature_file("1 2 3\n1 2\n", false);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);  // ragged row
  }
  CHECK_THROWS_AS(parse_feature_file("1 x\n", false), ParseError);
  CHECK_THROWS_AS(parse_feature_file("", false), ParseError);
  CHECK_THROWS_AS(parse_feature_file("nan 1\n", false), ParseError);
  CHECK_THROWS_AS(parse_feature_file("0.2 1\n0.1 2\n", true), ParseError);  // times not increasing
}

TEST_CASE("feature file round-trips bit-exactly") {
  Rng rng(42);
  for (int round = 0; round < 20; ++round) {
    FrameSequence s;
    s.item_id = "r";
    s.dim = 1 + rng.below(5);
    std::size_t frames = 1 + rng.below(6);
    double t = 0;
    for (std::size_t i = 0; i < frames; ++i) {
      t += rng.unit();
      s.times.push_back(t);
      for (std::size_t d = 0; d < s.dim; ++d) s.data.push_back(rng.gaussian() * 1e3);
    }
    FrameSequence back = parse_feature_file(write_feature_file(s), true, "r");
    REQUIRE(back.data == s.data);
    REQUIRE(back.times == s.times);
  }
}

TEST_CASE("build_symbol_inventory counts distinct vectors") {
  std::vector<FrameSequence> seqs;
  seqs.push_back(make_seq("a", {{1, 0}, {1, 0}, {0, 1}}));
  std::map<std::string, double> durations{{"a", 1.5}};
  SymbolInventory inv = build_symbol_inventory(seqs, durations);
  CHECK(inv.size() == 2);
  CHECK(inv.total_frames == 3);
  CHECK(inv.total_duration == 1.5);
  std::multiset<std::uint64_t> counts(inv.counts.begin(), inv.counts.end());
  CHECK(counts == std::multiset<std::uint64_t>{1, 2});
}

TEST_CASE("symbol equality is exact on parsed values") {
  std::vector<FrameSequence> seqs;
  seqs.push_back(make_seq("a", {{1.0, 0.0}, {1.0000001, 0.0}}));
  SymbolInventory inv = build_symbol_inventory(seqs, {{"a", 1.0}});
  CHECK(inv.size() == 2);
}

TEST_CASE("inventory equals naive quadratic set construction") {
  Rng rng(7);
  std::vector<FrameSequence> seqs;
  std::map<std::string, double> durations;
  for (int s = 0; s < 6; ++s) {
    std::vector<std::vector<double>> frames;
    std::size_t n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized values so duplicates actually occur.
      frames.push_back({static_cast<double>(rng.below(3)), static_cast<double>(rng.below(2))});
    }
    std::string id = "it" + std::to_string(s);
    seqs.push_back(make_seq(id, frames));
    durations[id] = 1.0;
  }
  SymbolInventory inv = build_symbol_inventory(seqs, durations);

  // Naive O(n^2): linear scan with exact comparison.
  std::vector<std::vector<double>> symbols;
  std::vector<std::uint64_t> counts;
  for (const auto& seq : seqs) {
    for (std::size_t i = 0; i < seq.frames(); ++i) {
      auto f = seq.frame(i);
      std::vector<double> v(f.begin(), f.end());
      bool found = false;
      for (std::size_t k = 0; k < symbols.size(); ++k) {
        if (symbols[k] == v) {
          ++counts[k];
          found = true;
          break;
        }
      }
      if (!found) {
        symbols.push_back(v);
        counts.push_back(1);
      }
    }
  }
  REQUIRE(inv.size() == symbols.size());
  std::multiset<std::uint64_t> got(inv.counts.begin(), inv.counts.end());
  std::multiset<std::uint64_t> want(counts.begin(), counts.end());
  CHECK(got == want);
}

TEST_CASE("inventory requires durations for every item") {
  std::vector<FrameSequence> seqs;
  seqs.push_back(make_seq("a", {{1}}));
  CHECK_THROWS_AS(build_symbol_inventory(seqs, {}), Error);
}

TEST_CASE("bitrate of a constant code is exactly zero") {
  std::vector<FrameSequence> seqs;
  seqs.push_back(make_seq("a", {{2.5}, {2.5}, {2.5}, {2.5}}));
  SymbolInventory inv = build_symbol_inventory(seqs, {{"a", 2.0}});
  CHECK(shannon_entropy_bits(inv) == 0.0);
  CHECK(bitrate(inv) == 0.0);
}

TEST_CASE("bitrate hand values") {
  SECTION("a,a,b,b over 2 seconds -> 2 bits/s") {
    std::vector<FrameSequence> seqs;
    seqs.push_back(make_seq("a", {{1}, {1}, {2}, {2}}));
    SymbolInventory inv = build_symbol_inventory(seqs, {{"a", 2.0}});
    CHECK(bitrate(inv) == Catch::Approx(2.0).epsilon(1e-12));
  }
  SECTION("4 distinct symbols over 1 second -> 8 bits/s") {
    std::vector<FrameSequence> seqs;
    seqs.push_back(make_seq("a", {{1}, {2}, {3}, {4}}));
    SymbolInventory inv = build_symbol_inventory(seqs, {{"a", 1.0}});
    CHECK(bitrate(inv) == Catch::Approx(8.0).epsilon(1e-12));
  }
}

TEST_CASE("bitrate invariances") {
  Rng rng(13);
  for (int round = 0; round < 50; ++round) {
    // Random quantized corpus split over files.
    std::size_t n_files = 1 + rng.below(4);
    std::vector<std::vector<double>> all_frames;
    std::vector<FrameSequence> seqs;
    std::map<std::string, double> durations;
    for (std::size_t f = 0; f < n_files; ++f) {
      std::size_t n = 1 + rng.below(20);
      std::vector<std::vector<double>> frames;
      for (std::size_t i = 0; i < n; ++i) {
        frames.push_back({static_cast<double>(rng.below(4))});
        all_frames.push_back(frames.back());
      }
      std::string id = "f" + std::to_string(f);
      seqs.push_back(make_seq(id, frames));
      durations[id] = 0.5 + rng.unit();
    }
    double reference = bitrate(build_symbol_inventory(seqs, durations));

    // Shuffle frames across files, keeping per-file counts and durations.
    rng.shuffle(all_frames);
    std::vector<FrameSequence> shuffled;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < n_files; ++f) {
      std::size_t n = seqs[f].frames();
      std::vector<std::vector<double>> frames(all_frames.begin() + cursor, all_frames.begin() + cursor + n);
      cursor += n;
      shuffled.push_back(make_seq(seqs[f].item_id, frames));
    }
    REQUIRE(bitrate(build_symbol_inventory(shuffled, durations)) == reference);

    // Doubling every duration exactly halves the bitrate.
    std::map<std::string, double> doubled = durations;
    for (auto& [_, d] : doubled) d *= 2;
    REQUIRE(bitrate(build_symbol_inventory(seqs, doubled)) == reference / 2);

    // Bijective relabeling leaves the bitrate unchanged.
    std::vector<FrameSequence> relabeled = seqs;
    for (auto& s : relabeled)
      for (auto& v : s.data) v = 100.0 - v;
    REQUIRE(bitrate(build_symbol_inventory(relabeled, durations)) == reference);

    // H <= log2(#symbols).
    SymbolInventory inv = build_symbol_inventory(seqs, durations);
    REQUIRE(shannon_entropy_bits(inv) <=
            std::log2(static_cast<double>(inv.size())) + 1e-12);
  }
}

TEST_CASE("bitrate equals the independent entropy oracle") {
  Rng rng(99);
  for (int round = 0; round < 20; ++round) {
    std::vector<FrameSequence> seqs;
    std::map<std::string, double> durations;
    std::size_t n = 2 + rng.below(50);
    std::vector<std::vector<double>> frames;
    for (std::size_t i = 0; i < n; ++i) frames.push_back({static_cast<double>(rng.below(6))});
    seqs.push_back(make_seq("x", frames));
    durations["x"] = 1.0 + rng.unit() * 10;
    SymbolInventory inv = build_symbol_inventory(seqs, durations);
    double expected = static_cast<double>(inv.total_frames) / inv.total_duration *
                      oracles::entropy_bits(inv.counts);
    CHECK(bitrate(inv) == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("manifest parsing") {
  auto m = parse_manifest("a\t1.5\nb\t0.25\n");
  CHECK(m.at("a") == 1.5);
  CHECK_THROWS_AS(parse_manifest("a\t0\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("a\t1\na\t2\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("a\n"), ParseError);
}
