// zrs/features.hpp

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

#ifndef ZRS_FEATURES_HPP
#define ZRS_FEATURES_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zrs/textio.hpp"

namespace zrs {

/// One submitted encoding: ordered frames of equal dimension, with optional
/// per-frame timestamps.
struct FrameSequence {
  std::string item_id;
  std::size_t dim = 0;
  std::vector<double> data;   // row-major, size() == dim * frames()
  std::vector<double> times;  // empty or one entry per frame, strictly increasing

  std::size_t frames() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> frame(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Parses "one frame per line" text: an optional leading time column followed
/// by d decimals. Dimension is fixed by the first row.
inline FrameSequence parse_feature_file(std::string_view text, bool has_time_column,
                                        std::string item_id = {}, std::string_view source = "features") {
  FrameSequence seq;
  seq.item_id = std::move(item_id);
  bool first = true;
  for (const Row& row : parse_table(text)) {
    std::size_t start = has_time_column ? 1 : 0;
    if (row.fields.size() <= start)
      throw ParseError(source, row.line_no, "frame row has no feature values");
    std::size_t d = row.fields.size() - start;
    if (first) {
      seq.dim = d;
      first = false;
    } else if (d != seq.dim) {
      throw ParseError(source, row.line_no,
                       "ragged row: expected " + std::to_string(seq.dim) + " values, got " + std::to_string(d));
    }
    if (has_time_column) {
      double t = parse_double_token(row.fields[0], source, row.line_no);
      if (!seq.times.empty() && t <= seq.times.back())
        throw ParseError(source, row.line_no, "frame times must be strictly increasing");
      seq.times.push_back(t);
    }
    for (std::size_t k = start; k < row.fields.size(); ++k) {
      double v = parse_double_token(row.fields[k], source, row.line_no);
      if (!std::isfinite(v)) throw ParseError(source, row.line_no, "non-finite feature value");
      seq.data.push_back(v);
    }
  }
  if (first) throw ParseError(source, 1, "empty feature file");
  return seq;
}

/// Inverse of parse_feature_file; values are printed so they re-parse
/// bit-exactly.
inline std::string write_feature_file(const FrameSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.frames(); ++i) {
    if (!seq.times.empty()) {
      out += format_full(seq.times[i]);
      out += ' ';
    }
    auto f = seq.frame(i);
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (k) out += ' ';
      out += format_full(f[k]);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

struct BitKeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& key) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t v : key) h = hash_mix(h, v);
    return static_cast<std::size_t>(h);
  }
};

inline std::vector<std::uint64_t> bit_key(std::span<const double> frame) {
  std::vector<std::uint64_t> key(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) key[i] = std::bit_cast<std::uint64_t>(frame[i]);
  return key;
}

}  // namespace detail

/// Dictionary of all distinct frame vectors across a submission. Two frames
/// are the same symbol iff their parsed values are bitwise equal.
struct SymbolInventory {
  std::size_t dim = 0;
  std::vector<std::vector<double>> symbols;  // first-occurrence order over item_id-sorted input
  std::vector<std::uint64_t> counts;
  std::uint64_t total_frames = 0;
  double total_duration = 0;

  std::size_t size() const { return symbols.size(); }
};

inline SymbolInventory build_symbol_inventory(std::span<const FrameSequence> sequences,
                                              const std::map<std::string, double>& durations) {
  SymbolInventory inv;
  std::vector<const FrameSequence*> order;
  order.reserve(sequences.size());
  for (const auto& s : sequences) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const FrameSequence* a, const FrameSequence* b) { return a->item_id < b->item_id; });

  std::unordered_map<std::vector<std::uint64_t>, std::size_t, detail::BitKeyHash> table;
  for (const FrameSequence* seq : order) {
    if (inv.dim == 0)
      inv.dim = seq->dim;
    else if (seq->dim != inv.dim)
      throw Error("inconsistent feature dimension for item " + seq->item_id + ": " +
                  std::to_string(seq->dim) + " vs " + std::to_string(inv.dim));
    auto dur = durations.find(seq->item_id);
    if (dur == durations.end()) throw Error("missing duration for item " + seq->item_id);
    inv.total_duration += dur->second;
    for (std::size_t i = 0; i < seq->frames(); ++i) {
      auto key = detail::bit_key(seq->frame(i));
      auto [it, inserted] = table.emplace(std::move(key), inv.symbols.size());
      if (inserted) {
        auto f = seq->frame(i);
        inv.symbols.emplace_back(f.begin(), f.end());
        inv.counts.push_back(0);
      }
      ++inv.counts[it->second];
      ++inv.total_frames;
    }
  }
  return inv;
}

/// Maps each frame of each sequence to its symbol id; used by the edit
/// distance mode.
inline std::vector<std::vector<std::uint32_t>> symbol_ids(std::span<const FrameSequence> sequences,
                                                          const SymbolInventory& inv) {
  std::unordered_map<std::vector<std::uint64_t>, std::uint32_t, detail::BitKeyHash> table;
  table.reserve(inv.symbols.size());
  for (std::size_t s = 0; s < inv.symbols.size(); ++s)
    table.emplace(detail::bit_key(inv.symbols[s]), static_cast<std::uint32_t>(s));
  std::vector<std::vector<std::uint32_t>> out(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& seq = sequences[i];
    out[i].reserve(seq.frames());
    for (std::size_t f = 0; f < seq.frames(); ++f) {
      auto it = table.find(detail::bit_key(seq.frame(f)));
      if (it == table.end()) throw Error("frame of item " + seq.item_id + " missing from inventory");
      out[i].push_back(it->second);
    }
  }
  return out;
}

inline double shannon_entropy_bits(const SymbolInventory& inv) {
  if (inv.total_frames == 0) throw Error("empty symbol inventory");
  double n = static_cast<double>(inv.total_frames);
  // Summing in sorted count order makes the result independent of symbol
  // enumeration order, so permuting frames cannot move the last ulp.
  std::vector<std::uint64_t> counts = inv.counts;
  std::sort(counts.begin(), counts.end());
  double h = 0;
  for (std::uint64_t c : counts) {
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h < 0 ? 0.0 : h;  // -0.0 from the single-symbol case
}

/// (frames per second) x Shannon entropy of the symbol inventory, bits/s.
inline double bitrate(const SymbolInventory& inv) {
  if (inv.total_frames == 0) throw Error("empty symbol inventory");
  if (!(inv.total_duration > 0)) throw Error("total duration must be positive");
  return static_cast<double>(inv.total_frames) / inv.total_duration * shannon_entropy_bits(inv);
}

/// Manifest rows: item_id duration_seconds.
inline std::map<std::string, double> parse_manifest(std::string_view text,
                                                    std::string_view source = "durations") {
  std::map<std::string, double> out;
  for (const Row& row : parse_table(text)) {
    if (row.fields.size() != 2)
      throw ParseError(source, row.line_no, "expected 2 columns (item_id duration_seconds)");
    double d = parse_double_token(row.fields[1], source, row.line_no);
    if (!(d > 0)) throw ParseError(source, row.line_no, "duration must be positive");
    if (!out.emplace(row.fields[0], d).second)
      throw ParseError(source, row.line_no, "duplicate item in manifest: " + row.fields[0]);
  }
  return out;
}

}  // namespace zrs

#endif  // ZRS_FEATURES_HPP
