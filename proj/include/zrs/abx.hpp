// zrs/abx.hpp

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

#ifndef ZRS_ABX_HPP
#define ZRS_ABX_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "zrs/common.hpp"
#include "zrs/parallel.hpp"
#include "zrs/textio.hpp"

namespace zrs {

/// A pre-extracted triphone chunk: a center phone with its left/right context.
struct Item {
  std::string item_id;
  std::string prev, center, next;
  std::string speaker;
};

/// Item metadata rows: item_id prev center next speaker.
inline std::vector<Item> parse_items(std::string_view text, std::string_view source = "items") {
  std::vector<Item> items;
  for (const Row& row : parse_table(text)) {
    if (row.fields.size() != 5)
      throw ParseError(source, row.line_no, "expected 5 columns (item_id prev center next speaker)");
    items.push_back(Item{row.fields[0], row.fields[1], row.fields[2], row.fields[3], row.fields[4]});
  }
  return items;
}

/// One scoring cell. A and X hold tokens of phone_ax, B of phone_bx, in the
/// shared context; A and B are uttered by ab_speaker, X by x_speaker. The
/// swapped-phone cell (phone_ax <-> phone_bx) is a separate cell: the other
/// direction of the same minimal pair.
struct AbxCell {
  std::string prev, next;
  std::string phone_ax, phone_bx;
  std::string ab_speaker, x_speaker;
  std::vector<std::uint32_t> a, b, x;  // indices into the item list

  std::uint64_t triples() const {
    return static_cast<std::uint64_t>(a.size()) * b.size() * x.size();
  }
};

struct AbxTaskOptions {
  std::size_t max_tokens_per_role = 10;  // 0 = unlimited
  std::uint64_t seed = 0;
};

namespace detail {

/// Deterministic choice of k tokens, keyed by the cell identity so the result
/// does not depend on enumeration order or thread count.
inline void subsample_role(std::vector<std::uint32_t>& tokens, std::size_t cap, std::uint64_t cell_key,
                           std::uint64_t role_tag) {
  if (cap == 0 || tokens.size() <= cap) return;
  Rng rng(hash_mix(cell_key, role_tag));
  for (std::size_t i = 0; i < cap; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(tokens.size() - i));
    std::swap(tokens[i], tokens[j]);
  }
  tokens.resize(cap);
  std::sort(tokens.begin(), tokens.end());
}

}  // namespace detail

/// Enumerates every across-speaker cell: for each context, each unordered
/// center-phone pair, each ordered (ab_speaker, x_speaker) pair with distinct
/// speakers, and each direction, keep the cell iff all three roles have
/// tokens.
inline std::vector<AbxCell> build_task(std::span<const Item> items, const AbxTaskOptions& opt = {}) {
  using ContextKey = std::pair<std::string, std::string>;
  // context -> center -> speaker -> tokens
  std::map<ContextKey, std::map<std::string, std::map<std::string, std::vector<std::uint32_t>>>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    groups[{it.prev, it.next}][it.center][it.speaker].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<AbxCell> cells;
  for (const auto& [ctx, centers] : groups) {
    for (auto p1 = centers.begin(); p1 != centers.end(); ++p1) {
      for (auto p2 = std::next(p1); p2 != centers.end(); ++p2) {
        for (const auto& [spk_ab, ab_tokens_1] : p1->second) {
          auto ab_tokens_2 = p2->second.find(spk_ab);
          if (ab_tokens_2 == p2->second.end()) continue;  // ab_speaker needs both phones
          auto emit = [&](const std::string& phone_ax, const std::string& phone_bx,
                          const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                          const std::string& spk_x, const std::vector<std::uint32_t>& x) {
            AbxCell cell;
            cell.prev = ctx.first;
            cell.next = ctx.second;
            cell.phone_ax = phone_ax;
            cell.phone_bx = phone_bx;
            cell.ab_speaker = spk_ab;
            cell.x_speaker = spk_x;
            cell.a = a;
            cell.b = b;
            cell.x = x;
            cells.push_back(std::move(cell));
          };
          // Direction 1: A and X carry p1. X may be any other speaker with p1.
          for (const auto& [spk_x, x_tokens] : p1->second)
            if (spk_x != spk_ab) emit(p1->first, p2->first, ab_tokens_1, ab_tokens_2->second, spk_x, x_tokens);
          // Direction 2: A and X carry p2.
          for (const auto& [spk_x, x_tokens] : p2->second)
            if (spk_x != spk_ab) emit(p2->first, p1->first, ab_tokens_2->second, ab_tokens_1, spk_x, x_tokens);
        }
      }
    }
  }

  std::sort(cells.begin(), cells.end(), [](const AbxCell& l, const AbxCell& r) {
    return std::tie(l.prev, l.next, l.phone_ax, l.phone_bx, l.ab_speaker, l.x_speaker) <
           std::tie(r.prev, r.next, r.phone_ax, r.phone_bx, r.ab_speaker, r.x_speaker);
  });
  for (AbxCell& cell : cells) {
    std::uint64_t key = fnv1a(cell.prev, fnv1a(cell.next, fnv1a(cell.phone_ax,
                        fnv1a(cell.phone_bx, fnv1a(cell.ab_speaker, fnv1a(cell.x_speaker, opt.seed ^ 1469598103934665603ull))))));
    detail::subsample_role(cell.a, opt.max_tokens_per_role, key, 1);
    detail::subsample_role(cell.b, opt.max_tokens_per_role, key, 2);
    detail::subsample_role(cell.x, opt.max_tokens_per_role, key, 3);
  }
  if (cells.empty()) throw Error("task empty: no valid ABX cell (need two speakers sharing a context with two center phones)");
  return cells;
}

/// Probability that A is closer to X than B is, over the cell's token
/// triples; ties count one half.
template <class Dist>
inline double score_cell(const AbxCell& cell, Dist&& dist) {
  double sum = 0;
  std::uint64_t count = 0;
  for (std::uint32_t xi : cell.x) {
    for (std::uint32_t ai : cell.a) {
      double dax = dist(ai, xi);
      for (std::uint32_t bi : cell.b) {
        double dbx = dist(bi, xi);
        if (dax < dbx)
          sum += 1.0;
        else if (dax == dbx)
          sum += 0.5;
        ++count;
      }
    }
  }
  return sum / static_cast<double>(count);
}

template <class Dist>
inline std::vector<double> score_cells(std::span<const AbxCell> cells, Dist&& dist, std::size_t threads = 0) {
  std::vector<double> scores(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) { scores[i] = score_cell(cells[i], dist); });
  return scores;
}

struct AbxResult {
  double error_percent = 0;
  std::map<std::string, double> per_phone_pair;  // "p1-p2" -> error %
  std::map<std::string, double> per_context;     // "prev_next" -> error %
  std::uint64_t triplets = 0;
  std::uint64_t cells = 0;
};

/// Macro aggregation: mean over speaker pairs within (context, pair,
/// direction); mean over the available directions; mean over contexts within
/// a pair; mean over pairs.
inline AbxResult aggregate_error(std::span<const AbxCell> cells, std::span<const double> scores) {
  if (cells.empty()) throw Error("aggregate_error: no scored cells");
  if (cells.size() != scores.size()) throw Error("aggregate_error: size mismatch");

  struct Acc {
    double sum = 0;
    std::uint64_t n = 0;
    void add(double v) { sum += v; ++n; }
    double mean() const { return sum / static_cast<double>(n); }
  };
  using PairKey = std::pair<std::string, std::string>;          // unordered (min, max)
  using CtxKey = std::pair<std::string, std::string>;
  // (context, pair) -> direction -> mean over speaker pairs
  std::map<std::pair<CtxKey, PairKey>, std::map<std::string, Acc>> level1;

  AbxResult result;
  result.cells = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const AbxCell& c = cells[i];
    result.triplets += c.triples();
    PairKey pair = c.phone_ax < c.phone_bx ? PairKey{c.phone_ax, c.phone_bx} : PairKey{c.phone_bx, c.phone_ax};
    level1[{{c.prev, c.next}, pair}][c.phone_ax].add(scores[i]);
  }

  // pair -> context -> score
  std::map<PairKey, std::map<CtxKey, double>> by_pair;
  for (const auto& [key, directions] : level1) {
    double sum = 0;
    for (const auto& [_, acc] : directions) sum += acc.mean();
    by_pair[key.second][key.first] = sum / static_cast<double>(directions.size());
  }

  std::map<CtxKey, Acc> ctx_acc;
  double pair_sum = 0;
  for (const auto& [pair, contexts] : by_pair) {
    double s = 0;
    for (const auto& [ctx, score] : contexts) {
      s += score;
      ctx_acc[ctx].add(score);
    }
    s /= static_cast<double>(contexts.size());
    pair_sum += s;
    result.per_phone_pair[pair.first + "-" + pair.second] = 100.0 * (1.0 - s);
  }
  for (const auto& [ctx, acc] : ctx_acc)
    result.per_context[ctx.first + "_" + ctx.second] = 100.0 * (1.0 - acc.mean());
  result.error_percent = 100.0 * (1.0 - pair_sum / static_cast<double>(by_pair.size()));
  return result;
}

}  // namespace zrs

#endif  // ZRS_ABX_HPP
