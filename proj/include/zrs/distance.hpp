// zrs/distance.hpp

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

#ifndef ZRS_DISTANCE_HPP
#define ZRS_DISTANCE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "zrs/common.hpp"
#include "zrs/features.hpp"

namespace zrs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSklFloor = 1e-10;

enum class FrameMetricKind { angle, symmetrized_kl };

/// Arc cosine of the normalized dot product, in [0, pi]. A zero vector has no
/// direction; its angle to anything is defined as pi/2 and counted as a
/// warning.
inline double frame_angle(std::span<const double> u, std::span<const double> v,
                          WarningCounters* warnings = nullptr) {
  if (u.size() != v.size()) throw Error("frame_angle: dimension mismatch");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) {
    if (warnings) warnings->zero_vectors.fetch_add(1, std::memory_order_relaxed);
    return kPi / 2;
  }
  double c = dot / std::sqrt(nu * nv);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

/// Symmetrized KL divergence with base-2 logs. Inputs are treated as
/// unnormalized distributions: components below kSklFloor are floored, then
/// each vector is renormalized to sum 1.
inline double frame_skl(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("frame_skl: dimension mismatch");
  if (u.empty()) throw Error("frame_skl: empty vector");
  double su = 0, sv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0 || v[i] < 0) throw Error("frame_skl requires nonnegative components");
    su += std::max(u[i], kSklFloor);
    sv += std::max(v[i], kSklFloor);
  }
  double kl_uv = 0, kl_vu = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double p = std::max(u[i], kSklFloor) / su;
    double q = std::max(v[i], kSklFloor) / sv;
    kl_uv += p * std::log2(p / q);
    kl_vu += q * std::log2(q / p);
  }
  double d = 0.5 * kl_uv + 0.5 * kl_vu;
  return d < 0 ? 0.0 : d;
}

namespace detail {

/// All-zero vectors pass the nonnegativity check but carry no mass at all;
/// reject them before flooring hides the problem.
inline void check_not_all_zero(std::span<const double> u) {
  for (double x : u)
    if (x != 0) return;
  throw Error("frame_skl: all-zero vector");
}

}  // namespace detail

struct DtwOptions {
  // Sakoe-Chiba corridor half-width in frames; widened automatically to keep
  // the end cell reachable. nullopt = unconstrained.
  std::optional<std::size_t> band;
};

/// Average frame distance along the best monotone alignment path: the
/// minimum over paths (steps (1,0),(0,1),(1,1), endpoints anchored) of the
/// path's summed frame distance divided by its number of aligned pairs.
///
/// Minimizing the ratio itself, rather than normalizing the min-sum path,
/// makes the result independent of tie-breaking. The DP layers over path
/// length: every step visits exactly one new cell, so a length-l prefix ending
/// at (i,j) extends only length-(l-1) prefixes.
template <class FrameDist>
inline double dtw_distance(const FrameSequence& a, const FrameSequence& b, FrameDist&& dist,
                           const DtwOptions& opt = {}) {
  const std::size_t m = a.frames(), n = b.frames();
  if (m == 0 || n == 0) throw Error("dtw_distance: empty sequence");
  const double inf = std::numeric_limits<double>::infinity();

  std::size_t band = n + m;
  if (opt.band) band = std::max(*opt.band, m > n ? m - n : n - m);
  auto in_band = [&](std::size_t i, std::size_t j) {
    double center = m == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(m - 1);
    return std::abs(static_cast<double>(j) - center) <= static_cast<double>(band);
  };

  std::vector<double> cost(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cost[i * n + j] = in_band(i, j) ? dist(a.frame(i), b.frame(j)) : inf;

  std::vector<double> prev(m * n, inf), cur(m * n, inf);
  prev[0] = cost[0];
  if (m == 1 && n == 1) return prev[0];

  const std::size_t max_len = m + n - 1;
  double best = inf;
  for (std::size_t l = 2; l <= max_len; ++l) {
    std::fill(cur.begin(), cur.end(), inf);
    // Reachable cells at path length l: max(i, j) + 1 <= l <= i + j + 1.
    for (std::size_t i = 0; i < m; ++i) {
      if (i + 1 > l) break;
      const std::size_t j_begin = l > i + 1 ? std::min(l - i - 1, n) : 0;
      const std::size_t j_end = std::min(n, l);
      for (std::size_t j = j_begin; j < j_end; ++j) {
        if (i == 0 && j == 0) continue;
        double c = cost[i * n + j];
        if (c == inf) continue;
        double from = inf;
        if (i > 0) from = std::min(from, prev[(i - 1) * n + j]);
        if (j > 0) from = std::min(from, prev[i * n + j - 1]);
        if (i > 0 && j > 0) from = std::min(from, prev[(i - 1) * n + j - 1]);
        if (from < inf) cur[i * n + j] = from + c;
      }
    }
    double end = cur[(m - 1) * n + n - 1];
    if (end < inf) best = std::min(best, end / static_cast<double>(l));
    std::swap(prev, cur);
  }
  if (best == inf) throw Error("dtw_distance: no admissible path (band too narrow)");
  return best;
}

inline double dtw_distance(const FrameSequence& a, const FrameSequence& b, FrameMetricKind kind,
                           WarningCounters* warnings = nullptr, const DtwOptions& opt = {}) {
  if (kind == FrameMetricKind::angle)
    return dtw_distance(a, b,
                        [warnings](std::span<const double> u, std::span<const double> v) {
                          return frame_angle(u, v, warnings);
                        },
                        opt);
  for (std::size_t i = 0; i < a.frames(); ++i) detail::check_not_all_zero(a.frame(i));
  for (std::size_t i = 0; i < b.frames(); ++i) detail::check_not_all_zero(b.frame(i));
  return dtw_distance(
      a, b, [](std::span<const double> u, std::span<const double> v) { return frame_skl(u, v); }, opt);
}

/// Levenshtein distance with unit insert/delete/substitute costs.
template <class T>
inline std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() > b.size()) return edit_distance(b, a);
  std::vector<std::size_t> row(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      diag = row[i];
      row[i] = std::min({row[i] + 1, row[i - 1] + 1, sub});
    }
  }
  return row[a.size()];
}

template <class T>
inline std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b) {
  return edit_distance(std::span<const T>(a), std::span<const T>(b));
}

}  // namespace zrs

#endif  // ZRS_DISTANCE_HPP
