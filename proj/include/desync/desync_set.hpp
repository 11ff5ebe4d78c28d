/*
 * Copyright 2026 The desync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// The desynchronization set: N! lines in direction 1 = (1, ..., 1), one per
// rank ordering of the timers, each passing through an anchor point on the
// jump set. The Lyapunov function V is the distance to the union of the
// (unclipped) lines.

#include <cstddef>
#include <span>
#include <vector>

#include "desync/linalg.hpp"
#include "desync/model.hpp"

namespace desync {

/// Largest N for which all N! anchors are materialized.
inline constexpr std::size_t kEnumerationCap = 8;

/// Coefficient matrix of the anchor equations for the sorted anchor.
Matrix gamma_matrix(const OscillatorParams& params);

/// Sorted (decreasing) anchor obtained by eliminating gamma_matrix against
/// threshold * 1.
std::vector<double> solve_sorted_anchor_elimination(const OscillatorParams& params);

/// Sorted anchor from the ratio of partial sums of powers of (1 + coupling).
std::vector<double> solve_sorted_anchor_closed_form(const OscillatorParams& params);

/// Same anchor written with the geometric-sum identity,
/// ((1+e)^(N-k+1) - 1) / ((1+e)^N - 1) * threshold.
std::vector<double> solve_sorted_anchor_geometric(const OscillatorParams& params);

struct AnchorPoint {
  std::vector<double> coords;
  /// permutation[r] is the index of the timer holding the r-th largest value.
  std::vector<std::size_t> permutation;

  bool operator==(const AnchorPoint&) const = default;
};

class DesyncSet {
 public:
  DesyncSet(OscillatorParams params, std::vector<AnchorPoint> anchors)
      : params_(std::move(params)), anchors_(std::move(anchors)) {}

  const OscillatorParams& params() const noexcept { return params_; }
  const std::vector<AnchorPoint>& anchors() const noexcept { return anchors_; }
  std::size_t size() const noexcept { return anchors_.size(); }

 private:
  OscillatorParams params_;
  std::vector<AnchorPoint> anchors_;
};

/// All N! anchors, permutations in lexicographic order. Throws
/// Error(Capacity) for N above kEnumerationCap; use lyapunov_v_fast there.
DesyncSet enumerate_anchors(const OscillatorParams& params);

/// Euclidean distance from `state` to the line {anchor + s 1 : s real}.
double distance_to_line(std::span<const double> state, std::span<const double> anchor);

/// Minimum distance to all enumerated lines.
double lyapunov_v(const TimerState& state, const DesyncSet& set);

/// Largest deviation from the desynchronization condition at an anchor:
/// leader-to-rank-i gaps must equal the post-jump gaps from the next leader.
double desync_condition_residual(const AnchorPoint& anchor, const OscillatorParams& params);

/// V without enumerating N! lines. The sorted anchor is laid over the
/// state's own rank order and rotated through the N leader assignments.
class LyapunovEvaluator {
 public:
  explicit LyapunovEvaluator(const OscillatorParams& params);

  double operator()(const TimerState& state) const;
  const std::vector<double>& sorted_anchor() const noexcept { return sorted_anchor_; }

 private:
  std::vector<double> sorted_anchor_;
};

double lyapunov_v_fast(const TimerState& state, const OscillatorParams& params);

}  // namespace desync
