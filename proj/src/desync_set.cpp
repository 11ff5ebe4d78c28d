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
#include "desync/desync_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "desync/error.hpp"

namespace desync {

Matrix gamma_matrix(const OscillatorParams& params) {
  params.validate();
  const std::size_t n = params.n_oscillators;
  const double a = 1.0 + params.coupling;
  Matrix g(n, n);
  g(0, 0) = 1.0;
  g(1, 1) = 2.0 + params.coupling;
  if (n > 2) g(1, 2) = -a;
  for (std::size_t r = 2; r < n; ++r) {
    g(r, 1) = a;
    g(r, r) = 1.0;
    if (r + 1 < n) g(r, r + 1) = -a;
  }
  return g;
}

std::vector<double> solve_sorted_anchor_elimination(const OscillatorParams& params) {
  const Matrix g = gamma_matrix(params);
  return solve_gaussian(g, std::vector<double>(params.n_oscillators, params.threshold));
}

std::vector<double> solve_sorted_anchor_closed_form(const OscillatorParams& params) {
  params.validate();
  const std::size_t n = params.n_oscillators;
  const double a = 1.0 + params.coupling;
  // partial[m] = sum_{i=0}^{m} a^i
  std::vector<double> partial(n);
  double power = 1.0;
  double acc = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    acc += power;
    partial[m] = acc;
    power *= a;
  }
  std::vector<double> anchor(n);
  for (std::size_t k = 0; k < n; ++k) anchor[k] = partial[n - 1 - k] / partial[n - 1] * params.threshold;
  anchor[0] = params.threshold;
  return anchor;
}

std::vector<double> solve_sorted_anchor_geometric(const OscillatorParams& params) {
  params.validate();
  const std::size_t n = params.n_oscillators;
  const double a = 1.0 + params.coupling;
  const double denom = std::pow(a, static_cast<double>(n)) - 1.0;
  std::vector<double> anchor(n);
  for (std::size_t k = 0; k < n; ++k)
    anchor[k] = (std::pow(a, static_cast<double>(n - k)) - 1.0) / denom * params.threshold;
  return anchor;
}

DesyncSet enumerate_anchors(const OscillatorParams& params) {
  params.validate();
  const std::size_t n = params.n_oscillators;
  if (n > kEnumerationCap)
    fail(ErrorCode::Capacity, "enumerate_anchors: N = " + std::to_string(n) +
                                  " exceeds the enumeration cap of " +
                                  std::to_string(kEnumerationCap) +
                                  "; use the rank-matching lyapunov_v_fast instead");
  const auto sorted = solve_sorted_anchor_elimination(params);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<AnchorPoint> anchors;
  do {
    AnchorPoint p;
    p.coords.resize(n);
    for (std::size_t r = 0; r < n; ++r) p.coords[perm[r]] = sorted[r];
    p.permutation = perm;
    anchors.push_back(std::move(p));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return DesyncSet(params, std::move(anchors));
}

double distance_to_line(std::span<const double> state, std::span<const double> anchor) {
  if (state.size() != anchor.size())
    fail(ErrorCode::InvalidArgument, "distance_to_line: dimension mismatch");
  const std::size_t n = state.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += anchor[i] - state[i];
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (anchor[i] - state[i]) - mean;
    acc += r * r;
  }
  return std::sqrt(acc);
}

double lyapunov_v(const TimerState& state, const DesyncSet& set) {
  require_dimension(state, set.params());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& anchor : set.anchors()) best = std::min(best, distance_to_line(state.view(), anchor.coords));
  return best;
}

double desync_condition_residual(const AnchorPoint& anchor, const OscillatorParams& params) {
  const TimerState pre(anchor.coords);
  const TimerState post = jump_map(pre, params, BranchPolicy::LowestIndexResets);
  const auto order = rank_order(pre);
  const std::size_t n = order.size();
  double worst = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t next = (i + 1 < n) ? i + 1 : 0;
    const double before = pre[order[0]] - pre[order[i]];
    const double after = post[order[1]] - post[order[next]];
    worst = std::max(worst, std::abs(before - after));
  }
  return worst;
}

LyapunovEvaluator::LyapunovEvaluator(const OscillatorParams& params)
    : sorted_anchor_(solve_sorted_anchor_closed_form(params)) {}

double LyapunovEvaluator::operator()(const TimerState& state) const {
  const std::size_t n = sorted_anchor_.size();
  if (state.size() != n) fail(ErrorCode::InvalidArgument, "lyapunov_v_fast: dimension mismatch");
  const auto order = rank_order(state);
  std::vector<double> line_point(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t shift = 0; shift < n; ++shift) {
    for (std::size_t r = 0; r < n; ++r) line_point[order[r]] = sorted_anchor_[(r + shift) % n];
    best = std::min(best, distance_to_line(state.view(), line_point));
  }
  return best;
}

double lyapunov_v_fast(const TimerState& state, const OscillatorParams& params) {
  return LyapunovEvaluator(params)(state);
}

}  // namespace desync
