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
#include "desync/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "desync/error.hpp"

namespace desync {

void OscillatorParams::validate() const {
  if (n_oscillators < 2) fail(ErrorCode::InvalidArgument, "n_oscillators: must be at least 2");
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    fail(ErrorCode::InvalidArgument, "threshold: must be a positive finite number");
  if (!(rate > 0.0) || !std::isfinite(rate))
    fail(ErrorCode::InvalidArgument, "rate: must be a positive finite number");
  if (!(coupling > -1.0 && coupling < 0.0))
    fail(ErrorCode::InvalidArgument, "coupling: must lie strictly inside (-1, 0)");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance))
    fail(ErrorCode::InvalidArgument, "tolerance: must be a nonnegative finite number");
}

std::string_view to_string(BranchPolicy policy) {
  switch (policy) {
    case BranchPolicy::AllReset:
      return "all-reset";
    case BranchPolicy::LowestIndexResets:
      return "lowest-index-resets";
    case BranchPolicy::Random:
      return "random";
  }
  return "lowest-index-resets";
}

BranchPolicy branch_policy_from_string(std::string_view name) {
  if (name == "all-reset") return BranchPolicy::AllReset;
  if (name == "lowest-index-resets") return BranchPolicy::LowestIndexResets;
  if (name == "random") return BranchPolicy::Random;
  fail(ErrorCode::InvalidArgument,
       "policy: unknown branch policy '" + std::string(name) +
           "' (expected all-reset, lowest-index-resets or random)");
}

BranchSelector::BranchSelector(BranchPolicy policy, std::uint64_t seed)
    : policy_(policy), rng_(seed) {}

std::vector<bool> BranchSelector::choose(std::size_t firing_count) {
  std::vector<bool> resets(firing_count, false);
  switch (policy_) {
    case BranchPolicy::AllReset:
      std::fill(resets.begin(), resets.end(), true);
      break;
    case BranchPolicy::LowestIndexResets:
      if (firing_count > 0) resets[0] = true;
      break;
    case BranchPolicy::Random:
      for (std::size_t k = 0; k < firing_count; ++k) resets[k] = (rng_() >> 63) != 0;
      break;
  }
  return resets;
}

JumpLaw JumpLaw::nominal(const OscillatorParams& params) {
  const std::size_t n = params.n_oscillators;
  return JumpLaw{std::vector<double>(n, params.threshold), std::vector<double>(n, 0.0),
                 std::vector<double>(n, params.coupling)};
}

void require_dimension(const TimerState& state, const OscillatorParams& params) {
  if (state.size() != params.n_oscillators)
    fail(ErrorCode::InvalidArgument, "state dimension " + std::to_string(state.size()) +
                                         " does not match n_oscillators " +
                                         std::to_string(params.n_oscillators));
}

std::vector<std::size_t> firing_indices(const TimerState& state, std::span<const double> thresholds,
                                        double tolerance) {
  std::vector<std::size_t> firing;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] >= thresholds[i] - tolerance) firing.push_back(i);
  return firing;
}

bool in_jump_set(const TimerState& state, const OscillatorParams& params) {
  require_dimension(state, params);
  return std::any_of(state.tau.begin(), state.tau.end(), [&](double v) {
    return std::abs(v - params.threshold) <= params.tolerance;
  });
}

JumpOutcome apply_jump_detailed(const TimerState& state, const JumpLaw& law, double tolerance,
                                BranchSelector& selector) {
  if (law.thresholds.size() != state.size() || law.reset_values.size() != state.size() ||
      law.couplings.size() != state.size())
    fail(ErrorCode::InvalidArgument, "jump law dimension does not match state");
  JumpOutcome out;
  out.firing = firing_indices(state, law.thresholds, tolerance);
  if (out.firing.empty()) fail(ErrorCode::Precondition, "jump requested off the jump set");

  out.state = state;
  for (std::size_t i = 0; i < state.size(); ++i) out.state[i] = (1.0 + law.couplings[i]) * state[i];

  if (out.firing.size() == 1) {
    out.resets = out.firing;
  } else {
    const auto choice = selector.choose(out.firing.size());
    for (std::size_t k = 0; k < out.firing.size(); ++k)
      if (choice[k]) out.resets.push_back(out.firing[k]);
  }
  for (std::size_t i : out.resets) out.state[i] = law.reset_values[i];
  return out;
}

TimerState apply_jump(const TimerState& state, const JumpLaw& law, double tolerance,
                      BranchSelector& selector) {
  return apply_jump_detailed(state, law, tolerance, selector).state;
}

TimerState jump_map(const TimerState& state, const OscillatorParams& params,
                    BranchSelector& selector) {
  require_dimension(state, params);
  if (!in_jump_set(state, params))
    fail(ErrorCode::Precondition, "jump_map: state is not in the jump set");
  return apply_jump(state, JumpLaw::nominal(params), params.tolerance, selector);
}

TimerState jump_map(const TimerState& state, const OscillatorParams& params, BranchPolicy policy) {
  BranchSelector selector(policy);
  return jump_map(state, params, selector);
}

bool in_exclusion_set(const TimerState& state, const OscillatorParams& params) {
  require_dimension(state, params);
  const double tol = params.tolerance;
  std::vector<double> sorted = state.tau;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] <= tol) return true;
  const bool has_zero = std::abs(sorted.front()) <= tol;
  const bool has_top = std::abs(sorted.back() - params.threshold) <= tol;
  return has_zero && has_top;
}

bool in_box(const TimerState& state, std::span<const double> upper, double tolerance) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!std::isfinite(state[i])) return false;
    if (state[i] < -tolerance || state[i] > upper[i] + tolerance) return false;
  }
  return true;
}

std::vector<std::size_t> rank_order(const TimerState& state) {
  std::vector<std::size_t> order(state.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return state[a] > state[b]; });
  return order;
}

std::vector<std::size_t> cyclic_rank_order(const TimerState& state) {
  auto order = rank_order(state);
  auto first = std::find(order.begin(), order.end(), std::size_t{0});
  std::rotate(order.begin(), first, order.end());
  return order;
}

}  // namespace desync
