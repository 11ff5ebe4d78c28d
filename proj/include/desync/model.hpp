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

// State, parameters and data (C, f, D, G) of a network of impulse-coupled
// oscillators. Every timer grows at rate omega on [0, threshold]; when one
// timer reaches the threshold it resets to zero and every other timer is
// scaled by (1 + coupling).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace desync {

inline constexpr double kDefaultTolerance = 1e-9;

struct OscillatorParams {
  std::size_t n_oscillators = 2;
  double threshold = 1.0;
  double rate = 1.0;
  double coupling = -0.2;
  /// Absolute band used for every set-membership test (tau_i == threshold,
  /// tau_i == tau_r, tau_i == 0).
  double tolerance = kDefaultTolerance;

  /// Throws Error(InvalidArgument) naming the offending field.
  void validate() const;

  bool operator==(const OscillatorParams&) const = default;
};

struct TimerState {
  std::vector<double> tau;

  TimerState() = default;
  explicit TimerState(std::vector<double> values) : tau(std::move(values)) {}
  TimerState(std::initializer_list<double> values) : tau(values) {}

  std::size_t size() const noexcept { return tau.size(); }
  double& operator[](std::size_t i) { return tau[i]; }
  double operator[](std::size_t i) const { return tau[i]; }
  std::span<const double> view() const noexcept { return tau; }

  bool operator==(const TimerState&) const = default;
};

/// Point of a hybrid time domain: flow time t and jump counter j.
struct HybridTime {
  double t = 0.0;
  std::uint64_t j = 0;

  std::partial_ordering operator<=>(const HybridTime& other) const {
    if (auto c = t <=> other.t; c != 0) return c;
    return j <=> other.j;
  }
  bool operator==(const HybridTime&) const = default;
};

/// Selection rule for the set-valued jump when several timers sit at the
/// threshold at once: each such timer may reset or be bumped.
enum class BranchPolicy {
  AllReset,
  LowestIndexResets,
  Random,
};

std::string_view to_string(BranchPolicy policy);
BranchPolicy branch_policy_from_string(std::string_view name);

class BranchSelector {
 public:
  explicit BranchSelector(BranchPolicy policy = BranchPolicy::LowestIndexResets,
                          std::uint64_t seed = 0);

  BranchPolicy policy() const noexcept { return policy_; }

  /// One flag per simultaneously firing timer (in index order); true means
  /// the timer resets, false means it takes the bump branch.
  std::vector<bool> choose(std::size_t firing_count);

 private:
  BranchPolicy policy_;
  std::mt19937_64 rng_;
};

/// Per-timer jump data. The nominal law has thresholds = threshold,
/// reset values = 0 and couplings = coupling for every timer; the perturbation
/// families only change these vectors.
struct JumpLaw {
  std::vector<double> thresholds;
  std::vector<double> reset_values;
  std::vector<double> couplings;

  static JumpLaw nominal(const OscillatorParams& params);
};

/// Indices whose timer is at (or beyond) its threshold within tolerance.
std::vector<std::size_t> firing_indices(const TimerState& state, std::span<const double> thresholds,
                                        double tolerance);

bool in_jump_set(const TimerState& state, const OscillatorParams& params);

/// Nominal jump map. Precondition: in_jump_set(state, params).
TimerState jump_map(const TimerState& state, const OscillatorParams& params,
                    BranchSelector& selector);
TimerState jump_map(const TimerState& state, const OscillatorParams& params,
                    BranchPolicy policy = BranchPolicy::LowestIndexResets);

struct JumpOutcome {
  TimerState state;
  std::vector<std::size_t> firing;
  /// Subset of `firing` that took the reset branch.
  std::vector<std::size_t> resets;
};

/// Jump under an arbitrary per-timer law. Precondition: some timer fires.
JumpOutcome apply_jump_detailed(const TimerState& state, const JumpLaw& law, double tolerance,
                                BranchSelector& selector);
TimerState apply_jump(const TimerState& state, const JumpLaw& law, double tolerance,
                      BranchSelector& selector);

/// Membership in the exclusion set: two equal timers, or one timer at zero
/// while another sits at the threshold.
bool in_exclusion_set(const TimerState& state, const OscillatorParams& params);

/// True when every entry lies in [0, upper_i] up to tolerance.
bool in_box(const TimerState& state, std::span<const double> upper, double tolerance);

/// Indices ordered by decreasing timer value; ties keep index order.
std::vector<std::size_t> rank_order(const TimerState& state);

/// Rank order rotated so that index 0 comes first; equal for two states iff
/// their timers have the same cyclic ordering.
std::vector<std::size_t> cyclic_rank_order(const TimerState& state);

void require_dimension(const TimerState& state, const OscillatorParams& params);

}  // namespace desync
