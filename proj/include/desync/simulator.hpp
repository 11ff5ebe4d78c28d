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

// Event-driven simulation. Flows are affine (constant rates), so the time to
// the next threshold crossing is computed in closed form; no ODE stepping.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "desync/desync_set.hpp"
#include "desync/model.hpp"
#include "desync/perturbations.hpp"

namespace desync {

struct StopCriteria {
  double max_flow_time = std::numeric_limits<double>::infinity();
  std::uint64_t max_jumps = std::numeric_limits<std::uint64_t>::max();

  static StopCriteria flow_time(double t) { return {t, std::numeric_limits<std::uint64_t>::max()}; }
  static StopCriteria jumps(std::uint64_t j) { return {std::numeric_limits<double>::infinity(), j}; }

  bool has_jump_limit() const noexcept { return max_jumps != std::numeric_limits<std::uint64_t>::max(); }
  void validate() const;

  bool operator==(const StopCriteria&) const = default;
};

struct ArcSample {
  HybridTime time;
  TimerState state;
};

struct JumpRecord {
  /// Hybrid time right after the jump; the jump leaves (t, j - 1).
  HybridTime time;
  std::vector<std::size_t> firing;
  std::vector<std::size_t> resets;
  TimerState pre;
  TimerState post;
};

struct HybridArc {
  std::vector<ArcSample> samples;
  std::vector<JumpRecord> jumps;
  /// Set when the Zeno guard stopped the arc.
  bool aborted = false;
  std::string diagnostic;

  HybridTime end_time() const { return samples.empty() ? HybridTime{} : samples.back().time; }
};

struct SimulationOptions {
  BranchPolicy policy = BranchPolicy::LowestIndexResets;
  std::uint64_t seed = 0;
  /// Uniform flow-sampling step. Unset means threshold / (50 rate); 0 records
  /// jump boundaries only.
  std::optional<double> sample_interval;
};

struct NextJump {
  double dt = 0.0;
  std::vector<std::size_t> indices;
};

/// Time until the first timer reaches its threshold and the indices that
/// arrive together (within tolerance). Throws Error(InvalidArgument) for a
/// nonpositive rate.
NextJump time_to_next_jump(const TimerState& state, std::span<const double> rates,
                           std::span<const double> thresholds, double tolerance);

/// Throws Error(Domain) if `initial` lies outside the effective flow box.
HybridArc simulate(const OscillatorParams& params, const PerturbationSpec& perturbation,
                   const TimerState& initial, const StopCriteria& stop,
                   const SimulationOptions& options = {});

/// Successive differences of the times at which `oscillator` reset.
std::vector<double> interjump_gaps(const HybridArc& arc, std::size_t oscillator);

/// Differences between consecutive jump instants (any oscillator).
std::vector<double> firing_separations(const HybridArc& arc);

/// State at a hybrid time inside the arc's domain (affine interpolation
/// within the flow interval of jump count j). Throws Error(Domain) otherwise.
TimerState state_at(const HybridArc& arc, HybridTime when);

/// `t,j,tau_1..tau_N,V`, one row per sample, 17 significant digits.
void write_arc_csv(std::ostream& out, const HybridArc& arc, const LyapunovEvaluator& v);
/// `t,j,fired,reset,pre_1..pre_N,post_1..post_N`; j is the post-jump counter.
void write_jumps_csv(std::ostream& out, const HybridArc& arc);

/// Decimal rendering used by every CSV writer ("%.17g").
std::string format_real(double value);

}  // namespace desync
