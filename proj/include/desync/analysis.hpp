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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "desync/desync_set.hpp"
#include "desync/model.hpp"
#include "desync/perturbations.hpp"
#include "desync/simulator.hpp"

namespace desync {

/// Hybrid-time budget after which V <= c_to is guaranteed for solutions
/// starting with V <= c_from (and off the exclusion set).
struct ConvergenceBound {
  double c_from = 0.0;
  double c_to = 0.0;
  double bound_m = 0.0;
  /// Number of contractions by (1 + coupling) needed; integral when ceiled.
  double jumps_j = 0.0;
  bool ceiling_mode = false;
};

/// J = log(c2 / c1) / log(1 / (1 + coupling)), optionally ceiled, and
/// M = (threshold / rate + 1) * J. Throws Error(InvalidArgument) unless
/// 0 < c1 < c2.
ConvergenceBound convergence_time_bound(const OscillatorParams& params, double c2, double c1,
                                        bool ceiling_mode = false);

struct RobustnessBound {
  std::vector<double> delta_rates;
  double c_bar = 0.0;
  double asymptotic_distance = 0.0;
};

/// |(1/N 11^T - I) delta|: the component of the rate mismatch transverse to 1.
double flow_perturbation_cbar(const OscillatorParams& params, std::span<const double> delta_rates);

/// c_bar * threshold / (|coupling| * rate).
double asymptotic_distance_bound(const OscillatorParams& params, double c_bar);

/// B / |coupling| for an absolutely integrable drift with integral B.
double integrable_perturbation_bound(double b_integral, const OscillatorParams& params);

RobustnessBound robustness_bound(const OscillatorParams& params, std::span<const double> delta_rates);

/// sum_{i=m}^{n-1} x^i = (x^n - x^m) / (x - 1). Requires x != 1, n - 1 >= m.
double geometric_sum(double x, long m, long n);

/// sum_{k=m}^{N} sum_{i=0}^{N-k} x^i
///   = (x^(N-m+2) + (m-N-2) x + (N-m+1)) / (x-1)^2. Requires x != 1, N >= m.
double double_geometric_sum(double x, long m, long big_n);

/// Decomposition of V at the end of an arc into the contracted initial value
/// and the contracted flow increments:
///   V(end) = (1+e)^J V(0) + sum_i (1+e)^(J-i) * (V change during flow i).
/// Holds exactly when every jump contracts V by (1 + coupling).
struct SeriesDecomposition {
  double initial_term = 0.0;
  double series = 0.0;
  double predicted_final = 0.0;
  double actual_final = 0.0;
};

using LyapunovFn = std::function<double(const TimerState&)>;

SeriesDecomposition flow_increment_series(const HybridArc& arc, const LyapunovFn& v,
                                          const OscillatorParams& params);

/// Lower estimate of max V over the exclusion set inside the flow box, by
/// sampling equal-pair and zero/threshold configurations.
double exclusion_distance_estimate(const OscillatorParams& params, std::size_t samples,
                                   std::uint64_t seed);

struct VerificationOptions {
  PerturbationSpec perturbation;
  /// Target level; unset means 0.1 * V(initial).
  std::optional<double> c1;
  /// Starting level; unset means V(initial).
  std::optional<double> c2;
  bool ceiling_mode = true;
  double drift_tolerance = 1e-9;
  double ratio_tolerance = 1e-9;
  /// Jumps with V below this (relative to threshold) are too close to the set
  /// for a meaningful ratio.
  double ratio_floor = 1e-5;
  double steady_fraction = 0.2;
  double steady_slack = 1e-6;
};

struct JumpCheck {
  std::uint64_t j = 0;
  double t = 0.0;
  double v_before = 0.0;
  double v_after = 0.0;
  /// NaN when the jump was not evaluated (V below floor or pre-state in the
  /// exclusion set).
  double ratio = 0.0;
  double deviation = 0.0;
  bool evaluated = false;
};

struct VerificationReport {
  bool nominal = true;
  double v_initial = 0.0;
  double max_flow_drift = 0.0;
  std::vector<JumpCheck> jumps;
  std::size_t ratios_evaluated = 0;
  double max_ratio_deviation = 0.0;
  double expected_ratio = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double bound_m = 0.0;
  std::optional<double> crossing_time;
  bool bound_respected = true;
  bool ordering_applicable = false;
  bool ordering_preserved = true;
  double steady_state_v = 0.0;
  std::optional<double> steady_state_limit;

  double drift_tolerance = 0.0;
  double ratio_tolerance = 0.0;

  bool drift_ok() const { return !nominal || max_flow_drift <= drift_tolerance; }
  bool ratios_ok() const { return !nominal || max_ratio_deviation <= ratio_tolerance; }
  bool bound_ok() const { return !nominal || bound_respected; }
  bool ordering_ok() const { return !nominal || !ordering_applicable || ordering_preserved; }
  bool steady_ok() const { return !steady_state_limit || steady_state_v <= *steady_state_limit; }
  bool passed() const { return drift_ok() && ratios_ok() && bound_ok() && ordering_ok() && steady_ok(); }
};

VerificationReport verify_arc(const HybridArc& arc, const LyapunovFn& v, const OscillatorParams& params,
                              const VerificationOptions& options = {});
VerificationReport verify_arc(const HybridArc& arc, const DesyncSet& set, const OscillatorParams& params,
                              const VerificationOptions& options = {});

/// Max V over samples in the final `fraction` of the arc's flow time.
double steady_state_v(const HybridArc& arc, const LyapunovFn& v, double fraction = 0.2);

/// True when the timers' cyclic rank order after every N-th jump equals the
/// initial one.
bool ordering_preserved(const HybridArc& arc, std::size_t n_oscillators);

}  // namespace desync
