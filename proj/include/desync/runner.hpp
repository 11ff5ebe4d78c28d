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

// Experiment drivers behind the CLI subcommands. File-producing drivers write
// into config.outputs.directory (created if missing) and return the paths
// they wrote; text-producing drivers hand their output to a sink.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desync/analysis.hpp"
#include "desync/config.hpp"

namespace desync {

using TextSink = std::function<void(std::string_view)>;

/// Explicit state, or `count` seeded uniform draws from the effective flow
/// box (rejecting exclusion-set states when avoid_exclusion is set).
std::vector<TimerState> initial_states(const RunConfig& config);

/// Branch-selection seed of run k.
SimulationOptions simulation_options(const RunConfig& config, std::size_t run);

HybridArc simulate_run(const RunConfig& config, const TimerState& initial, std::size_t run);

/// arc.csv and/or jumps.csv for the first initial state.
std::vector<std::string> run_single(const RunConfig& config);

struct BatchRow {
  std::size_t run = 0;
  double v0 = 0.0;
  double steady_v = 0.0;
  double c1 = 0.0;
  std::optional<double> crossing;
  double bound_m = 0.0;
};

struct BatchResult {
  std::vector<BatchRow> rows;
  std::vector<std::string> files;
};

/// dist_<k>.csv (t,j,V) per run plus summary.csv. Runs execute on
/// `threads` workers (0 = hardware concurrency); output is independent of it.
BatchResult run_batch(const RunConfig& config, unsigned threads = 0);

struct Fig4Row {
  double eps = 0.0;
  double c1 = 0.0;
  /// M / (threshold / rate + 1), i.e. the uncapped jump count J.
  double m_normalized = 0.0;
};

std::vector<Fig4Row> fig4_table(const OscillatorParams& params, const Fig4Spec& spec);
/// fig4.csv (eps, c1, m_normalized). Requires config.fig4.
std::vector<std::string> run_fig4(const RunConfig& config);

/// Anchors as CSV, one row per permutation (tau_1..tau_N).
void print_desync_set(const RunConfig& config, const TextSink& out);

/// Convergence and robustness bounds as key=value lines.
void print_bounds(const RunConfig& config, const TextSink& out);

/// Verification report CSV (run,check,value,limit,pass) over every initial
/// state. Returns true when every run passes.
bool run_verify(const RunConfig& config, const TextSink& out, unsigned threads = 0);

}  // namespace desync
