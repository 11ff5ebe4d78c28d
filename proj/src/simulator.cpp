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
#include "desync/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "desync/error.hpp"

namespace desync {

namespace {

TimerState advance(const TimerState& state, std::span<const double> rates, double dt) {
  TimerState next(state.tau);
  for (std::size_t i = 0; i < next.size(); ++i) next[i] = state[i] + rates[i] * dt;
  return next;
}

std::string join_indices(const std::vector<std::size_t>& idx) {
  std::string out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) out += ';';
    out += std::to_string(idx[k] + 1);
  }
  return out;
}

}  // namespace

void StopCriteria::validate() const {
  if (std::isnan(max_flow_time) || max_flow_time <= 0.0)
    fail(ErrorCode::InvalidArgument, "stop.max_flow_time: must be positive");
  if (max_jumps == 0) fail(ErrorCode::InvalidArgument, "stop.max_jumps: must be positive");
  if (std::isinf(max_flow_time) && !has_jump_limit())
    fail(ErrorCode::InvalidArgument, "stop: at least one of max_flow_time and max_jumps must be finite");
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

NextJump time_to_next_jump(const TimerState& state, std::span<const double> rates,
                           std::span<const double> thresholds, double tolerance) {
  const std::size_t n = state.size();
  if (rates.size() != n || thresholds.size() != n)
    fail(ErrorCode::InvalidArgument, "time_to_next_jump: dimension mismatch");
  std::vector<double> arrival(n);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rates[i] > 0.0))
      fail(ErrorCode::InvalidArgument, "time_to_next_jump: rate " + std::to_string(i + 1) +
                                           " must be positive");
    arrival[i] = std::max(0.0, (thresholds[i] - state[i]) / rates[i]);
    best = std::min(best, arrival[i]);
  }
  NextJump next{best, {}};
  for (std::size_t i = 0; i < n; ++i)
    if (arrival[i] - best <= tolerance / rates[i]) next.indices.push_back(i);
  return next;
}

HybridArc simulate(const OscillatorParams& params, const PerturbationSpec& perturbation,
                   const TimerState& initial, const StopCriteria& stop,
                   const SimulationOptions& options) {
  params.validate();
  perturbation.validate(params);
  stop.validate();
  require_dimension(initial, params);

  const auto thresholds = effective_thresholds(perturbation, params);
  const auto rates = effective_rates(perturbation, params);
  const JumpLaw law = jump_law(perturbation, params);
  const double tol = params.tolerance;
  const std::size_t n = params.n_oscillators;

  if (!in_box(initial, thresholds, tol))
    fail(ErrorCode::Domain, "simulate: initial state lies outside the flow and jump sets");
  const double step = options.sample_interval.value_or(params.threshold / (50.0 * params.rate));
  if (!(step >= 0.0) || !std::isfinite(step))
    fail(ErrorCode::InvalidArgument, "sample_interval: must be a nonnegative finite number");

  BranchSelector selector(options.policy, options.seed);
  HybridArc arc;
  double t = 0.0;
  std::uint64_t j = 0;
  TimerState state = initial;
  arc.samples.push_back({{t, j}, state});

  std::size_t zero_flow_jumps = 0;
  bool flowed_since_jump = false;

  while (j < stop.max_jumps) {
    if (!firing_indices(state, thresholds, tol).empty()) {
      zero_flow_jumps = flowed_since_jump ? 1 : zero_flow_jumps + 1;
      flowed_since_jump = false;
      if (zero_flow_jumps > n) {
        arc.aborted = true;
        arc.diagnostic = "Zeno guard: more than " + std::to_string(n) +
                         " consecutive jumps without flow at t = " + format_real(t);
        break;
      }
      auto outcome = apply_jump_detailed(state, law, tol, selector);
      ++j;
      arc.jumps.push_back({{t, j}, std::move(outcome.firing), std::move(outcome.resets), state,
                           outcome.state});
      state = std::move(outcome.state);
      arc.samples.push_back({{t, j}, state});
      continue;
    }

    if (t >= stop.max_flow_time) break;
    const NextJump next = time_to_next_jump(state, rates, thresholds, tol);
    double t_end = t + next.dt;
    const bool reaches_threshold = t_end <= stop.max_flow_time;
    if (!reaches_threshold) t_end = stop.max_flow_time;

    if (step > 0.0) {
      for (double k = std::floor(t / step) + 1.0;; k += 1.0) {
        const double s = k * step;
        if (s >= t_end) break;
        if (s <= t) continue;
        arc.samples.push_back({{s, j}, advance(state, rates, s - t)});
      }
    }
    TimerState landed = advance(state, rates, t_end - t);
    if (reaches_threshold)
      for (std::size_t i : next.indices) landed[i] = thresholds[i];
    if (t_end > t) flowed_since_jump = true;
    t = t_end;
    state = std::move(landed);
    arc.samples.push_back({{t, j}, state});
    if (!reaches_threshold) break;
  }
  return arc;
}

std::vector<double> interjump_gaps(const HybridArc& arc, std::size_t oscillator) {
  std::vector<double> times;
  for (const auto& rec : arc.jumps)
    if (std::find(rec.resets.begin(), rec.resets.end(), oscillator) != rec.resets.end())
      times.push_back(rec.time.t);
  std::vector<double> gaps;
  for (std::size_t k = 1; k < times.size(); ++k) gaps.push_back(times[k] - times[k - 1]);
  return gaps;
}

std::vector<double> firing_separations(const HybridArc& arc) {
  std::vector<double> gaps;
  for (std::size_t k = 1; k < arc.jumps.size(); ++k)
    gaps.push_back(arc.jumps[k].time.t - arc.jumps[k - 1].time.t);
  return gaps;
}

TimerState state_at(const HybridArc& arc, HybridTime when) {
  const ArcSample* before = nullptr;
  for (const auto& s : arc.samples) {
    if (s.time.j != when.j) continue;
    if (s.time.t == when.t) return s.state;
    if (s.time.t < when.t) {
      before = &s;
      continue;
    }
    if (before == nullptr) break;
    const double w = (when.t - before->time.t) / (s.time.t - before->time.t);
    TimerState out(before->state.tau);
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = before->state[i] + w * (s.state[i] - before->state[i]);
    return out;
  }
  fail(ErrorCode::Domain, "state_at: (" + format_real(when.t) + ", " + std::to_string(when.j) +
                              ") is not in the arc's hybrid time domain");
}

void write_arc_csv(std::ostream& out, const HybridArc& arc, const LyapunovEvaluator& v) {
  const std::size_t n = arc.samples.empty() ? 0 : arc.samples.front().state.size();
  out << "t,j";
  for (std::size_t i = 1; i <= n; ++i) out << ",tau_" << i;
  out << ",V\n";
  for (const auto& s : arc.samples) {
    out << format_real(s.time.t) << ',' << s.time.j;
    for (double x : s.state.tau) out << ',' << format_real(x);
    out << ',' << format_real(v(s.state)) << '\n';
  }
}

void write_jumps_csv(std::ostream& out, const HybridArc& arc) {
  const std::size_t n = arc.samples.empty() ? 0 : arc.samples.front().state.size();
  out << "t,j,fired,reset";
  for (std::size_t i = 1; i <= n; ++i) out << ",pre_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",post_" << i;
  out << '\n';
  for (const auto& rec : arc.jumps) {
    out << format_real(rec.time.t) << ',' << rec.time.j << ',' << join_indices(rec.firing) << ','
        << join_indices(rec.resets);
    for (double x : rec.pre.tau) out << ',' << format_real(x);
    for (double x : rec.post.tau) out << ',' << format_real(x);
    out << '\n';
  }
}

}  // namespace desync
