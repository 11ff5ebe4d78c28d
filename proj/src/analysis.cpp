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
#include "desync/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "desync/error.hpp"
#include "desync/linalg.hpp"
#include "desync/sampling.hpp"

namespace desync {

ConvergenceBound convergence_time_bound(const OscillatorParams& params, double c2, double c1,
                                        bool ceiling_mode) {
  params.validate();
  if (!(c1 > 0.0) || !std::isfinite(c1)) fail(ErrorCode::InvalidArgument, "c1: must be positive");
  if (!(c2 > c1) || !std::isfinite(c2)) fail(ErrorCode::InvalidArgument, "c2: must exceed c1");
  ConvergenceBound b;
  b.c_from = c2;
  b.c_to = c1;
  b.ceiling_mode = ceiling_mode;
  b.jumps_j = std::log(c2 / c1) / std::log(1.0 / (1.0 + params.coupling));
  if (ceiling_mode) b.jumps_j = std::ceil(b.jumps_j);
  b.bound_m = (params.threshold / params.rate + 1.0) * b.jumps_j;
  return b;
}

double flow_perturbation_cbar(const OscillatorParams& params, std::span<const double> delta_rates) {
  if (delta_rates.size() != params.n_oscillators)
    fail(ErrorCode::InvalidArgument, "delta_rates: expected " +
                                         std::to_string(params.n_oscillators) + " entries");
  double mean = 0.0;
  for (double d : delta_rates) mean += d;
  mean /= static_cast<double>(delta_rates.size());
  std::vector<double> proj(delta_rates.size());
  for (std::size_t i = 0; i < proj.size(); ++i) proj[i] = mean - delta_rates[i];
  return norm2(proj);
}

double asymptotic_distance_bound(const OscillatorParams& params, double c_bar) {
  params.validate();
  if (!(c_bar >= 0.0)) fail(ErrorCode::InvalidArgument, "c_bar: must be nonnegative");
  return c_bar * params.threshold / (std::abs(params.coupling) * params.rate);
}

double integrable_perturbation_bound(double b_integral, const OscillatorParams& params) {
  params.validate();
  if (!(b_integral >= 0.0)) fail(ErrorCode::InvalidArgument, "B: must be nonnegative");
  return b_integral / std::abs(params.coupling);
}

RobustnessBound robustness_bound(const OscillatorParams& params, std::span<const double> delta_rates) {
  RobustnessBound r;
  r.delta_rates.assign(delta_rates.begin(), delta_rates.end());
  r.c_bar = flow_perturbation_cbar(params, delta_rates);
  r.asymptotic_distance = asymptotic_distance_bound(params, r.c_bar);
  return r;
}

double geometric_sum(double x, long m, long n) {
  if (x == 1.0) fail(ErrorCode::Domain, "geometric_sum: x = 1 is outside the closed form's domain");
  if (n - 1 < m) fail(ErrorCode::InvalidArgument, "geometric_sum: empty range");
  return (std::pow(x, static_cast<double>(n)) - std::pow(x, static_cast<double>(m))) / (x - 1.0);
}

double double_geometric_sum(double x, long m, long big_n) {
  if (x == 1.0) fail(ErrorCode::Domain, "double_geometric_sum: x = 1 is outside the closed form's domain");
  if (big_n < m) fail(ErrorCode::InvalidArgument, "double_geometric_sum: empty range");
  const double nm = static_cast<double>(big_n - m);
  return (std::pow(x, nm + 2.0) - (nm + 2.0) * x + (nm + 1.0)) / ((x - 1.0) * (x - 1.0));
}

SeriesDecomposition flow_increment_series(const HybridArc& arc, const LyapunovFn& v,
                                          const OscillatorParams& params) {
  if (arc.samples.empty()) fail(ErrorCode::InvalidArgument, "flow_increment_series: empty arc");
  const double a = 1.0 + params.coupling;
  const std::uint64_t big_j = arc.samples.back().time.j;

  // Increment of V across each flow interval: first and last sample with that j.
  std::vector<double> first(big_j + 1, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> last(big_j + 1, std::numeric_limits<double>::quiet_NaN());
  for (const auto& s : arc.samples) {
    const double val = v(s.state);
    if (std::isnan(first[s.time.j])) first[s.time.j] = val;
    last[s.time.j] = val;
  }
  SeriesDecomposition out;
  out.initial_term = std::pow(a, static_cast<double>(big_j)) * first[0];
  for (std::uint64_t i = 0; i <= big_j; ++i) {
    if (std::isnan(first[i])) continue;
    out.series += std::pow(a, static_cast<double>(big_j - i)) * (last[i] - first[i]);
  }
  out.predicted_final = out.initial_term + out.series;
  out.actual_final = last[big_j];
  return out;
}

double exclusion_distance_estimate(const OscillatorParams& params, std::size_t samples,
                                   std::uint64_t seed) {
  params.validate();
  const std::size_t n = params.n_oscillators;
  const double top = params.threshold;
  LyapunovEvaluator v(params);
  std::mt19937_64 rng(seed);
  double best = 0.0;
  auto consider = [&](const TimerState& s) { best = std::max(best, v(s)); };

  // Structured corners: all equal, and 0/threshold splits.
  for (double level : {0.0, 0.5 * top, top}) consider(TimerState(std::vector<double>(n, level)));
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> s(n, 0.0);
    std::fill(s.begin(), s.begin() + static_cast<long>(k), top);
    consider(TimerState(s));
  }

  for (std::size_t draw = 0; draw < samples; ++draw) {
    std::vector<double> s(n);
    for (auto& x : s) x = top * uniform01(rng);
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    std::size_t k = static_cast<std::size_t>(rng() % (n - 1));
    if (k >= i) ++k;
    if (draw % 2 == 0) {
      s[k] = s[i];
    } else {
      s[i] = 0.0;
      s[k] = top;
    }
    consider(TimerState(s));
  }
  return best;
}

double steady_state_v(const HybridArc& arc, const LyapunovFn& v, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    fail(ErrorCode::InvalidArgument, "steady_fraction: must lie in (0, 1]");
  if (arc.samples.empty()) return 0.0;
  const double start = (1.0 - fraction) * arc.samples.back().time.t;
  double worst = 0.0;
  for (const auto& s : arc.samples)
    if (s.time.t >= start) worst = std::max(worst, v(s.state));
  return worst;
}

bool ordering_preserved(const HybridArc& arc, std::size_t n_oscillators) {
  if (arc.samples.empty()) return true;
  const auto reference = cyclic_rank_order(arc.samples.front().state);
  for (const auto& rec : arc.jumps)
    if (rec.time.j % n_oscillators == 0 && cyclic_rank_order(rec.post) != reference) return false;
  return true;
}

VerificationReport verify_arc(const HybridArc& arc, const LyapunovFn& v, const OscillatorParams& params,
                              const VerificationOptions& options) {
  params.validate();
  options.perturbation.validate(params);
  if (arc.samples.empty()) fail(ErrorCode::InvalidArgument, "verify_arc: empty arc");

  VerificationReport r;
  r.nominal = options.perturbation.kind == PerturbationKind::None;
  r.drift_tolerance = options.drift_tolerance;
  r.ratio_tolerance = options.ratio_tolerance;
  r.expected_ratio = 1.0 + params.coupling;

  std::vector<double> vs(arc.samples.size());
  for (std::size_t k = 0; k < vs.size(); ++k) vs[k] = v(arc.samples[k].state);
  r.v_initial = vs.front();

  // Flow drift relative to the first sample of each flow interval.
  double anchor_v = vs.front();
  for (std::size_t k = 1; k < vs.size(); ++k) {
    if (arc.samples[k].time.j != arc.samples[k - 1].time.j) {
      anchor_v = vs[k];
      continue;
    }
    r.max_flow_drift = std::max(r.max_flow_drift, std::abs(vs[k] - anchor_v));
  }

  const double floor = options.ratio_floor * params.threshold;
  for (const auto& rec : arc.jumps) {
    JumpCheck c;
    c.j = rec.time.j;
    c.t = rec.time.t;
    c.v_before = v(rec.pre);
    c.v_after = v(rec.post);
    c.ratio = std::numeric_limits<double>::quiet_NaN();
    if (c.v_before >= floor && !in_exclusion_set(rec.pre, params)) {
      c.evaluated = true;
      c.ratio = c.v_after / c.v_before;
      c.deviation = std::abs(c.ratio - r.expected_ratio) / r.expected_ratio;
      r.max_ratio_deviation = std::max(r.max_ratio_deviation, c.deviation);
      ++r.ratios_evaluated;
    }
    r.jumps.push_back(c);
  }

  r.c2 = options.c2.value_or(r.v_initial);
  r.c1 = options.c1.value_or(0.1 * r.v_initial);
  if (r.c1 > 0.0 && r.c2 > r.c1)
    r.bound_m = convergence_time_bound(params, r.c2, r.c1, options.ceiling_mode).bound_m;
  const double slack = r.c1 * 1e-12 + 1e-15;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const double tj = arc.samples[k].time.t + static_cast<double>(arc.samples[k].time.j);
    if (!r.crossing_time && vs[k] <= r.c1) r.crossing_time = tj;
    // Only meaningful when the arc starts inside the c2 level set.
    if (tj >= r.bound_m && r.v_initial <= r.c2 + slack && vs[k] > r.c1 + slack) r.bound_respected = false;
  }
  if (in_exclusion_set(arc.samples.front().state, params)) r.bound_respected = true;

  r.ordering_applicable = !in_exclusion_set(arc.samples.front().state, params);
  r.ordering_preserved = ordering_preserved(arc, params.n_oscillators);

  r.steady_state_v = steady_state_v(arc, v, options.steady_fraction);
  if (options.perturbation.kind == PerturbationKind::FlowRate) {
    const double cbar = flow_perturbation_cbar(params, options.perturbation.magnitudes);
    r.steady_state_limit = asymptotic_distance_bound(params, cbar) + options.steady_slack;
  }
  return r;
}

VerificationReport verify_arc(const HybridArc& arc, const DesyncSet& set, const OscillatorParams& params,
                              const VerificationOptions& options) {
  return verify_arc(arc, LyapunovFn([&set](const TimerState& s) { return lyapunov_v(s, set); }), params,
                    options);
}

}  // namespace desync
