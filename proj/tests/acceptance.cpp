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
// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "desync/analysis.hpp"
#include "desync/runner.hpp"
#include "desync/sampling.hpp"
#include "oracles.hpp"

using namespace desync;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("desync_acceptance_" + name);
  fs::remove_all(d);
  return d;
}

// Max V over every flow interval that reaches hybrid time t + j >= m.
double worst_after(const HybridArc& arc, const LyapunovEvaluator& v, double m) {
  double worst = 0.0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= arc.samples.size(); ++k) {
    const bool boundary = k == arc.samples.size() || arc.samples[k].time.j != arc.samples[start].time.j;
    if (!boundary) continue;
    const auto& last = arc.samples[k - 1].time;
    if (last.t + static_cast<double>(last.j) >= m)
      for (std::size_t s = start; s < k; ++s) worst = std::max(worst, v(arc.samples[s].state));
    start = k;
  }
  return worst;
}

std::vector<double> read_column(const fs::path& file, std::size_t column) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    for (std::size_t c = 0; c <= column; ++c) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

// 1. Elimination and closed-form anchors agree; every anchor desynchronizes.
Outcome anchors() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rel = 0.0, worst_res = 0.0;
  for (std::size_t n = 2; n <= 8; ++n)
    for (double e : {-0.9, -0.7, -0.5, -0.3, -0.1})
      for (double top : {1.0, 3.0}) {
        const OscillatorParams p{n, top, 1.0, e};
        const auto a = solve_sorted_anchor_elimination(p);
        const auto b = solve_sorted_anchor_closed_form(p);
        for (std::size_t k = 0; k < n; ++k) worst_rel = std::max(worst_rel, oracle::rel_err(a[k], b[k]));
        const DesyncSet set = enumerate_anchors(p);
        for (const auto& anchor : set.anchors())
          worst_res = std::max(worst_res, desync_condition_residual(anchor, p));
      }
  const double dt = seconds_since(t0);
  return {worst_rel <= 1e-12 && worst_res <= 1e-10 && dt < 1.0,
          "max rel diff " + fmt("%.2e", worst_rel) + " (<= 1e-12), max residual " + fmt("%.2e", worst_res) +
              " (<= 1e-10), " + fmt("%.3f", dt) + " s (< 1 s)"};
}

// 2. V(G(x)) = (1 + e) V(x) on D minus the exclusion set.
Outcome contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2002);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    const OscillatorParams p{n, 1.0, 1.0, -0.1 - 0.15 * static_cast<double>(n - 2)};
    const DesyncSet set = enumerate_anchors(p);
    for (int k = 0; k < 1000;) {
      TimerState x = random_state(std::vector<double>(n, 1.0), rng);
      x[rng() % n] = 1.0;
      if (in_exclusion_set(x, p)) continue;
      const double before = lyapunov_v(x, set);
      const double after = lyapunov_v(jump_map(x, p), set);
      worst = std::max(worst, oracle::rel_err(after, (1.0 + p.coupling) * before));
      ++checked;
      ++k;
    }
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-9 && dt < 10.0, std::to_string(checked) + " jumps, max rel err " + fmt("%.2e", worst) +
                                          " (<= 1e-9), " + fmt("%.3f", dt) + " s (< 10 s)"};
}

// 3. V constant on flow intervals.
Outcome flow_invariance() {
  std::mt19937_64 rng(3003);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
    const OscillatorParams p{n, 1.0 + static_cast<double>(k % 3), 1.0, -0.15 - 0.1 * static_cast<double>(k % 7)};
    const DesyncSet set = enumerate_anchors(p);
    const TimerState x0 = random_state(std::vector<double>(n, p.threshold), rng);
    const auto arc = simulate(p, PerturbationSpec::none(), x0, StopCriteria::flow_time(20.0 * p.threshold));
    worst = std::max(worst, verify_arc(arc, set, p).max_flow_drift);
  }
  return {worst <= 1e-9, "100 arcs, max drift " + fmt("%.2e", worst) + " (<= 1e-9)"};
}

// 4. Two-oscillator scenario.
Outcome scenario_two() {
  const OscillatorParams p{2, 1.0, 1.0, -0.2};
  const double m = convergence_time_bound(p, 0.24, 0.1, false).bound_m;
  const auto arc = simulate(p, PerturbationSpec::none(), {0.0, 0.1}, StopCriteria::flow_time(20));
  const LyapunovEvaluator v(p);
  const double after = worst_after(arc, v, m);
  const double v34 = v(state_at(arc, {3.0, 4}));
  const bool ok = std::abs(m - 7.84) <= 0.01 && after <= 0.1 && v34 >= 0.09 && v34 <= 0.11;
  return {ok, "M " + fmt("%.4f", m) + " (7.84 +- 0.01), max V for t+j >= M " + fmt("%.4f", after) +
                  " (<= 0.1), V(3,4) " + fmt("%.4f", v34) + " (in [0.09, 0.11])"};
}

// 5. Ceiling-mode convergence bound never violated.
Outcome soundness() {
  std::mt19937_64 rng(5005);
  std::size_t checks = 0, violations = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    const OscillatorParams p{n, 1.0, 1.0, -0.25};
    const LyapunovEvaluator v(p);
    const double cx = exclusion_distance_estimate(p, 20000, 55 + n);
    std::vector<std::pair<double, double>> grid;
    for (double f2 : {0.9, 0.6, 0.3})
      for (double f1 : {0.5, 0.2, 0.05}) grid.emplace_back(f2 * cx, f1 * f2 * cx);
    double horizon = 0.0;
    for (const auto& [c2, c1] : grid) horizon = std::max(horizon, convergence_time_bound(p, c2, c1, true).bound_m);
    SimulationOptions o;
    o.sample_interval = 0.0;
    for (int k = 0; k < 500; ++k) {
      const TimerState x0 = random_state_off_exclusion(p, std::vector<double>(n, 1.0), rng);
      const double v0 = v(x0);
      const auto arc = simulate(p, PerturbationSpec::none(), x0, StopCriteria::flow_time(horizon + 2.0), o);
      for (const auto& [c2, c1] : grid) {
        if (v0 > c2) continue;
        ++checks;
        const double m = convergence_time_bound(p, c2, c1, true).bound_m;
        if (worst_after(arc, v, m) > c1 * (1.0 + 1e-9)) ++violations;
      }
    }
  }
  return {violations == 0 && checks > 0,
          std::to_string(checks) + " (state, c2, c1) checks, " + std::to_string(violations) + " violations (== 0)"};
}

// 6. Normalized convergence-time curves.
Outcome fig4() {
  RunConfig c;
  c.initial.state = TimerState{0.0, 0.1};
  c.outputs.directory = scratch("fig4").string();
  Fig4Spec f;
  for (int k = 0; k <= 16; ++k) f.eps.push_back(-0.9 + 0.05 * k);
  f.c1_fractions = {0.5, 0.3, 0.1, 0.05};
  f.c2_fraction = 0.99;
  c.fig4 = f;
  const fs::path file = run_fig4(c).front();
  const auto eps = read_column(file, 0), c1 = read_column(file, 1), m = read_column(file, 2);
  std::map<double, std::vector<std::pair<double, double>>> curves;
  for (std::size_t k = 0; k < eps.size(); ++k) curves[c1[k]].emplace_back(eps[k], m[k]);
  bool decreasing = curves.size() == 4;
  for (auto& [level, pts] : curves) {
    std::sort(pts.begin(), pts.end());  // eps ascending = |eps| descending
    for (std::size_t k = 1; k < pts.size(); ++k) decreasing = decreasing && pts[k - 1].second < pts[k].second;
  }
  bool above = true;
  const auto& lo = curves[0.05];
  const auto& hi = curves[0.5];
  for (std::size_t k = 0; k < lo.size() && k < hi.size(); ++k) above = above && lo[k].second > hi[k].second;
  return {decreasing && above, std::to_string(curves.size()) + " curves x " + std::to_string(f.eps.size()) +
                                   " points, strictly decreasing in |eps|: " + (decreasing ? "yes" : "no") +
                                   ", c1=0.05 above c1=0.5: " + (above ? "yes" : "no")};
}

// 7. Rate mismatch: settled V below c_bar * threshold / (|e| rate).
Outcome flow_rate() {
  RunConfig c;
  c.params = {2, 4.0, 1.0, -0.3};
  c.perturbation = {PerturbationKind::FlowRate, {0.120, 0.134}};
  c.initial.mode = InitialSpec::Mode::Random;
  c.initial.count = 10;
  c.initial.seed = 7007;
  c.stop = StopCriteria::flow_time(300.0);
  c.outputs.directory = scratch("flow_rate").string();
  const double cbar = flow_perturbation_cbar(c.params, c.perturbation.magnitudes);
  const double bound = asymptotic_distance_bound(c.params, cbar);
  double worst = 0.0;
  for (const auto& r : run_batch(c).rows) worst = std::max(worst, r.steady_v);
  const bool ok = std::abs(cbar - 0.0099) <= 1e-4 && worst <= bound;
  return {ok, "c_bar " + fmt("%.5f", cbar) + " (expected 0.0099), bound " + fmt("%.4f", bound) +
                  ", max steady V over 10 runs " + fmt("%.4f", worst)};
}

// 8. Bump perturbation.
Outcome bump() {
  std::mt19937_64 rng(8008);
  bool identical = true;
  for (int k = 0; k < 20; ++k) {
    const double e = -0.3 - 0.1 * (k % 4), rho = 0.05 + 0.05 * (k % 3);
    const OscillatorParams p{2 + static_cast<std::size_t>(k % 4), 3.0, 1.0, e};
    OscillatorParams q = p;
    q.coupling = e + rho;
    const TimerState x0 = random_state(std::vector<double>(p.n_oscillators, 3.0), rng);
    const auto a = simulate(p, {PerturbationKind::Bump, std::vector<double>(p.n_oscillators, rho)}, x0,
                            StopCriteria::flow_time(60));
    const auto b = simulate(q, PerturbationSpec::none(), x0, StopCriteria::flow_time(60));
    std::ostringstream sa, sb;
    write_jumps_csv(sa, a);
    write_jumps_csv(sb, b);
    identical = identical && sa.str() == sb.str() && a.samples.size() == b.samples.size();
    for (std::size_t s = 0; identical && s < a.samples.size(); ++s)
      identical = a.samples[s].state == b.samples[s].state && a.samples[s].time == b.samples[s].time;
  }

  auto steady = [](std::vector<double> rho, std::uint64_t seed) {
    RunConfig c;
    c.params = {2, 3.0, 1.0, -0.3};
    c.perturbation = {PerturbationKind::Bump, std::move(rho)};
    c.initial.mode = InitialSpec::Mode::Random;
    c.initial.count = 10;
    c.initial.seed = seed;
    c.stop = StopCriteria::flow_time(200.0);
    c.outputs.directory = scratch("bump_" + std::to_string(seed)).string();
    double worst = 0.0;
    for (const auto& r : run_batch(c).rows) worst = std::max(worst, r.steady_v);
    return worst;
  };
  const double low = steady({0.02, 0.01}, 81), high = steady({0.15, 0.1}, 82);
  const bool ok = identical && low <= 0.06 * 1.2 && high <= 0.3 * 1.2 && low < high;
  return {ok, std::string("uniform bump bit-identical: ") + (identical ? "yes" : "no") + ", steady V " +
                  fmt("%.4f", low) + " (<= 0.072) and " + fmt("%.4f", high) + " (<= 0.36)"};
}

// 9. Closed-form sums against direct summation.
Outcome closed_form_sums() {
  std::mt19937_64 rng(9009);
  double worst_a = 0.0, worst_b = 0.0;
  for (int k = 0; k < 1000; ++k) {
    // x = 1 + e: e in [-0.95, -0.05], or x in [1.05, 1.5].
    const double x = k % 4 == 3 ? 1.05 + 0.45 * uniform01(rng) : 0.05 + 0.9 * uniform01(rng);
    const long m = static_cast<long>(rng() % 12);
    const long n = m + 1 + static_cast<long>(rng() % 30);
    worst_a = std::max(worst_a, oracle::rel_err(geometric_sum(x, m, n), oracle::power_sum(x, m, n)));
  }
  for (int k = 0; k < 1000; ++k) {
    const double x = k % 4 == 3 ? 1.05 + 0.45 * uniform01(rng) : 0.05 + 0.9 * uniform01(rng);
    const long m = static_cast<long>(rng() % 12);
    const long big_n = m + static_cast<long>(rng() % 30);
    worst_b = std::max(worst_b, oracle::rel_err(double_geometric_sum(x, m, big_n), oracle::double_power_sum(x, m, big_n)));
  }
  return {worst_a <= 1e-12 && worst_b <= 1e-12,
          "max rel err " + fmt("%.2e", worst_a) + " and " + fmt("%.2e", worst_b) + " (<= 1e-12)"};
}

// 10. Cyclic rank order repeats every N jumps.
Outcome ordering() {
  std::mt19937_64 rng(10010);
  std::size_t bad = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 5);
    const OscillatorParams p{n, 1.0, 1.0, -0.2 - 0.1 * static_cast<double>(k % 6)};
    const TimerState x0 = random_state_off_exclusion(p, std::vector<double>(n, 1.0), rng);
    SimulationOptions o;
    o.sample_interval = 0.0;
    const auto arc = simulate(p, PerturbationSpec::none(), x0, StopCriteria::jumps(10 * n), o);
    if (arc.jumps.size() != 10 * n || !ordering_preserved(arc, n)) ++bad;
  }
  return {bad == 0, "200 arcs x 10N jumps, " + std::to_string(bad) + " order changes (== 0)"};
}

// 11. Exclusion-set behaviour.
Outcome exclusion() {
  std::mt19937_64 rng(11011);
  std::size_t s_bad = 0, g_bad = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 4);
    const OscillatorParams p{n, 1.0, 1.0, -0.3};
    const LyapunovEvaluator v(p);
    SimulationOptions o;
    o.policy = BranchPolicy::AllReset;
    const auto arc =
        simulate(p, PerturbationSpec::none(), TimerState(std::vector<double>(n, uniform01(rng))), StopCriteria::flow_time(10), o);
    const double v0 = v(arc.samples.front().state);
    for (const auto& s : arc.samples) {
      const auto [lo, hi] = std::minmax_element(s.state.tau.begin(), s.state.tau.end());
      if (*lo != *hi || std::abs(v(s.state) - v0) > 1e-12) ++s_bad;
    }

    TimerState g = random_state(std::vector<double>(n, 1.0), rng);
    const std::size_t i = rng() % n;
    std::size_t r = rng() % (n - 1);
    if (r >= i) ++r;
    g[i] = 1.0;
    g[r] = 0.0;
    const auto garc = simulate(p, PerturbationSpec::none(), g, StopCriteria::jumps(1));
    const auto& post = garc.jumps.front().post;
    if (std::abs(post[i] - post[r]) > p.tolerance) ++g_bad;
  }
  return {s_bad == 0 && g_bad == 0, "synchronized arcs leaving sync: " + std::to_string(s_bad) +
                                        ", zero/threshold starts not merged after one jump: " + std::to_string(g_bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-11)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> all = {
      {"anchor-correctness", anchors},      {"jump-contraction", contraction},
      {"flow-invariance", flow_invariance}, {"scenario-n2", scenario_two},
      {"bound-soundness", soundness},       {"fig4-curves", fig4},
      {"flow-rate-robustness", flow_rate},  {"bump-equivalence", bump},
      {"closed-form-sums", closed_form_sums},           {"ordering-preservation", ordering},
      {"exclusion-set", exclusion},
  };
  int failed = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(k + 1)) == only.end()) continue;
    Outcome o;
    try {
      o = all[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2zu %-22s %s\n", o.pass ? "PASS" : "FAIL", k + 1, all[k].first, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
