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
#include "desync/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "desync/error.hpp"
#include "desync/sampling.hpp"

namespace desync {

namespace {

namespace fs = std::filesystem;

fs::path prepare_directory(const RunConfig& cfg) {
  const fs::path dir(cfg.outputs.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorCode::Io, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

template <typename Writer>
std::string write_file(const fs::path& file, Writer&& writer) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + file.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to '" + file.string() + "' failed");
  return file.string();
}

// Runs body(k) for k in [0, count) on a small pool; rethrows the first error.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < count;) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Levels {
  double c1 = 0.0;
  double c2 = 0.0;
  double bound_m = 0.0;
};

Levels resolve_levels(const RunConfig& cfg, double v0) {
  Levels l;
  l.c2 = cfg.analysis.c2.value_or(v0);
  l.c1 = cfg.analysis.c1.value_or(0.1 * l.c2);
  if (l.c1 > 0.0 && l.c2 > l.c1)
    l.bound_m = convergence_time_bound(cfg.params, l.c2, l.c1, cfg.analysis.ceiling).bound_m;
  return l;
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

std::vector<TimerState> initial_states(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.initial.mode == InitialSpec::Mode::Explicit) return {cfg.initial.state};
  const auto upper = effective_thresholds(cfg.perturbation, cfg.params);
  std::mt19937_64 rng(cfg.initial.seed);
  std::vector<TimerState> out;
  out.reserve(cfg.initial.count);
  for (std::size_t k = 0; k < cfg.initial.count; ++k)
    out.push_back(cfg.initial.avoid_exclusion ? random_state_off_exclusion(cfg.params, upper, rng)
                                              : random_state(upper, rng));
  return out;
}

SimulationOptions simulation_options(const RunConfig& cfg, std::size_t run) {
  SimulationOptions o;
  o.policy = cfg.policy;
  o.seed = derive_seed(cfg.initial.seed, run);
  o.sample_interval = cfg.sample_interval;
  return o;
}

HybridArc simulate_run(const RunConfig& cfg, const TimerState& initial, std::size_t run) {
  return simulate(cfg.params, cfg.perturbation, initial, cfg.stop, simulation_options(cfg, run));
}

std::vector<std::string> run_single(const RunConfig& cfg) {
  const auto init = initial_states(cfg).front();
  const HybridArc arc = simulate_run(cfg, init, 0);
  const fs::path dir = prepare_directory(cfg);
  const LyapunovEvaluator v(cfg.params);
  std::vector<std::string> files;
  if (cfg.outputs.arc)
    files.push_back(write_file(dir / "arc.csv", [&](std::ostream& o) { write_arc_csv(o, arc, v); }));
  if (cfg.outputs.jumps)
    files.push_back(write_file(dir / "jumps.csv", [&](std::ostream& o) { write_jumps_csv(o, arc); }));
  return files;
}

BatchResult run_batch(const RunConfig& cfg, unsigned threads) {
  const auto inits = initial_states(cfg);
  const fs::path dir = prepare_directory(cfg);
  const LyapunovEvaluator v(cfg.params);
  const LyapunovFn vf = [&v](const TimerState& s) { return v(s); };

  BatchResult result;
  result.rows.resize(inits.size());
  std::vector<std::string> dist_files(inits.size());
  parallel_for(inits.size(), threads, [&](std::size_t k) {
    const HybridArc arc = simulate_run(cfg, inits[k], k);
    BatchRow& row = result.rows[k];
    row.run = k;
    row.v0 = v(inits[k]);
    row.steady_v = steady_state_v(arc, vf, cfg.analysis.steady_fraction);
    const Levels lv = resolve_levels(cfg, row.v0);
    row.c1 = lv.c1;
    row.bound_m = lv.bound_m;
    for (const auto& s : arc.samples)
      if (v(s.state) <= lv.c1) {
        row.crossing = s.time.t + static_cast<double>(s.time.j);
        break;
      }
    dist_files[k] = write_file(dir / ("dist_" + std::to_string(k) + ".csv"), [&](std::ostream& o) {
      o << "t,j,V\n";
      for (const auto& s : arc.samples)
        o << format_real(s.time.t) << ',' << s.time.j << ',' << format_real(v(s.state)) << '\n';
    });
  });
  result.files = std::move(dist_files);
  result.files.push_back(write_file(dir / "summary.csv", [&](std::ostream& o) {
    o << "run,v0,steady_v,c1,crossing,bound_m\n";
    for (const auto& r : result.rows)
      o << r.run << ',' << format_real(r.v0) << ',' << format_real(r.steady_v) << ',' << format_real(r.c1)
        << ',' << opt_real(r.crossing) << ',' << format_real(r.bound_m) << '\n';
  }));
  return result;
}

std::vector<Fig4Row> fig4_table(const OscillatorParams& params, const Fig4Spec& spec) {
  std::vector<Fig4Row> rows;
  for (double c1f : spec.c1_fractions)
    for (double eps : spec.eps) {
      OscillatorParams p = params;
      p.coupling = eps;
      Fig4Row row{eps, c1f * p.threshold, 0.0};
      const double c2 = spec.c2_fraction * p.threshold;
      // c1 == c2 needs no contraction at all.
      if (row.c1 < c2) row.m_normalized = convergence_time_bound(p, c2, row.c1, false).jumps_j;
      rows.push_back(row);
    }
  return rows;
}

std::vector<std::string> run_fig4(const RunConfig& cfg) {
  cfg.validate();
  if (!cfg.fig4) fail(ErrorCode::Config, "fig4: section required for the fig4 run");
  const auto rows = fig4_table(cfg.params, *cfg.fig4);
  const fs::path dir = prepare_directory(cfg);
  return {write_file(dir / "fig4.csv", [&](std::ostream& o) {
    o << "eps,c1,m_normalized\n";
    for (const auto& r : rows)
      o << format_real(r.eps) << ',' << format_real(r.c1) << ',' << format_real(r.m_normalized) << '\n';
  })};
}

void print_desync_set(const RunConfig& cfg, const TextSink& out) {
  cfg.validate();
  const DesyncSet set = enumerate_anchors(cfg.params);
  std::string text;
  for (std::size_t i = 1; i <= cfg.params.n_oscillators; ++i) text += (i > 1 ? ",tau_" : "tau_") + std::to_string(i);
  text += '\n';
  for (const auto& a : set.anchors()) {
    for (std::size_t i = 0; i < a.coords.size(); ++i) text += (i ? "," : "") + format_real(a.coords[i]);
    text += '\n';
  }
  out(text);
}

void print_bounds(const RunConfig& cfg, const TextSink& out) {
  cfg.validate();
  const auto& p = cfg.params;
  std::ostringstream s;
  auto kv = [&](const char* key, const std::string& value) { s << key << '=' << value << '\n'; };
  kv("n", std::to_string(p.n_oscillators));
  kv("threshold", format_real(p.threshold));
  kv("rate", format_real(p.rate));
  kv("coupling", format_real(p.coupling));

  std::optional<double> v0;
  if (cfg.initial.mode == InitialSpec::Mode::Explicit) v0 = lyapunov_v_fast(cfg.initial.state, p);
  if (v0) kv("v_initial", format_real(*v0));
  const double c2 = cfg.analysis.c2 ? *cfg.analysis.c2 : v0.value_or(0.99 * p.threshold);
  const double c1 = cfg.analysis.c1.value_or(0.1 * c2);
  kv("c2", format_real(c2));
  kv("c1", format_real(c1));
  if (c1 < c2) {
    const auto plain = convergence_time_bound(p, c2, c1, false);
    const auto ceiled = convergence_time_bound(p, c2, c1, true);
    kv("jumps_j", format_real(plain.jumps_j));
    kv("bound_m", format_real(plain.bound_m));
    kv("jumps_j_ceiling", format_real(ceiled.jumps_j));
    kv("bound_m_ceiling", format_real(ceiled.bound_m));
  }
  if (cfg.perturbation.kind == PerturbationKind::FlowRate) {
    const auto r = robustness_bound(p, cfg.perturbation.magnitudes);
    kv("c_bar", format_real(r.c_bar));
    kv("asymptotic_distance", format_real(r.asymptotic_distance));
  }
  out(s.str());
}

bool run_verify(const RunConfig& cfg, const TextSink& out, unsigned threads) {
  const auto inits = initial_states(cfg);
  const LyapunovEvaluator v(cfg.params);
  const LyapunovFn vf = [&v](const TimerState& s) { return v(s); };
  std::vector<VerificationReport> reports(inits.size());
  parallel_for(inits.size(), threads, [&](std::size_t k) {
    const HybridArc arc = simulate_run(cfg, inits[k], k);
    VerificationOptions o;
    o.perturbation = cfg.perturbation;
    o.c1 = cfg.analysis.c1;
    o.c2 = cfg.analysis.c2;
    o.ceiling_mode = cfg.analysis.ceiling;
    o.steady_fraction = cfg.analysis.steady_fraction;
    reports[k] = verify_arc(arc, vf, cfg.params, o);
  });

  std::ostringstream s;
  s << "run,check,value,limit,pass\n";
  bool all = true;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    auto row = [&](const char* check, const std::string& value, const std::string& limit, bool ok) {
      s << k << ',' << check << ',' << value << ',' << limit << ',' << (ok ? 1 : 0) << '\n';
    };
    row("v_initial", format_real(r.v_initial), "", true);
    if (r.nominal) {
      row("max_flow_drift", format_real(r.max_flow_drift), format_real(r.drift_tolerance), r.drift_ok());
      row("max_ratio_deviation", format_real(r.max_ratio_deviation), format_real(r.ratio_tolerance), r.ratios_ok());
      row("ratios_evaluated", std::to_string(r.ratios_evaluated), "", true);
      row("crossing_time", opt_real(r.crossing_time), format_real(r.bound_m), r.bound_ok());
      row("ordering_preserved", r.ordering_preserved ? "1" : "0", "", r.ordering_ok());
    }
    row("steady_state_v", format_real(r.steady_state_v), opt_real(r.steady_state_limit), r.steady_ok());
    row("overall", r.passed() ? "1" : "0", "", r.passed());
    all = all && r.passed();
  }
  out(s.str());
  return all;
}

}  // namespace desync
