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
#include "desync/desync.h"

#include <cstring>
#include <exception>
#include <limits>
#include <sstream>
#include <string>

#include "desync/analysis.hpp"
#include "desync/config.hpp"
#include "desync/error.hpp"
#include "desync/runner.hpp"

struct desync_params {
  desync::OscillatorParams value;
};
struct desync_set {
  desync::DesyncSet value;
};
struct desync_perturbation {
  desync::PerturbationSpec value;
};
struct desync_arc {
  desync::HybridArc value;
};

namespace {

thread_local std::string g_last_error;

desync_status record(desync_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
desync_status guarded(F&& body) {
  try {
    body();
    return DESYNC_OK;
  } catch (const desync::Error& e) {
    return record(static_cast<desync_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(DESYNC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(DESYNC_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(DESYNC_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) desync::fail(desync::ErrorCode::InvalidArgument, what);
}

desync::TimerState state_from(const double* data, size_t n) {
  require(data != nullptr || n == 0, "state: null pointer");
  return desync::TimerState(std::vector<double>(data, data + n));
}

desync::BranchPolicy policy_from(desync_policy p) {
  switch (p) {
    case DESYNC_POLICY_ALL_RESET:
      return desync::BranchPolicy::AllReset;
    case DESYNC_POLICY_LOWEST_INDEX_RESETS:
      return desync::BranchPolicy::LowestIndexResets;
    case DESYNC_POLICY_RANDOM:
      return desync::BranchPolicy::Random;
  }
  desync::fail(desync::ErrorCode::InvalidArgument, "policy: unknown value");
}

void copy_out(const std::vector<double>& src, double* out, size_t n) {
  require(out != nullptr, "output buffer: null pointer");
  require(n == src.size(), "output buffer: size does not match n_oscillators");
  std::memcpy(out, src.data(), n * sizeof(double));
}

void emit(desync_text_sink sink, void* user, std::string_view text) {
  if (sink && !text.empty()) sink(text.data(), text.size(), user);
}

}  // namespace

extern "C" {

const char* desync_last_error(void) { return g_last_error.c_str(); }
const char* desync_version(void) { return "1.0.0"; }

desync_status desync_params_create(size_t n, double threshold, double rate, double coupling, double tolerance,
                                   desync_params** out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    desync::OscillatorParams p{n, threshold, rate, coupling,
                               tolerance > 0.0 ? tolerance : desync::kDefaultTolerance};
    p.validate();
    *out = new desync_params{p};
  });
}

void desync_params_destroy(desync_params* params) { delete params; }

desync_status desync_sorted_anchor(const desync_params* params, double* out, size_t n) {
  return guarded([&] {
    require(params != nullptr, "params: null handle");
    copy_out(desync::solve_sorted_anchor_elimination(params->value), out, n);
  });
}

desync_status desync_set_create(const desync_params* params, desync_set** out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    *out = new desync_set{desync::enumerate_anchors(params->value)};
  });
}

void desync_set_destroy(desync_set* set) { delete set; }

size_t desync_set_size(const desync_set* set) { return set ? set->value.size() : 0; }

desync_status desync_set_anchor(const desync_set* set, size_t index, double* out, size_t n) {
  return guarded([&] {
    require(set != nullptr, "set: null handle");
    if (index >= set->value.size()) desync::fail(desync::ErrorCode::InvalidArgument, "index: out of range");
    copy_out(set->value.anchors()[index].coords, out, n);
  });
}

desync_status desync_lyapunov(const desync_params* params, const double* state, size_t n, double* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    const auto s = state_from(state, n);
    desync::require_dimension(s, params->value);
    *out = desync::lyapunov_v_fast(s, params->value);
  });
}

desync_status desync_lyapunov_set(const desync_set* set, const double* state, size_t n, double* out) {
  return guarded([&] {
    require(set != nullptr && out != nullptr, "null argument");
    const auto s = state_from(state, n);
    desync::require_dimension(s, set->value.params());
    *out = desync::lyapunov_v(s, set->value);
  });
}

desync_status desync_jump(const desync_params* params, const double* state, size_t n, desync_policy policy,
                          double* out) {
  return guarded([&] {
    require(params != nullptr, "params: null handle");
    const auto next = desync::jump_map(state_from(state, n), params->value, policy_from(policy));
    copy_out(next.tau, out, n);
  });
}

desync_status desync_in_exclusion(const desync_params* params, const double* state, size_t n, int* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    *out = desync::in_exclusion_set(state_from(state, n), params->value) ? 1 : 0;
  });
}

desync_status desync_perturbation_create(const desync_params* params, const char* kind, const double* magnitudes,
                                         size_t count, desync_perturbation** out) {
  return guarded([&] {
    require(params != nullptr && kind != nullptr && out != nullptr, "null argument");
    require(magnitudes != nullptr || count == 0, "magnitudes: null pointer");
    desync::PerturbationSpec spec{desync::perturbation_kind_from_string(kind),
                                  std::vector<double>(magnitudes, magnitudes + count)};
    spec.validate(params->value);
    *out = new desync_perturbation{spec};
  });
}

void desync_perturbation_destroy(desync_perturbation* perturbation) { delete perturbation; }

desync_status desync_simulate(const desync_params* params, const desync_perturbation* perturbation,
                              const double* initial, size_t n, double max_flow_time, uint64_t max_jumps,
                              desync_policy policy, uint64_t seed, double sample_interval, desync_arc** out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    desync::StopCriteria stop;
    if (max_flow_time > 0.0) stop.max_flow_time = max_flow_time;
    if (max_jumps > 0) stop.max_jumps = max_jumps;
    desync::SimulationOptions opts;
    opts.policy = policy_from(policy);
    opts.seed = seed;
    if (sample_interval >= 0.0) opts.sample_interval = sample_interval;
    const auto spec = perturbation ? perturbation->value : desync::PerturbationSpec::none();
    *out = new desync_arc{desync::simulate(params->value, spec, state_from(initial, n), stop, opts)};
  });
}

void desync_arc_destroy(desync_arc* arc) { delete arc; }

size_t desync_arc_sample_count(const desync_arc* arc) { return arc ? arc->value.samples.size() : 0; }

desync_status desync_arc_sample(const desync_arc* arc, size_t index, double* t, uint64_t* j, double* state,
                                size_t n) {
  return guarded([&] {
    require(arc != nullptr, "arc: null handle");
    if (index >= arc->value.samples.size()) desync::fail(desync::ErrorCode::InvalidArgument, "index: out of range");
    const auto& s = arc->value.samples[index];
    if (t) *t = s.time.t;
    if (j) *j = s.time.j;
    if (state) copy_out(s.state.tau, state, n);
  });
}

size_t desync_arc_jump_count(const desync_arc* arc) { return arc ? arc->value.jumps.size() : 0; }

int desync_arc_aborted(const desync_arc* arc) { return arc && arc->value.aborted ? 1 : 0; }

desync_status desync_arc_write_csv(const desync_arc* arc, const desync_params* params, desync_text_sink sink,
                                   void* user) {
  return guarded([&] {
    require(arc != nullptr && params != nullptr, "null argument");
    std::ostringstream s;
    desync::write_arc_csv(s, arc->value, desync::LyapunovEvaluator(params->value));
    emit(sink, user, s.str());
  });
}

desync_status desync_arc_write_jumps_csv(const desync_arc* arc, desync_text_sink sink, void* user) {
  return guarded([&] {
    require(arc != nullptr, "arc: null handle");
    std::ostringstream s;
    desync::write_jumps_csv(s, arc->value);
    emit(sink, user, s.str());
  });
}

desync_status desync_convergence_bound(const desync_params* params, double c2, double c1, int ceiling,
                                       double* bound_m, double* jumps_j) {
  return guarded([&] {
    require(params != nullptr, "params: null handle");
    const auto b = desync::convergence_time_bound(params->value, c2, c1, ceiling != 0);
    if (bound_m) *bound_m = b.bound_m;
    if (jumps_j) *jumps_j = b.jumps_j;
  });
}

desync_status desync_flow_cbar(const desync_params* params, const double* delta_rates, size_t n, double* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    require(delta_rates != nullptr || n == 0, "delta_rates: null pointer");
    *out = desync::flow_perturbation_cbar(params->value, std::span<const double>(delta_rates, n));
  });
}

desync_status desync_asymptotic_bound(const desync_params* params, double c_bar, double* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    *out = desync::asymptotic_distance_bound(params->value, c_bar);
  });
}

desync_status desync_integrable_bound(const desync_params* params, double b_integral, double* out) {
  return guarded([&] {
    require(params != nullptr && out != nullptr, "null argument");
    *out = desync::integrable_perturbation_bound(b_integral, params->value);
  });
}

desync_status desync_geometric_sum(double x, long m, long n, double* out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = desync::geometric_sum(x, m, n);
  });
}

desync_status desync_double_geometric_sum(double x, long m, long big_n, double* out) {
  return guarded([&] {
    require(out != nullptr, "out: null pointer");
    *out = desync::double_geometric_sum(x, m, big_n);
  });
}

desync_status desync_run(const char* command, const char* config_json, const char* out_dir, int has_seed,
                         uint64_t seed, desync_text_sink sink, void* user) {
  bool violated = false;
  const desync_status status = guarded([&] {
    require(command != nullptr && config_json != nullptr, "null argument");
    desync::RunConfig cfg = desync::parse_config(config_json);
    if (out_dir) cfg.outputs.directory = out_dir;
    if (has_seed) cfg.initial.seed = seed;
    cfg.validate();
    const desync::TextSink text = [&](std::string_view s) { emit(sink, user, s); };
    auto list = [&](const std::vector<std::string>& files) {
      for (const auto& f : files) text("wrote " + f + "\n");
    };
    const std::string cmd(command);
    if (cmd == "simulate") {
      list(desync::run_single(cfg));
    } else if (cmd == "batch") {
      list(desync::run_batch(cfg).files);
    } else if (cmd == "desync-set") {
      desync::print_desync_set(cfg, text);
    } else if (cmd == "bound") {
      desync::print_bounds(cfg, text);
    } else if (cmd == "verify") {
      violated = !desync::run_verify(cfg, text);
    } else if (cmd == "fig4") {
      list(desync::run_fig4(cfg));
    } else {
      desync::fail(desync::ErrorCode::InvalidArgument, "command: unknown '" + cmd + "'");
    }
  });
  if (status == DESYNC_OK && violated)
    return record(DESYNC_ERR_INVARIANT_VIOLATION, "verify: at least one check failed");
  return status;
}

desync_status desync_config_normalize(const char* config_json, desync_text_sink sink, void* user) {
  return guarded([&] {
    require(config_json != nullptr, "config_json: null pointer");
    emit(sink, user, desync::dump_config(desync::parse_config(config_json)));
  });
}

}  // extern "C"
