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
#include "desync/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "desync/error.hpp"

namespace desync {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& field, const std::string& what) {
  fail(ErrorCode::Config, field + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) schema(where.empty() ? "<root>" : where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items())
    if (!allowed.count(k)) schema(where.empty() ? k : where + "." + k, "unknown field");
}

std::string path(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

double get_real(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) schema(path(where, key), "expected a number");
  return v.get<double>();
}

std::optional<double> get_opt_real(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return get_real(obj, where, key, 0.0);
}

std::uint64_t get_uint(const json& obj, const std::string& where, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) schema(path(where, key), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) schema(path(where, key), "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) schema(path(where, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_reals(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) return {};
  const json& v = obj.at(key);
  if (!v.is_array()) schema(path(where, key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema(path(where, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// Core validators name fields without their section; prefix it.
template <typename F>
void with_prefix(const std::string& prefix, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(prefix, 0) == 0) fail(ErrorCode::Config, what);
    fail(ErrorCode::Config, prefix + "." + what);
  }
}

}  // namespace

void RunConfig::validate() const {
  with_prefix("params", [&] { params.validate(); });
  with_prefix("perturbation", [&] { perturbation.validate(params); });
  with_prefix("stop", [&] { stop.validate(); });
  if (initial.mode == InitialSpec::Mode::Explicit) {
    if (initial.state.size() != params.n_oscillators)
      schema("initial.state", "expected " + std::to_string(params.n_oscillators) + " entries");
    const auto upper = effective_thresholds(perturbation, params);
    if (!in_box(initial.state, upper, params.tolerance))
      schema("initial.state", "lies outside the flow box");
  } else if (initial.count < 1) {
    schema("initial.count", "must be at least 1");
  }
  if (sample_interval && (!(*sample_interval >= 0.0) || !std::isfinite(*sample_interval)))
    schema("sample_interval", "must be a nonnegative finite number");
  if (analysis.c1 && !(*analysis.c1 > 0.0)) schema("analysis.c1", "must be positive");
  if (analysis.c2 && !(*analysis.c2 > 0.0)) schema("analysis.c2", "must be positive");
  if (analysis.c1 && analysis.c2 && !(*analysis.c1 < *analysis.c2)) schema("analysis.c1", "must be below c2");
  if (!(analysis.steady_fraction > 0.0 && analysis.steady_fraction <= 1.0))
    schema("analysis.steady_fraction", "must lie in (0, 1]");
  if (outputs.directory.empty()) schema("outputs.directory", "must not be empty");
  if (fig4) {
    if (fig4->eps.empty()) schema("fig4.eps", "must not be empty");
    for (double e : fig4->eps)
      if (!(e > -1.0 && e < 0.0)) schema("fig4.eps", "values must lie strictly inside (-1, 0)");
    if (fig4->c1_fractions.empty()) schema("fig4.c1_fractions", "must not be empty");
    if (!(fig4->c2_fraction > 0.0)) schema("fig4.c2_fraction", "must be positive");
    for (double c : fig4->c1_fractions)
      if (!(c > 0.0 && c <= fig4->c2_fraction))
        schema("fig4.c1_fractions", "values must lie in (0, c2_fraction]");
  }
}

RunConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, std::string("<document>: ") + e.what());
  }
  only_keys(root, "", {"params", "perturbation", "initial", "stop", "policy", "sample_interval", "analysis",
                       "outputs", "fig4"});
  RunConfig cfg;

  if (root.contains("params")) {
    const json& p = root.at("params");
    only_keys(p, "params", {"n", "threshold", "rate", "coupling", "tolerance"});
    cfg.params.n_oscillators = get_uint(p, "params", "n", cfg.params.n_oscillators);
    cfg.params.threshold = get_real(p, "params", "threshold", cfg.params.threshold);
    cfg.params.rate = get_real(p, "params", "rate", cfg.params.rate);
    cfg.params.coupling = get_real(p, "params", "coupling", cfg.params.coupling);
    cfg.params.tolerance = get_real(p, "params", "tolerance", cfg.params.tolerance);
  }

  if (root.contains("perturbation")) {
    const json& p = root.at("perturbation");
    only_keys(p, "perturbation", {"kind", "magnitudes"});
    const std::string kind = get_string(p, "perturbation", "kind", "none");
    with_prefix("perturbation.kind", [&] { cfg.perturbation.kind = perturbation_kind_from_string(kind); });
    cfg.perturbation.magnitudes = get_reals(p, "perturbation", "magnitudes");
  }

  if (!root.contains("initial")) schema("initial", "required");
  {
    const json& p = root.at("initial");
    only_keys(p, "initial", {"mode", "state", "count", "seed", "avoid_exclusion"});
    const std::string mode = get_string(p, "initial", "mode", "explicit");
    if (mode == "explicit") {
      cfg.initial.mode = InitialSpec::Mode::Explicit;
      if (!p.contains("state")) schema("initial.state", "required for explicit mode");
    } else if (mode == "random") {
      cfg.initial.mode = InitialSpec::Mode::Random;
    } else {
      schema("initial.mode", "expected explicit or random");
    }
    cfg.initial.state = TimerState(get_reals(p, "initial", "state"));
    cfg.initial.count = get_uint(p, "initial", "count", 1);
    cfg.initial.seed = get_uint(p, "initial", "seed", 0);
    cfg.initial.avoid_exclusion = get_bool(p, "initial", "avoid_exclusion", true);
  }

  if (root.contains("stop")) {
    const json& p = root.at("stop");
    only_keys(p, "stop", {"max_flow_time", "max_jumps"});
    cfg.stop.max_flow_time = get_real(p, "stop", "max_flow_time", std::numeric_limits<double>::infinity());
    cfg.stop.max_jumps = get_uint(p, "stop", "max_jumps", std::numeric_limits<std::uint64_t>::max());
  }

  if (root.contains("policy")) {
    const std::string name = get_string(root, "", "policy", "");
    with_prefix("policy", [&] { cfg.policy = branch_policy_from_string(name); });
  }
  cfg.sample_interval = get_opt_real(root, "", "sample_interval");

  if (root.contains("analysis")) {
    const json& p = root.at("analysis");
    only_keys(p, "analysis", {"c1", "c2", "ceiling", "steady_fraction"});
    cfg.analysis.c1 = get_opt_real(p, "analysis", "c1");
    cfg.analysis.c2 = get_opt_real(p, "analysis", "c2");
    cfg.analysis.ceiling = get_bool(p, "analysis", "ceiling", true);
    cfg.analysis.steady_fraction = get_real(p, "analysis", "steady_fraction", 0.2);
  }

  if (root.contains("outputs")) {
    const json& p = root.at("outputs");
    only_keys(p, "outputs", {"directory", "arc", "jumps"});
    cfg.outputs.directory = get_string(p, "outputs", "directory", ".");
    cfg.outputs.arc = get_bool(p, "outputs", "arc", true);
    cfg.outputs.jumps = get_bool(p, "outputs", "jumps", true);
  }

  if (root.contains("fig4")) {
    const json& p = root.at("fig4");
    only_keys(p, "fig4", {"eps", "c1_fractions", "c2_fraction"});
    Fig4Spec f;
    f.eps = get_reals(p, "fig4", "eps");
    f.c1_fractions = get_reals(p, "fig4", "c1_fractions");
    f.c2_fraction = get_real(p, "fig4", "c2_fraction", 0.99);
    cfg.fig4 = f;
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot read config file '" + file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
  json root;
  root["params"] = {{"n", cfg.params.n_oscillators},
                    {"threshold", cfg.params.threshold},
                    {"rate", cfg.params.rate},
                    {"coupling", cfg.params.coupling},
                    {"tolerance", cfg.params.tolerance}};
  root["perturbation"] = {{"kind", std::string(to_string(cfg.perturbation.kind))},
                          {"magnitudes", cfg.perturbation.magnitudes}};
  json init;
  if (cfg.initial.mode == InitialSpec::Mode::Explicit) {
    init["mode"] = "explicit";
  } else {
    init["mode"] = "random";
  }
  if (cfg.initial.mode == InitialSpec::Mode::Explicit || cfg.initial.state.size() > 0)
    init["state"] = cfg.initial.state.tau;
  init["count"] = cfg.initial.count;
  init["seed"] = cfg.initial.seed;
  init["avoid_exclusion"] = cfg.initial.avoid_exclusion;
  root["initial"] = init;
  json stop = json::object();
  if (std::isfinite(cfg.stop.max_flow_time)) stop["max_flow_time"] = cfg.stop.max_flow_time;
  if (cfg.stop.has_jump_limit()) stop["max_jumps"] = cfg.stop.max_jumps;
  root["stop"] = stop;
  root["policy"] = std::string(to_string(cfg.policy));
  if (cfg.sample_interval) root["sample_interval"] = *cfg.sample_interval;
  json an = {{"ceiling", cfg.analysis.ceiling}, {"steady_fraction", cfg.analysis.steady_fraction}};
  if (cfg.analysis.c1) an["c1"] = *cfg.analysis.c1;
  if (cfg.analysis.c2) an["c2"] = *cfg.analysis.c2;
  root["analysis"] = an;
  root["outputs"] = {{"directory", cfg.outputs.directory}, {"arc", cfg.outputs.arc}, {"jumps", cfg.outputs.jumps}};
  if (cfg.fig4)
    root["fig4"] = {{"eps", cfg.fig4->eps},
                    {"c1_fractions", cfg.fig4->c1_fractions},
                    {"c2_fraction", cfg.fig4->c2_fraction}};
  return root.dump(2) + "\n";
}

}  // namespace desync
