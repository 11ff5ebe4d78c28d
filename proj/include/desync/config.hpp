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

// Run configuration: a JSON document with a fixed schema. Every schema error
// is reported as Error(Config) whose message starts with the offending field
// path, e.g. "params.coupling: must lie strictly inside (-1, 0)".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desync/model.hpp"
#include "desync/perturbations.hpp"
#include "desync/simulator.hpp"

namespace desync {

struct InitialSpec {
  enum class Mode { Explicit, Random };
  Mode mode = Mode::Explicit;
  TimerState state;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  bool avoid_exclusion = true;

  bool operator==(const InitialSpec&) const = default;
};

struct AnalysisSpec {
  std::optional<double> c1;
  std::optional<double> c2;
  bool ceiling = true;
  double steady_fraction = 0.2;

  bool operator==(const AnalysisSpec&) const = default;
};

struct OutputSpec {
  std::string directory = ".";
  bool arc = true;
  bool jumps = true;

  bool operator==(const OutputSpec&) const = default;
};

struct Fig4Spec {
  std::vector<double> eps;
  std::vector<double> c1_fractions;
  double c2_fraction = 0.99;

  bool operator==(const Fig4Spec&) const = default;
};

struct RunConfig {
  OscillatorParams params;
  PerturbationSpec perturbation;
  InitialSpec initial;
  StopCriteria stop = StopCriteria::flow_time(10.0);
  BranchPolicy policy = BranchPolicy::LowestIndexResets;
  std::optional<double> sample_interval;
  AnalysisSpec analysis;
  OutputSpec outputs;
  std::optional<Fig4Spec> fig4;

  /// Throws Error(Config) naming the field.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::string_view json_text);
/// Throws Error(Io) when the file cannot be read.
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);

}  // namespace desync
