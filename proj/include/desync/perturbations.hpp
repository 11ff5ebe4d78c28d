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

#include <string_view>
#include <vector>

#include "desync/model.hpp"

namespace desync {

/// The concrete perturbation families. Exactly one is active per run.
///  - Threshold:   timer i fires at threshold + rho_i; flow box widened to match.
///  - ResetOffset: a firing timer restarts at rho_i instead of 0.
///  - Bump:        non-firing timer i is scaled by 1 + (coupling + rho_i).
///  - FlowRate:    timer i flows at rate + delta_i.
enum class PerturbationKind { None, Threshold, ResetOffset, Bump, FlowRate };

std::string_view to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(std::string_view name);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::None;
  std::vector<double> magnitudes;

  static PerturbationSpec none() { return {}; }

  /// Throws Error(InvalidArgument) if the magnitudes break the family's
  /// admissible range for these params.
  void validate(const OscillatorParams& params) const;

  bool operator==(const PerturbationSpec&) const = default;
};

std::vector<double> effective_thresholds(const PerturbationSpec& spec, const OscillatorParams& params);
std::vector<double> effective_rates(const PerturbationSpec& spec, const OscillatorParams& params);
JumpLaw jump_law(const PerturbationSpec& spec, const OscillatorParams& params);

TimerState perturbed_jump(const TimerState& state, const PerturbationSpec& spec,
                          const OscillatorParams& params, BranchSelector& selector);

}  // namespace desync
