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
#include "desync/perturbations.hpp"

#include <cmath>
#include <string>

#include "desync/error.hpp"

namespace desync {

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::None:
      return "none";
    case PerturbationKind::Threshold:
      return "threshold";
    case PerturbationKind::ResetOffset:
      return "reset-offset";
    case PerturbationKind::Bump:
      return "bump";
    case PerturbationKind::FlowRate:
      return "flow-rate";
  }
  return "none";
}

PerturbationKind perturbation_kind_from_string(std::string_view name) {
  if (name == "none") return PerturbationKind::None;
  if (name == "threshold") return PerturbationKind::Threshold;
  if (name == "reset-offset") return PerturbationKind::ResetOffset;
  if (name == "bump") return PerturbationKind::Bump;
  if (name == "flow-rate") return PerturbationKind::FlowRate;
  fail(ErrorCode::InvalidArgument, "perturbation.kind: unknown kind '" + std::string(name) + "'");
}

void PerturbationSpec::validate(const OscillatorParams& params) const {
  const std::size_t n = params.n_oscillators;
  if (kind == PerturbationKind::None) {
    for (double m : magnitudes)
      if (m != 0.0) fail(ErrorCode::InvalidArgument, "perturbation.magnitudes: must be zero for kind none");
    return;
  }
  if (magnitudes.size() != n)
    fail(ErrorCode::InvalidArgument, "perturbation.magnitudes: expected " + std::to_string(n) +
                                         " entries, got " + std::to_string(magnitudes.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const double m = magnitudes[i];
    const std::string where = "perturbation.magnitudes[" + std::to_string(i) + "]";
    if (!std::isfinite(m)) fail(ErrorCode::InvalidArgument, where + ": must be finite");
    switch (kind) {
      case PerturbationKind::Threshold:
        if (m < 0.0) fail(ErrorCode::InvalidArgument, where + ": threshold offset must be >= 0");
        break;
      case PerturbationKind::ResetOffset:
        if (m < 0.0 || m >= params.threshold)
          fail(ErrorCode::InvalidArgument, where + ": reset offset must lie in [0, threshold)");
        break;
      case PerturbationKind::Bump:
        // Zero admitted so that an all-zero perturbation is the nominal system.
        if (!(m >= 0.0 && m < std::abs(params.coupling)))
          fail(ErrorCode::InvalidArgument, where + ": bump offset must lie in [0, |coupling|)");
        break;
      case PerturbationKind::FlowRate:
        if (!(params.rate + m > 0.0))
          fail(ErrorCode::InvalidArgument, where + ": perturbed rate must stay positive");
        break;
      case PerturbationKind::None:
        break;
    }
  }
}

std::vector<double> effective_thresholds(const PerturbationSpec& spec, const OscillatorParams& params) {
  std::vector<double> out(params.n_oscillators, params.threshold);
  if (spec.kind == PerturbationKind::Threshold)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = params.threshold + spec.magnitudes[i];
  return out;
}

std::vector<double> effective_rates(const PerturbationSpec& spec, const OscillatorParams& params) {
  std::vector<double> out(params.n_oscillators, params.rate);
  if (spec.kind == PerturbationKind::FlowRate)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = params.rate + spec.magnitudes[i];
  return out;
}

JumpLaw jump_law(const PerturbationSpec& spec, const OscillatorParams& params) {
  JumpLaw law = JumpLaw::nominal(params);
  switch (spec.kind) {
    case PerturbationKind::Threshold:
      law.thresholds = effective_thresholds(spec, params);
      break;
    case PerturbationKind::ResetOffset:
      law.reset_values = spec.magnitudes;
      break;
    case PerturbationKind::Bump:
      for (std::size_t i = 0; i < law.couplings.size(); ++i)
        law.couplings[i] = params.coupling + spec.magnitudes[i];
      break;
    case PerturbationKind::None:
    case PerturbationKind::FlowRate:
      break;
  }
  return law;
}

TimerState perturbed_jump(const TimerState& state, const PerturbationSpec& spec,
                          const OscillatorParams& params, BranchSelector& selector) {
  require_dimension(state, params);
  spec.validate(params);
  return apply_jump(state, jump_law(spec, params), params.tolerance, selector);
}

}  // namespace desync
