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

// Deterministic random draws. Doubles come straight from the 53 high bits of
// mt19937_64 so streams are identical across standard libraries.

#include <cstdint>
#include <random>
#include <span>

#include "desync/model.hpp"

namespace desync {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform point of the box prod [0, upper_i].
TimerState random_state(std::span<const double> upper, std::mt19937_64& rng);

/// Uniform point of the box, redrawn until it lies off the exclusion set.
/// Throws Error(Numerical) after `max_attempts` rejections.
TimerState random_state_off_exclusion(const OscillatorParams& params, std::span<const double> upper,
                                      std::mt19937_64& rng, std::size_t max_attempts = 10000);

/// Seed of run k in a batch; splitmix64 of the base seed and k.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k);

}  // namespace desync
