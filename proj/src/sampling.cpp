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
#include "desync/sampling.hpp"

#include "desync/error.hpp"

namespace desync {

TimerState random_state(std::span<const double> upper, std::mt19937_64& rng) {
  TimerState s(std::vector<double>(upper.size()));
  for (std::size_t i = 0; i < upper.size(); ++i) s[i] = upper[i] * uniform01(rng);
  return s;
}

TimerState random_state_off_exclusion(const OscillatorParams& params, std::span<const double> upper,
                                      std::mt19937_64& rng, std::size_t max_attempts) {
  for (std::size_t k = 0; k < max_attempts; ++k) {
    TimerState s = random_state(upper, rng);
    if (!in_exclusion_set(s, params)) return s;
  }
  fail(ErrorCode::Numerical, "random_state_off_exclusion: rejection sampling did not terminate");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace desync
