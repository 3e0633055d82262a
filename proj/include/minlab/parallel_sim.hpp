// Copyright 2026 The minlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Synchronous-parallel k-PULL rounds: a per-node reference stepper, a
// single-binomial aggregate stepper and a (W, U)-resolving diagnostic
// stepper.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "minlab/core_model.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/random.hpp"
#include "minlab/trajectory.hpp"

namespace minlab {

enum class Stepper { aggregate, pernode, diagnostic };

std::string_view to_string(Stepper stepper);
std::optional<Stepper> parse_stepper(std::string_view text);

struct RoundOutcome {
  std::int64_t next_ones = 0;
  // Diagnostic stepper only. `w` counts nodes whose sample held more than
  // k/2 minority opinions, `u` those that saw a unanimous majority, and
  // `unanimous_minority` the part of `w` that saw only minority opinions.
  std::optional<std::int64_t> w;
  std::optional<std::int64_t> u;
  std::optional<std::int64_t> unanimous_minority;
  bool opinion_flipped = false;
};

// Node `v` holds opinion 1 iff v < X. A source with opinion 1 is node 0, a
// source with opinion 0 is node n - 1. With `shuffle_order` nodes are
// processed in a random order; samples always read the pre-round state.
RoundOutcome step_pernode(const PopulationState& state,
                          const KernelParams& params, Rng& rng,
                          bool shuffle_order = false);

// Throws ModeUnsupported for exclusive sampling.
RoundOutcome step_aggregate(const PopulationState& state,
                            const KernelParams& params, Rng& rng);

// Minority rule, with-replacement sampling, no source. Throws
// ModeUnsupported otherwise.
RoundOutcome step_diagnostic(const PopulationState& state,
                             const KernelParams& params, Rng& rng);

RoundOutcome step(Stepper stepper, const PopulationState& state,
                  const KernelParams& params, Rng& rng);

// 50 * ceil(ln n)^2
std::int64_t default_max_rounds(std::int64_t n);

// Runs rounds until a terminal state or `max_rounds`. The aggregate stepper
// falls back to per-node rounds under exclusive sampling.
TrajectoryRecord run_trajectory(const PopulationState& init,
                                const KernelParams& params,
                                std::int64_t max_rounds, Stepper stepper,
                                Rng& rng, bool record_rows = false);

}  // namespace minlab
