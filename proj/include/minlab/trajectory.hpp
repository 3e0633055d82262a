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

// Trajectory records shared by the parallel and sequential simulators.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "minlab/core_model.hpp"

namespace minlab {

enum class TerminalStatus { consensus, disseminated, censored };

std::string_view to_string(TerminalStatus status);

struct TrajectoryRow {
  std::int64_t t = 0;
  std::int64_t ones = 0;
  std::int64_t m = 0;
  Opinion opinion = Opinion::one;
  Area area = Area::consensus;
  // Diagnostic stepper only: wrong-by-heavy-sample and unanimous-majority
  // counts of the round that produced this row.
  std::optional<std::int64_t> w;
  std::optional<std::int64_t> u;
};

struct TrajectoryRecord {
  TerminalStatus status = TerminalStatus::censored;
  // Rounds (parallel) or activations (sequential) until the terminal state,
  // or the budget when censored.
  std::int64_t time = 0;
  PopulationState final_state{4, 0};
  Opinion initial_minority = Opinion::one;
  // Time spent in each area before termination, indexed by Area.
  std::array<std::int64_t, 7> area_time{};
  // Every round for parallel runs; state changes only for sequential runs.
  // Empty unless recording was requested.
  std::vector<TrajectoryRow> rows;
};

// True when the run has nothing left to do: consensus without a source, or
// every node agreeing with the source.
bool is_terminal(const PopulationState& state) noexcept;
TerminalStatus terminal_status(const PopulationState& state) noexcept;

}  // namespace minlab
