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

#include "minlab/trajectory.hpp"

namespace minlab {

std::string_view to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::consensus:
      return "consensus";
    case TerminalStatus::disseminated:
      return "disseminated";
    case TerminalStatus::censored:
      return "censored";
  }
  return "censored";
}

bool is_terminal(const PopulationState& state) noexcept {
  if (state.source()) return state.is_disseminated();
  return state.is_consensus();
}

TerminalStatus terminal_status(const PopulationState& state) noexcept {
  if (!is_terminal(state)) return TerminalStatus::censored;
  return state.source() ? TerminalStatus::disseminated
                        : TerminalStatus::consensus;
}

}  // namespace minlab
