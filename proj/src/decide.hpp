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

#pragma once

#include <cstdint>

#include "minlab/core_model.hpp"
#include "minlab/random.hpp"

namespace minlab::detail {

// New opinion (1 or 0) of a node that saw `ones` ones among its k samples.
// Ties go to a fair coin.
inline int decide(RuleKind kind, std::int64_t k, std::int64_t ones, Rng& rng) {
  const std::int64_t twice = 2 * ones;
  switch (kind) {
    case RuleKind::voter:
      return ones > 0 ? 1 : 0;
    case RuleKind::majority:
      if (twice != k) return twice > k ? 1 : 0;
      break;
    case RuleKind::minority:
      if (ones == 0) return 0;
      if (ones == k) return 1;
      if (twice != k) return twice < k ? 1 : 0;
      break;
  }
  return static_cast<int>(uniform_index(rng, 2));
}

}  // namespace minlab::detail
