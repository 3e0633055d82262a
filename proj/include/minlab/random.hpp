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

// Seeded random streams and the discrete samplers used by the simulators.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace minlab {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of the private stream of trial `index` under `master`.
constexpr std::uint64_t trial_seed(std::uint64_t master,
                                   std::uint64_t index) noexcept {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline Rng trial_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(trial_seed(master, index));
}

// Uniform integer in [0, bound).
std::int64_t uniform_index(Rng& rng, std::int64_t bound);

std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p);

// Counts over categories with the given probabilities (summing to at most
// 1; any remainder goes to an implicit last category, which is returned as
// the final entry). Conditional binomial decomposition.
std::vector<std::int64_t> draw_multinomial(Rng& rng, std::int64_t n,
                                           const std::vector<double>& probs);

// Marked items among `draws` taken without replacement from `population`
// items of which `successes` are marked.
std::int64_t draw_hypergeometric(Rng& rng, std::int64_t population,
                                 std::int64_t successes, std::int64_t draws);

// `count` distinct values from [0, bound) (Floyd's algorithm, unordered).
void sample_distinct(Rng& rng, std::int64_t bound, std::int64_t count,
                     std::vector<std::int64_t>& out);

}  // namespace minlab
