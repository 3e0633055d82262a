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

#include "minlab/random.hpp"

#include <algorithm>

#include "minlab/error.hpp"

namespace minlab {

std::int64_t uniform_index(Rng& rng, std::int64_t bound) {
  return std::uniform_int_distribution<std::int64_t>(0, bound - 1)(rng);
}

std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

std::vector<std::int64_t> draw_multinomial(Rng& rng, std::int64_t n,
                                           const std::vector<double>& probs) {
  std::vector<std::int64_t> counts(probs.size() + 1, 0);
  std::int64_t left = n;
  double mass = 1.0;
  for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
    if (mass <= 0.0) break;
    const double p = std::clamp(probs[i] / mass, 0.0, 1.0);
    counts[i] = draw_binomial(rng, left, p);
    left -= counts[i];
    mass -= probs[i];
  }
  counts.back() = left;
  return counts;
}

std::int64_t draw_hypergeometric(Rng& rng, std::int64_t population,
                                 std::int64_t successes, std::int64_t draws) {
  require(successes >= 0 && successes <= population && draws >= 0 &&
              draws <= population,
          "hypergeometric draw: invalid arguments");
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < draws; ++i) {
    if (uniform_index(rng, population - i) < successes - hits) ++hits;
  }
  return hits;
}

void sample_distinct(Rng& rng, std::int64_t bound, std::int64_t count,
                     std::vector<std::int64_t>& out) {
  out.clear();
  for (std::int64_t j = bound - count; j < bound; ++j) {
    const std::int64_t t = uniform_index(rng, j + 1);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
}

}  // namespace minlab
