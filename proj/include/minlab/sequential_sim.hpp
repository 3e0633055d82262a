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

// Asynchronous-sequential dynamics: the one-node-per-step simulator and the
// exact birth-death chain of the ones-count with its hitting-time analytics.

#pragma once

#include <cstdint>
#include <vector>

#include "minlab/core_model.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/random.hpp"
#include "minlab/trajectory.hpp"

namespace minlab {

// Transition probabilities on {0, ..., N}.
struct BirthDeathChain {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> r;

  std::int64_t last() const noexcept {
    return static_cast<std::int64_t>(p.size()) - 1;
  }

  // r = 1 - p - q. Throws unless every row is a probability vector (to
  // 1e-12), p_N = 0 and q_0 = 0.
  static BirthDeathChain from_rates(std::vector<double> up,
                                    std::vector<double> down);
};

// X_t under sequential activation: p_i = ((n - i)/n) P(adopt 1 | i, self 0),
// q_i = (i/n) (1 - P(adopt 1 | i, self 1)).
BirthDeathChain build_birth_death(const KernelParams& params);

struct EdgeHittingTimes {
  // Index l - 1 holds tau_{l-1,l}, l = 1..N; +inf when p_{l-1} = 0 or when
  // state l - 1 can fall into a region it never climbs back from.
  std::vector<double> log_edge;
  std::vector<double> edge;
  double log_total = kNegInf;
  // tau_{0,N}
  double total = 0.0;
};

EdgeHittingTimes edge_hitting_times(const BirthDeathChain& chain);

// ln of sum over 1 <= i < j <= N of a(i:j), a(i:j) = prod_{t=i..j} q_t /
// p_{t-1}. -inf for an empty sum, +inf when some needed p is 0.
double lower_bound_sum(const BirthDeathChain& chain);

// ln E[steps to absorption | X_0 = i] with the chosen end states made
// absorbing (at least one). Entries are 0 on absorbing states and +inf where
// absorption is not almost sure.
std::vector<double> log_absorption_time(const BirthDeathChain& chain,
                                        bool absorb_low, bool absorb_high);
std::vector<double> absorption_time(const BirthDeathChain& chain,
                                    bool absorb_low, bool absorb_high);

struct ZChain {
  BirthDeathChain chain;
  // m = floor(n / 6); state i corresponds to X = floor(n/2) + m + i.
  std::int64_t m = 0;
  std::int64_t offset = 0;
  // False when n is not a multiple of 6 and m was rounded down.
  bool exact_sixth = true;
};

// Interior rows copy the X chain. Row 0 keeps X's up-probability and
// reflects; row m keeps X's down-probability and cannot move up.
ZChain z_chain(const KernelParams& params);

// min(1e9, 100 n ceil(ln n))
std::int64_t default_max_steps(std::int64_t n);

// One uniformly random node per step; activations of the source are no-ops.
// Rows (if recorded) are written only when X changes.
TrajectoryRecord run_sequential(const PopulationState& init,
                                const KernelParams& params,
                                std::int64_t max_steps, Rng& rng,
                                bool record_rows = false);

}  // namespace minlab
