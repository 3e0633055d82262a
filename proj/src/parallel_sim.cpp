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

#include "minlab/parallel_sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <vector>

#include "decide.hpp"
#include "minlab/error.hpp"

namespace minlab {

std::string_view to_string(Stepper stepper) {
  switch (stepper) {
    case Stepper::aggregate:
      return "aggregate";
    case Stepper::pernode:
      return "pernode";
    case Stepper::diagnostic:
      return "diagnostic";
  }
  return "aggregate";
}

std::optional<Stepper> parse_stepper(std::string_view text) {
  if (text == "aggregate") return Stepper::aggregate;
  if (text == "pernode") return Stepper::pernode;
  if (text == "diagnostic") return Stepper::diagnostic;
  return std::nullopt;
}

namespace {

void check_state(const PopulationState& state, const KernelParams& params) {
  params.validate();
  require(state.n() == params.n, "state and kernel disagree on n");
}

std::int64_t source_node(const PopulationState& state) {
  return *state.source() == Opinion::one ? 0 : state.n() - 1;
}

RoundOutcome finish(const PopulationState& state, std::int64_t next_ones) {
  RoundOutcome out;
  out.next_ones = next_ones;
  out.opinion_flipped = minority_view(state.n(), next_ones).opinion !=
                        minority_view(state).opinion;
  return out;
}

}  // namespace

RoundOutcome step_pernode(const PopulationState& state,
                          const KernelParams& params, Rng& rng,
                          bool shuffle_order) {
  check_state(state, params);
  const std::int64_t n = state.n();
  const std::int64_t x = state.ones();
  const std::int64_t k = params.k();
  const std::int64_t pinned = state.source() ? source_node(state) : -1;

  std::vector<std::int64_t> order;
  if (shuffle_order) {
    order.resize(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::int64_t> picks;
  std::int64_t next_ones = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t v = shuffle_order ? order[static_cast<std::size_t>(i)] : i;
    if (v == pinned) {
      next_ones += v < x ? 1 : 0;
      continue;
    }
    std::int64_t seen = 0;
    if (params.mode == SamplingMode::with_replacement) {
      for (std::int64_t j = 0; j < k; ++j) seen += uniform_index(rng, n) < x;
    } else {
      sample_distinct(rng, n - 1, k, picks);
      for (std::int64_t t : picks) seen += (t >= v ? t + 1 : t) < x;
    }
    next_ones += detail::decide(params.rule.kind, k, seen, rng);
  }
  return finish(state, next_ones);
}

RoundOutcome step_aggregate(const PopulationState& state,
                            const KernelParams& params, Rng& rng) {
  check_state(state, params);
  if (params.mode != SamplingMode::with_replacement) {
    fail(ErrorCode::mode_unsupported,
         "the aggregate stepper requires with-replacement sampling");
  }
  const double p = adopt_one_probability(params, state.ones());
  const std::int64_t n = state.n();
  if (!state.source()) return finish(state, draw_binomial(rng, n, p));
  const std::int64_t s = to_int(*state.source());
  return finish(state, s + draw_binomial(rng, n - 1, p));
}

RoundOutcome step_diagnostic(const PopulationState& state,
                             const KernelParams& params, Rng& rng) {
  check_state(state, params);
  if (params.mode != SamplingMode::with_replacement ||
      params.rule.kind != RuleKind::minority || state.source()) {
    fail(ErrorCode::mode_unsupported,
         "the diagnostic stepper requires the minority rule, "
         "with-replacement sampling and no source");
  }
  const std::int64_t n = state.n();
  const std::int64_t k = params.k();
  const MinorityView view = minority_view(state);
  RoundOutcome out;
  if (view.size == 0) {
    out.next_ones = state.ones();
    out.w = 0;
    out.u = n;
    out.unanimous_minority = 0;
    return out;
  }

  // Categories by B, the number of minority opinions among the samples:
  // k/2 < B < k (plus half the tie), B = k, B = 0, everything else.
  const SampleCountLaw law(params, state.ones(), Opinion::zero);
  const bool label_one = view.opinion == Opinion::one;
  bool underflow = false;
  const double tie =
      k % 2 == 0 ? 0.5 * to_probability(law.log_pmf(k / 2), underflow) : 0.0;
  const double heavy =
      (label_one ? to_probability(law.log_range(k / 2 + 1, k - 1), underflow)
                 : to_probability(law.log_range(1, (k + 1) / 2 - 1),
                                  underflow)) +
      tie;
  const double all_minority =
      to_probability(law.log_pmf(label_one ? k : 0), underflow);
  const double all_majority =
      to_probability(law.log_pmf(label_one ? 0 : k), underflow);

  const std::vector<std::int64_t> counts =
      draw_multinomial(rng, n, {heavy, all_minority, all_majority});
  // Nodes holding the round-t majority opinion next round.
  const std::int64_t wrong = counts[0] + counts[2];
  out.next_ones = label_one ? n - wrong : wrong;
  out.w = counts[0] + counts[1];
  out.u = counts[2];
  out.unanimous_minority = counts[1];
  out.opinion_flipped =
      minority_view(n, out.next_ones).opinion != view.opinion;
  assert(minority_view(n, out.next_ones).size == std::min(wrong, n - wrong));
  assert(2 * wrong == n || out.opinion_flipped == (2 * wrong < n));
  return out;
}

RoundOutcome step(Stepper stepper, const PopulationState& state,
                  const KernelParams& params, Rng& rng) {
  switch (stepper) {
    case Stepper::aggregate:
      return step_aggregate(state, params, rng);
    case Stepper::pernode:
      return step_pernode(state, params, rng);
    case Stepper::diagnostic:
      return step_diagnostic(state, params, rng);
  }
  return step_aggregate(state, params, rng);
}

std::int64_t default_max_rounds(std::int64_t n) {
  const auto l = static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(n))));
  return 50 * l * l;
}

TrajectoryRecord run_trajectory(const PopulationState& init,
                                const KernelParams& params,
                                std::int64_t max_rounds, Stepper stepper,
                                Rng& rng, bool record_rows) {
  check_state(init, params);
  require(max_rounds >= 1, "max_rounds must be at least 1");
  if (stepper == Stepper::aggregate &&
      params.mode == SamplingMode::exclusive) {
    stepper = Stepper::pernode;
  }
  if (stepper == Stepper::diagnostic) {
    // Surface an unsupported configuration before any round runs.
    if (params.mode != SamplingMode::with_replacement ||
        params.rule.kind != RuleKind::minority || init.source()) {
      fail(ErrorCode::mode_unsupported,
           "the diagnostic stepper requires the minority rule, "
           "with-replacement sampling and no source");
    }
  }
  const AreaPartition part(params.n, params.k());
  TrajectoryRecord rec;
  rec.initial_minority = minority_view(init).opinion;

  PopulationState state = init;
  auto push = [&](std::int64_t t, const RoundOutcome* from) {
    const MinorityView view = minority_view(state);
    TrajectoryRow row{t, state.ones(), view.size, view.opinion,
                      part.classify(view.size), {}, {}};
    if (from) {
      row.w = from->w;
      row.u = from->u;
    }
    rec.rows.push_back(row);
  };
  if (record_rows) push(0, nullptr);

  std::int64_t t = 0;
  while (!is_terminal(state) && t < max_rounds) {
    const Area area = part.classify(minority_view(state).size);
    ++rec.area_time[static_cast<std::size_t>(area)];
    const RoundOutcome out = step(stepper, state, params, rng);
    state = state.with_ones(out.next_ones);
    ++t;
    if (record_rows) push(t, &out);
  }
  rec.time = t;
  rec.final_state = state;
  rec.status = terminal_status(state);
  return rec;
}

}  // namespace minlab
