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

#include "minlab/sequential_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "decide.hpp"
#include "minlab/error.hpp"

namespace minlab {
namespace {

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// ln(q_l / p_{l-1}); +inf when only the denominator vanishes.
double log_ratio(const BirthDeathChain& c, std::size_t l) {
  if (c.q[l] == 0.0) return kNegInf;
  if (c.p[l - 1] == 0.0) return kInf;
  return std::log(c.q[l]) - std::log(c.p[l - 1]);
}

// a + b in log space, with -inf as the absorbing zero of the product.
double log_mul(double a, double b) {
  if (a == kNegInf || b == kNegInf) return kNegInf;
  return a + b;
}

}  // namespace

BirthDeathChain BirthDeathChain::from_rates(std::vector<double> up,
                                            std::vector<double> down) {
  require(!up.empty() && up.size() == down.size(),
          "birth-death chain: p and q must have equal nonzero length");
  BirthDeathChain c;
  c.r.resize(up.size());
  for (std::size_t i = 0; i < up.size(); ++i) {
    require(up[i] >= 0.0 && down[i] >= 0.0,
            "birth-death chain: probabilities must be non-negative");
    const double rest = 1.0 - up[i] - down[i];
    require(rest >= -1e-12, "birth-death chain: p_i + q_i exceeds 1");
    c.r[i] = std::max(0.0, rest);
  }
  require(up.back() == 0.0, "birth-death chain: p_N must be 0");
  require(down.front() == 0.0, "birth-death chain: q_0 must be 0");
  c.p = std::move(up);
  c.q = std::move(down);
  return c;
}

BirthDeathChain build_birth_death(const KernelParams& params) {
  params.validate();
  const std::int64_t n = params.n;
  const double nn = static_cast<double>(n);
  std::vector<double> up(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> down(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t i = 0; i <= n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (i < n) {
      up[idx] = (static_cast<double>(n - i) / nn) *
                adopt_one_probability(params, i, Opinion::zero);
    }
    if (i > 0) {
      down[idx] = (static_cast<double>(i) / nn) *
                  (1.0 - adopt_one_probability(params, i, Opinion::one));
    }
  }
  return BirthDeathChain::from_rates(std::move(up), std::move(down));
}

EdgeHittingTimes edge_hitting_times(const BirthDeathChain& chain) {
  const auto last = static_cast<std::size_t>(chain.last());
  EdgeHittingTimes out;
  out.log_edge.resize(last);
  out.edge.resize(last);
  // S_l = sum_{i<l} a(i+1 : l-1); S_1 = 1, S_{l+1} = 1 + a_l S_l.
  double log_s = 0.0;
  for (std::size_t l = 1; l <= last; ++l) {
    if (l > 1) log_s = log_add_exp(0.0, log_mul(log_ratio(chain, l - 1), log_s));
    const double lp = safe_log(chain.p[l - 1]);
    const double lt = lp == kNegInf ? kInf : log_s - lp;
    out.log_edge[l - 1] = lt;
    out.edge[l - 1] = std::exp(lt);
    out.log_total = log_add_exp(out.log_total, lt);
  }
  out.total = std::exp(out.log_total);

  // Plain arithmetic is exact on chains with small rational rates, so use it
  // whenever the running sums stay far from overflow.
  std::vector<double> edge(last);
  double s = 1.0;
  double total = 0.0;
  for (std::size_t l = 1; l <= last; ++l) {
    if (chain.p[l - 1] == 0.0) return out;
    if (l > 1) s = 1.0 + chain.q[l - 1] / chain.p[l - 2] * s;
    edge[l - 1] = s / chain.p[l - 1];
    total += edge[l - 1];
    if (!(total < 1e300)) return out;
  }
  for (std::size_t l = 0; l < last; ++l) out.log_edge[l] = std::log(edge[l]);
  out.edge = std::move(edge);
  out.total = total;
  out.log_total = std::log(total);
  return out;
}

double lower_bound_sum(const BirthDeathChain& chain) {
  const auto last = static_cast<std::size_t>(chain.last());
  // R_j = sum_{i<=j} a(i:j) = a_j (1 + R_{j-1}); L = sum_{j>=2} a_j R_{j-1}.
  double log_r = kNegInf;
  double log_l = kNegInf;
  for (std::size_t j = 1; j <= last; ++j) {
    const double la = log_ratio(chain, j);
    if (j >= 2) log_l = log_add_exp(log_l, log_mul(la, log_r));
    log_r = log_mul(la, log_add_exp(0.0, log_r));
  }
  return log_l;
}

std::vector<double> log_absorption_time(const BirthDeathChain& chain,
                                        bool absorb_low, bool absorb_high) {
  require(absorb_low || absorb_high,
          "absorption_time: at least one end state must absorb");
  require(!chain.p.empty() && chain.q.size() == chain.p.size(),
          "absorption_time: malformed chain");
  const std::size_t size = chain.p.size();
  const auto& p = chain.p;
  const auto& q = chain.q;
  std::vector<char> absorbing(size, 0);
  if (absorb_low) absorbing[0] = 1;
  if (absorb_high) absorbing[size - 1] = 1;

  // States that can reach an absorbing state at all.
  std::vector<char> reaches(absorbing);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < size; ++i) {
    if (absorbing[i]) queue.push_back(i);
  }
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (s > 0 && !reaches[s - 1] && p[s - 1] > 0.0) {
      reaches[s - 1] = 1;
      queue.push_back(s - 1);
    }
    if (s + 1 < size && !reaches[s + 1] && q[s + 1] > 0.0) {
      reaches[s + 1] = 1;
      queue.push_back(s + 1);
    }
  }
  // States from which some trap (a state that cannot reach absorption) is
  // reachable have infinite expectation.
  std::vector<char> infinite(size, 0);
  for (std::size_t i = 0; i < size; ++i) {
    if (!reaches[i]) {
      infinite[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    if (s > 0 && !infinite[s - 1] && !absorbing[s - 1] && p[s - 1] > 0.0) {
      infinite[s - 1] = 1;
      queue.push_back(s - 1);
    }
    if (s + 1 < size && !infinite[s + 1] && !absorbing[s + 1] &&
        q[s + 1] > 0.0) {
      infinite[s + 1] = 1;
      queue.push_back(s + 1);
    }
  }

  std::vector<double> log_e(size, kNegInf);
  std::vector<double> log_d(size);
  std::vector<double> log_b(size);
  std::size_t i = 0;
  while (i < size) {
    if (absorbing[i]) {
      ++i;
      continue;
    }
    if (infinite[i]) {
      log_e[i] = kInf;
      ++i;
      continue;
    }
    // Maximal run [a, b] of transient states with finite expectation.
    const std::size_t a = i;
    std::size_t b = a;
    while (b + 1 < size && !absorbing[b + 1] && !infinite[b + 1]) ++b;
    // Thomas elimination with d'_i = p_i + s_i kept as a sum of positives:
    // s_i = q_i s_{i-1} / (p_{i-1} + s_{i-1}),
    // b'_i = 1 + q_i b'_{i-1} / d'_{i-1}.
    double log_s = (a > 0 && absorbing[a - 1]) ? safe_log(q[a]) : kNegInf;
    for (std::size_t j = a; j <= b; ++j) {
      if (j > a) {
        log_s = log_mul(safe_log(q[j]), log_s) - log_d[j - 1];
        if (std::isnan(log_s)) log_s = kNegInf;
        log_b[j] = log_add_exp(
            0.0, log_mul(safe_log(q[j]), log_b[j - 1]) - log_d[j - 1]);
      } else {
        log_b[j] = 0.0;
      }
      log_d[j] = log_add_exp(safe_log(p[j]), log_s);
    }
    // E_j = (b'_j + p_j E_{j+1}) / d'_j; E_{b+1} is 0 or irrelevant.
    double log_next = kNegInf;
    for (std::size_t j = b + 1; j-- > a;) {
      const double up = (j + 1 < size && j < b) ? log_mul(safe_log(p[j]), log_next)
                                                : kNegInf;
      log_e[j] = log_add_exp(log_b[j], up) - log_d[j];
      log_next = log_e[j];
    }
    i = b + 1;
  }
  return log_e;
}

std::vector<double> absorption_time(const BirthDeathChain& chain,
                                    bool absorb_low, bool absorb_high) {
  std::vector<double> out = log_absorption_time(chain, absorb_low, absorb_high);
  for (double& v : out) v = std::exp(v);
  return out;
}

ZChain z_chain(const KernelParams& params) {
  params.validate();
  const std::int64_t n = params.n;
  ZChain z;
  z.m = n / 6;
  z.exact_sixth = n % 6 == 0;
  require(z.m >= 1, "z_chain: n must be at least 6");
  z.offset = n / 2 + z.m;
  const BirthDeathChain full = build_birth_death(params);
  const auto m = static_cast<std::size_t>(z.m);
  std::vector<double> up(m + 1, 0.0);
  std::vector<double> down(m + 1, 0.0);
  for (std::size_t i = 0; i <= m; ++i) {
    const auto x = static_cast<std::size_t>(z.offset) + i;
    if (i < m) up[i] = full.p[x];
    if (i > 0) down[i] = full.q[x];
  }
  z.chain = BirthDeathChain::from_rates(std::move(up), std::move(down));
  return z;
}

std::int64_t default_max_steps(std::int64_t n) {
  const double ln = std::ceil(std::log(static_cast<double>(n)));
  const double steps = 100.0 * static_cast<double>(n) * ln;
  return static_cast<std::int64_t>(std::min(1e9, steps));
}

TrajectoryRecord run_sequential(const PopulationState& init,
                                const KernelParams& params,
                                std::int64_t max_steps, Rng& rng,
                                bool record_rows) {
  params.validate();
  require(init.n() == params.n, "state and kernel disagree on n");
  require(max_steps >= 1, "max_steps must be at least 1");
  const std::int64_t n = params.n;
  const std::int64_t k = params.k();
  const double nn = static_cast<double>(n);
  const AreaPartition part(n, k);
  std::int64_t pinned = -1;
  if (init.source()) pinned = *init.source() == Opinion::one ? 0 : n - 1;

  TrajectoryRecord rec;
  rec.initial_minority = minority_view(init).opinion;
  std::int64_t x = init.ones();
  auto area_of = [&](std::int64_t ones) {
    return part.classify(minority_view(n, ones).size);
  };
  auto push = [&](std::int64_t t) {
    const MinorityView view = minority_view(n, x);
    rec.rows.push_back({t, x, view.size, view.opinion, part.classify(view.size), {}, {}});
  };
  if (record_rows) push(0);

  PopulationState state = init;
  Area area = area_of(x);
  std::int64_t t = 0;
  std::int64_t since = 0;
  while (!is_terminal(state) && t < max_steps) {
    ++t;
    // Nodes [0, X) hold opinion 1.
    const std::int64_t v = uniform_index(rng, n);
    if (v == pinned) continue;
    const bool self_one = v < x;
    std::int64_t seen;
    if (params.mode == SamplingMode::with_replacement) {
      seen = draw_binomial(rng, k, static_cast<double>(x) / nn);
    } else {
      seen = draw_hypergeometric(rng, n - 1, x - (self_one ? 1 : 0), k);
    }
    const int next = detail::decide(params.rule.kind, k, seen, rng);
    if (next == (self_one ? 1 : 0)) continue;
    rec.area_time[static_cast<std::size_t>(area)] += t - since;
    since = t;
    x += self_one ? -1 : 1;
    state = state.with_ones(x);
    area = area_of(x);
    if (record_rows) push(t);
  }
  if (!is_terminal(state)) {
    rec.area_time[static_cast<std::size_t>(area)] += t - since;
  }
  rec.time = t;
  rec.final_state = state;
  rec.status = terminal_status(state);
  return rec;
}

}  // namespace minlab
