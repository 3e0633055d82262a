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

#include "minlab/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "minlab/error.hpp"
#include "minlab/prob_kernel.hpp"

namespace minlab {
namespace {

// Slack for comparisons in log space, absorbing floating-point rounding only.
constexpr double kLogSlack = 1e-12;

// Integer-valued thresholds such as mu + t computed as 40.000000000000004.
double snap(double a) {
  const double r = std::nearbyint(a);
  return std::fabs(a - r) <= 1e-9 * std::max(1.0, std::fabs(a)) ? r : a;
}

std::int64_t to_index(double a) { return static_cast<std::int64_t>(a); }

double log_gt(std::int64_t n, double p, double a) {
  return log_binomial_tail_geq(n, p, to_index(std::floor(snap(a))) + 1);
}
double log_geq(std::int64_t n, double p, double a) {
  return log_binomial_tail_geq(n, p, to_index(std::ceil(snap(a))));
}
double log_lt(std::int64_t n, double p, double a) {
  return log_binomial_range(n, p, 0, to_index(std::ceil(snap(a))) - 1);
}
double log_leq(std::int64_t n, double p, double a) {
  return log_binomial_range(n, p, 0, to_index(std::floor(snap(a))));
}

BoundEvaluation upper(double log_exact, double log_bound) {
  return {log_exact, log_bound, log_exact <= log_bound + kLogSlack};
}
BoundEvaluation lower(double log_exact, double log_bound) {
  return {log_exact, log_bound, log_exact >= log_bound - kLogSlack};
}

void check_np(std::int64_t n, double p) {
  require(n >= 1, "bound: n must be positive");
  require(p > 0.0 && p < 1.0, "bound: p must lie in (0, 1)");
}

double mean(std::int64_t n, double p) { return static_cast<double>(n) * p; }

}  // namespace

BoundEvaluation additive_chernoff_upper(std::int64_t n, double p, double t) {
  check_np(n, p);
  require(t > 0.0, "additive Chernoff: t must be positive");
  return upper(log_gt(n, p, mean(n, p) + t),
               -2.0 * t * t / static_cast<double>(n));
}

BoundEvaluation additive_chernoff_lower(std::int64_t n, double p, double t) {
  check_np(n, p);
  require(t > 0.0, "additive Chernoff: t must be positive");
  return upper(log_lt(n, p, mean(n, p) - t),
               -2.0 * t * t / static_cast<double>(n));
}

BoundEvaluation multiplicative_chernoff_upper(std::int64_t n, double p,
                                              double eps) {
  check_np(n, p);
  require(eps > 0.0 && eps <= 1.0,
          "multiplicative Chernoff: eps must lie in (0, 1]");
  const double mu = mean(n, p);
  return upper(log_gt(n, p, (1.0 + eps) * mu), -eps * eps * mu / 2.0);
}

BoundEvaluation multiplicative_chernoff_lower(std::int64_t n, double p,
                                              double eps) {
  check_np(n, p);
  require(eps > 0.0 && eps < 1.0,
          "multiplicative Chernoff: eps must lie in (0, 1)");
  const double mu = mean(n, p);
  return upper(log_lt(n, p, (1.0 - eps) * mu), -eps * eps * mu / 2.0);
}

BoundEvaluation reverse_chernoff_quarter(std::int64_t n, double p, double t) {
  check_np(n, p);
  const double mu = mean(n, p);
  require(p <= 0.25, "reverse Chernoff: p must be at most 1/4");
  require(mu >= 3.0, "reverse Chernoff: mean must be at least 3");
  require(t >= 0.0 && mu + t <= static_cast<double>(n),
          "reverse Chernoff: t must lie in [0, n - mu]");
  return lower(log_geq(n, p, mu + t),
               std::log(0.25) - 2.0 * t * t / mu);
}

BoundEvaluation reverse_chernoff_half(std::int64_t n, double p, double t) {
  check_np(n, p);
  const double mu = mean(n, p);
  require(p <= 0.5, "reverse Chernoff: p must be at most 1/2");
  require(mu >= 3.0, "reverse Chernoff: mean must be at least 3");
  require(t >= 0.0 && t <= static_cast<double>(n) * (1.0 - 2.0 * p),
          "reverse Chernoff: t must lie in [0, n(1 - 2p)]");
  return lower(log_gt(n, p, mu + t), std::log(0.25) - 2.0 * t * t / mu);
}

namespace {

void check_delta(std::int64_t n, double p, double delta) {
  check_np(n, p);
  require(delta > 0.0 && delta <= 0.5,
          "reverse Chernoff: delta must lie in (0, 1/2]");
  require(delta * delta * mean(n, p) >= 3.0,
          "reverse Chernoff: delta^2 mu must be at least 3");
}

}  // namespace

BoundEvaluation reverse_chernoff_upper_tail(std::int64_t n, double p,
                                            double delta) {
  check_delta(n, p, delta);
  const double mu = mean(n, p);
  return lower(log_geq(n, p, (1.0 + delta) * mu), -9.0 * delta * delta * mu);
}

BoundEvaluation reverse_chernoff_lower_tail(std::int64_t n, double p,
                                            double delta) {
  check_delta(n, p, delta);
  const double mu = mean(n, p);
  return lower(log_leq(n, p, (1.0 - delta) * mu), -9.0 * delta * delta * mu);
}

ExpTaylorEvaluation exp_taylor(double y, std::int64_t k) {
  require(y >= 0.0 && y <= 0.6, "exp_taylor: x/n must lie in [0, 0.6]");
  require(k >= 1, "exp_taylor: k must be positive");
  const double kk = static_cast<double>(k);
  ExpTaylorEvaluation out;
  out.log_terms[0] = -2.0 * kk * y;
  out.log_terms[1] = -kk * y - kk * y * y;
  out.log_terms[2] = kk * std::log1p(-y);
  out.log_terms[3] = -kk * y;
  out.holds = true;
  for (int i = 0; i < 3; ++i) {
    const double scale = std::max(1.0, std::fabs(out.log_terms[i]));
    if (out.log_terms[i] > out.log_terms[i + 1] + kLogSlack * scale) {
      out.holds = false;
    }
  }
  return out;
}

CentralBinomialEvaluation central_binomial(std::int64_t n) {
  require(n >= 1 && n <= 100000, "central binomial: n must lie in [1, 1e5]");
  CentralBinomialEvaluation out;
  out.n = n;
  if (n <= 33) {
    // C(2i, i) = C(2i - 2, i - 1) * 2 (2i - 1) / i, exact at every step.
    unsigned __int128 c = 1;
    for (std::int64_t i = 1; i <= n; ++i) {
      c = c * 2 * static_cast<unsigned __int128>(2 * i - 1) /
          static_cast<unsigned __int128>(i);
    }
    out.exact = static_cast<std::uint64_t>(c);
    out.log_coefficient = std::log(static_cast<double>(*out.exact));
  } else {
    const double nn = static_cast<double>(n);
    out.log_coefficient = std::lgamma(2.0 * nn + 1.0) - 2.0 * std::lgamma(nn + 1.0);
  }
  const double nn = static_cast<double>(n);
  out.log_upper = nn * std::log(4.0) - 0.5 * std::log(std::numbers::pi * nn);
  out.log_lower = out.log_upper - std::numbers::ln2;
  out.holds = out.log_lower <= out.log_coefficient + kLogSlack &&
              out.log_coefficient <= out.log_upper + kLogSlack;
  return out;
}

namespace {

// Low-discrepancy coordinates in [0, 1).
double weyl(std::size_t i, double alpha) {
  const double x = static_cast<double>(i + 1) * alpha;
  return x - std::floor(x);
}

constexpr double kA1 = 0.61803398874989485;
constexpr double kA2 = 0.41421356237309505;
constexpr double kA3 = 0.73205080756887729;
constexpr std::array<std::int64_t, 8> kSizes = {10, 20, 30, 50,
                                                100, 200, 500, 1000};
constexpr std::size_t kGridPoints = 200;

std::int64_t size_at(std::size_t i) {
  return kSizes[static_cast<std::size_t>(weyl(i, kA3) * kSizes.size())];
}

std::int64_t at_least(std::int64_t n, double lower_bound) {
  return std::max(n, static_cast<std::int64_t>(std::ceil(lower_bound)));
}

void tally(BoundSuiteResult& r, double margin, bool holds) {
  if (r.points == 0 || margin < r.worst_log_margin) r.worst_log_margin = margin;
  ++r.points;
  if (!holds) ++r.violations;
}

using PointFn = std::function<BoundEvaluation(std::size_t)>;

BoundSuiteResult run_upper(const std::string& name, const PointFn& fn) {
  BoundSuiteResult r{name};
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const BoundEvaluation e = fn(i);
    tally(r, e.log_bound - e.log_exact, e.holds);
  }
  return r;
}

BoundSuiteResult run_lower(const std::string& name, const PointFn& fn) {
  BoundSuiteResult r{name};
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const BoundEvaluation e = fn(i);
    tally(r, e.log_exact - e.log_bound, e.holds);
  }
  return r;
}

}  // namespace

std::vector<BoundSuiteResult> run_bound_suites() {
  std::vector<BoundSuiteResult> out;
  out.push_back(run_upper("additive-chernoff-upper", [](std::size_t i) {
    const std::int64_t n = size_at(i);
    const double t = 0.05 + 3.0 * std::sqrt(static_cast<double>(n)) * weyl(i, kA2);
    return additive_chernoff_upper(n, 0.02 + 0.96 * weyl(i, kA1), t);
  }));
  out.push_back(run_upper("additive-chernoff-lower", [](std::size_t i) {
    const std::int64_t n = size_at(i);
    const double t = 0.05 + 3.0 * std::sqrt(static_cast<double>(n)) * weyl(i, kA2);
    return additive_chernoff_lower(n, 0.02 + 0.96 * weyl(i, kA1), t);
  }));
  out.push_back(run_upper("multiplicative-chernoff-upper", [](std::size_t i) {
    return multiplicative_chernoff_upper(size_at(i), 0.02 + 0.96 * weyl(i, kA1),
                                         0.01 + 0.99 * weyl(i, kA2));
  }));
  out.push_back(run_upper("multiplicative-chernoff-lower", [](std::size_t i) {
    return multiplicative_chernoff_lower(size_at(i), 0.02 + 0.96 * weyl(i, kA1),
                                         0.01 + 0.98 * weyl(i, kA2));
  }));
  out.push_back(run_lower("reverse-chernoff-quarter", [](std::size_t i) {
    const double p = 0.25 * (0.05 + 0.95 * weyl(i, kA1));
    const std::int64_t n = at_least(size_at(i), 3.0 / p);
    const double mu = mean(n, p);
    const double t_max = std::min(4.0 * std::sqrt(mu), static_cast<double>(n) - mu);
    return reverse_chernoff_quarter(n, p, t_max * weyl(i, kA2));
  }));
  out.push_back(run_lower("reverse-chernoff-half", [](std::size_t i) {
    const double p = 0.5 * (0.05 + 0.95 * weyl(i, kA1));
    const std::int64_t n = at_least(size_at(i), 3.0 / p);
    const double mu = mean(n, p);
    const double t_max = std::min(4.0 * std::sqrt(mu),
                                  static_cast<double>(n) * (1.0 - 2.0 * p));
    return reverse_chernoff_half(n, p, t_max * weyl(i, kA2));
  }));
  out.push_back(run_lower("reverse-chernoff-upper-tail", [](std::size_t i) {
    const double p = 0.05 + 0.45 * weyl(i, kA1);
    const double delta = 0.05 + 0.45 * weyl(i, kA2);
    const std::int64_t n = at_least(size_at(i), 3.0 / (delta * delta * p));
    return reverse_chernoff_upper_tail(n, p, delta);
  }));
  out.push_back(run_lower("reverse-chernoff-lower-tail", [](std::size_t i) {
    const double p = 0.05 + 0.45 * weyl(i, kA1);
    const double delta = 0.05 + 0.45 * weyl(i, kA2);
    const std::int64_t n = at_least(size_at(i), 3.0 / (delta * delta * p));
    return reverse_chernoff_lower_tail(n, p, delta);
  }));

  BoundSuiteResult central{"central-binomial"};
  for (std::int64_t n = 10; n <= 200; ++n) {
    const CentralBinomialEvaluation e = central_binomial(n);
    tally(central,
          std::min(e.log_coefficient - e.log_lower,
                   e.log_upper - e.log_coefficient),
          e.holds);
  }
  out.push_back(central);

  constexpr std::array<std::int64_t, 10> kSamples = {
      1, 2, 5, 10, 20, 50, 100, 1000, 10000, 100000};
  BoundSuiteResult taylor{"exp-taylor"};
  for (std::size_t i = 0; i < 100; ++i) {
    const double y = 0.6 * static_cast<double>(i / 10 + 1) / 10.0 *
                     (0.5 + 0.5 * weyl(i, kA1));
    const ExpTaylorEvaluation e = exp_taylor(y, kSamples[i % 10]);
    double margin = kInf;
    for (int j = 0; j < 3; ++j) {
      margin = std::min(margin, e.log_terms[j + 1] - e.log_terms[j]);
    }
    tally(taylor, margin, e.holds);
  }
  out.push_back(taylor);
  return out;
}

}  // namespace minlab
