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

// Chi-square goodness of fit against a binomial law, used by the stepper
// equivalence tests. The reference pmf is computed here from lgamma so it
// shares no code with the library kernel.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace minlab::testing {

inline double reference_binomial_pmf(std::int64_t n, double p,
                                     std::int64_t j) {
  if (j < 0 || j > n) return 0.0;
  if (p <= 0.0) return j == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return j == n ? 1.0 : 0.0;
  const double nn = static_cast<double>(n);
  const double jj = static_cast<double>(j);
  const double log_pmf = std::lgamma(nn + 1.0) - std::lgamma(jj + 1.0) -
                         std::lgamma(nn - jj + 1.0) + jj * std::log(p) +
                         (nn - jj) * std::log1p(-p);
  return std::exp(log_pmf);
}

struct GofResult {
  double statistic = 0.0;
  int bins = 0;
  double p_value = 1.0;
  // Samples that landed where the reference law has no mass.
  std::int64_t impossible = 0;
};

// `counts[j]` is the number of samples equal to j, j = 0..n.
inline GofResult chi_square_binomial(const std::vector<std::int64_t>& counts,
                                     std::int64_t n, double p) {
  std::int64_t total = 0;
  for (const auto c : counts) total += c;
  const double samples = static_cast<double>(total);

  GofResult out;
  std::vector<double> expected_bins;
  std::vector<double> observed_bins;
  double exp_acc = 0.0;
  double obs_acc = 0.0;
  for (std::int64_t j = 0; j <= n; ++j) {
    const double pmf = reference_binomial_pmf(n, p, j);
    const double obs = static_cast<double>(counts[static_cast<std::size_t>(j)]);
    if (pmf == 0.0 && obs > 0.0) out.impossible += counts[static_cast<std::size_t>(j)];
    exp_acc += pmf * samples;
    obs_acc += obs;
    if (exp_acc >= 5.0) {
      expected_bins.push_back(exp_acc);
      observed_bins.push_back(obs_acc);
      exp_acc = 0.0;
      obs_acc = 0.0;
    }
  }
  if (expected_bins.empty()) {
    expected_bins.push_back(exp_acc);
    observed_bins.push_back(obs_acc);
  } else {
    expected_bins.back() += exp_acc;
    observed_bins.back() += obs_acc;
  }

  out.bins = static_cast<int>(expected_bins.size());
  for (std::size_t b = 0; b < expected_bins.size(); ++b) {
    const double d = observed_bins[b] - expected_bins[b];
    out.statistic += d * d / expected_bins[b];
  }
  if (out.bins > 1) {
    const double dof = static_cast<double>(out.bins - 1);
    out.p_value = boost::math::gamma_q(dof / 2.0, out.statistic / 2.0);
  }
  return out;
}

}  // namespace minlab::testing
