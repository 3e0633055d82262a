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

// Checks of the drift and high-probability statements against exact kernel
// values, empirical area-transit statistics, and convergence-time sweeps.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minlab/core_model.hpp"
#include "minlab/experiment.hpp"
#include "minlab/parallel_sim.hpp"

namespace minlab {

struct DriftPoint {
  std::string label;
  double parameter = 0.0;
  std::int64_t m = 0;
  double exact = 0.0;
  double bound = 0.0;
  bool holds = false;
  // Slack in the direction of the inequality; negative on a violation.
  double margin = 0.0;
};

struct DriftReport {
  std::string name;
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::vector<DriftPoint> points;
  bool verdict = false;
  double worst_margin = 0.0;
  std::vector<std::string> notes;
};

// E[W | m = round(n/2 - alpha sqrt(n))] <= n/2 - 1.8 alpha sqrt(n) for each
// alpha in [1, sqrt(n)/4]. Below k = 185 sqrt(n ln n) the report carries a
// note instead of refusing.
DriftReport check_orange_drift(std::int64_t n, std::int64_t k,
                               const std::vector<double>& alphas);

struct YellowReport {
  DriftReport stated;
  // |f(m) - mbar| >= min{(ln n / 8) |m - mbar|, 0.7 mbar} on the same grid.
  bool capped_verdict = false;
  double capped_worst_margin = 0.0;
  double fixed_point = 0.0;
  // |f(round(mbar)) - mbar|
  double rounding_residual = 0.0;
  bool lower_endpoint_grows = false;   // f(b3) > b3
  bool upper_endpoint_shrinks = false; // f(b4) < b4
};

// Grid: integer m in Yellow with |m - mbar| >= sqrt(n/k), at most 2000
// evenly spaced points. Throws NoFixedPoint for degenerate (n, k).
YellowReport check_yellow_instability(std::int64_t n, std::int64_t k);
// The stated inequality at one m.
DriftPoint yellow_instability_point(std::int64_t n, std::int64_t k,
                                    std::int64_t m, double fixed_point);

// E[U] <= n^-2 at ceil(3n ln n / k); E[W] <= n^-2 at
// floor(n/2 - n sqrt(1.5 ln n / k)); E[U] >= 0.69 n at floor(n / 3k);
// E[U] <= 0.15 n at ceil(2n / k). Requires k >= 5 ln n.
DriftReport check_whp_thresholds(std::int64_t n, std::int64_t k);

struct TransitConfig {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t initial_ones = 0;
  std::int64_t trials = 1;
  std::int64_t max_rounds = 0;  // 0: default_max_rounds(n)
  Stepper stepper = Stepper::aggregate;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct AreaTransit {
  std::int64_t visits = 0;
  std::int64_t rounds = 0;
  std::int64_t max_dwell = 0;
  // Destination of each completed visit, indexed by Area.
  std::array<std::int64_t, 7> exits{};
  // Visits left after one round into consensus with an opinion flip.
  std::int64_t immediate_flip_consensus = 0;

  double mean_dwell() const noexcept {
    return visits ? static_cast<double>(rounds) / static_cast<double>(visits)
                  : 0.0;
  }
};

struct TrialTransit {
  Area initial = Area::consensus;
  // Rounds until the first round outside the initial area; -1 if never.
  std::int64_t first_exit_time = -1;
  Area first_exit_area = Area::consensus;
  bool first_exit_flipped = false;
  // Minority label after the first round differs from the initial one.
  bool flipped_after_one_round = false;
};

struct TransitReport {
  std::array<AreaTransit, 7> areas{};
  std::vector<TrialTransit> trials;
  // Diagnostic stepper: rounds started in Green, and among them those with
  // both W > 0 and U > 0.
  std::int64_t green_rounds = 0;
  std::int64_t green_w_and_u = 0;
};

// Parallel minority rule, with-replacement sampling, no source.
TransitReport area_transit_stats(const TransitConfig& config);

struct DisseminationReport {
  std::int64_t trials = 0;
  // All nodes agree with the source after two rounds.
  std::int64_t recovered_two_rounds = 0;
  // After one round the source opinion is still the minority label.
  std::int64_t same_label_after_one = 0;
  // After one round the minority size lies in Green.
  std::int64_t green_after_one = 0;

  double recovery_fraction() const noexcept {
    return trials ? static_cast<double>(recovered_two_rounds) /
                        static_cast<double>(trials)
                  : 0.0;
  }
};

// Minority rule with a source holding 1 and X = 1 (only the source is
// right); two aggregate rounds per trial.
DisseminationReport check_bit_dissemination_recovery(std::int64_t n,
                                                     std::int64_t k,
                                                     std::int64_t trials,
                                                     std::uint64_t seed,
                                                     int threads = 0);

enum class SweepAxis { n, k };

struct SweepSpec {
  SweepAxis axis = SweepAxis::n;
  std::vector<std::int64_t> points;
  ExperimentConfig base;
  // Axis n only: k = ceil(185 sqrt(n ln n)) at each point.
  bool k_from_n = false;
  // Sequential schedule only: exact absorption time from n/2 instead of
  // simulation.
  bool exact = false;
};

struct SweepPoint {
  std::int64_t axis = 0;
  std::int64_t k = 0;
  std::optional<TimeStats> time;
  double censored_fraction = 0.0;
  std::optional<double> log_exact_time;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::n;
  bool exact = false;
  std::vector<SweepPoint> points;
  // Least-squares slopes of the median against ln(axis) and ln(axis)^2
  // (simulated sweeps), or of ln(exact time) against n k (exact sweeps).
  std::optional<double> slope_ln;
  std::optional<double> slope_ln2;
  std::optional<double> slope_log_time_vs_nk;
};

// ceil(185 sqrt(n ln n))
std::int64_t fast_regime_k(std::int64_t n);

SweepSpec parse_sweep_spec(const nlohmann::json& doc);
SweepResult convergence_sweep(const SweepSpec& spec, int threads = 0);

// Least-squares slope of y on x; empty with fewer than two distinct x.
std::optional<double> ls_slope(const std::vector<double>& x,
                               const std::vector<double>& y);

nlohmann::json to_json(const DriftReport& report);
nlohmann::json to_json(const YellowReport& report);
nlohmann::json to_json(const TransitReport& report);
nlohmann::json to_json(const DisseminationReport& report);
nlohmann::json to_json(const SweepResult& result);
// Header `axis,median,q10,q90,censored_frac`.
std::string sweep_csv(const SweepResult& result);

}  // namespace minlab
