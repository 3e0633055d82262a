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

// Declarative experiment configuration, multi-trial execution on private
// random streams, and the summary / trajectory serializations.

#pragma once

#include <array>
#include <functional>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minlab/core_model.hpp"
#include "minlab/parallel_sim.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/trajectory.hpp"

namespace minlab {

inline constexpr int kSchemaVersion = 1;
const char* version_string() noexcept;

enum class InitialKind { balanced, source_only, explicit_ones };
enum class RecordKind { summary, trajectory, diagnostic };

std::string_view to_string(RecordKind record);

struct ExperimentConfig {
  std::int64_t n = 0;
  std::int64_t k = 0;
  RuleKind rule = RuleKind::minority;
  Schedule schedule = Schedule::parallel;
  SamplingMode sampling = SamplingMode::with_replacement;
  InitialKind initial = InitialKind::balanced;
  std::int64_t initial_ones = 0;
  std::optional<Opinion> source;
  std::int64_t trials = 1;
  // Rounds (parallel) or activations (sequential); defaults by schedule.
  std::optional<std::int64_t> max_rounds;
  std::optional<std::int64_t> max_steps;
  std::optional<std::uint64_t> seed;
  Stepper stepper = Stepper::aggregate;
  RecordKind record = RecordKind::summary;
  // Substream index of the first trial.
  std::uint64_t first_trial = 0;
  std::string summary_path;
  std::string trajectory_path;

  KernelParams kernel() const;
  PopulationState initial_state() const;
  std::int64_t time_budget() const;
};

// Parses and validates a JSON document. Unknown fields, wrong types and
// violated preconditions throw Error(ErrorCode::config).
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
// Applies one field given as JSON text ("5000", "\"sequential\"", ...).
void set_config_field(ExperimentConfig& config, const std::string& key,
                      const nlohmann::json& value);
void validate_config(ExperimentConfig& config);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct TrialResult {
  std::uint64_t index = 0;
  TerminalStatus status = TerminalStatus::censored;
  std::int64_t time = 0;
  std::int64_t final_ones = 0;
  std::array<std::int64_t, 7> area_time{};
};

struct TimeStats {
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

// Type-7 (linear interpolation) sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);
// Empty when `values` is empty.
std::optional<TimeStats> time_stats(std::vector<double> values);

struct RunSummary {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  std::int64_t converged = 0;
  std::int64_t censored = 0;
  // Over converged trials.
  std::optional<TimeStats> time;
  // Fraction of all trials ending with every node holding the source
  // opinion; empty without a source.
  std::optional<double> dissemination_agreement_rate;
  // Fraction of converged trials whose final opinion is 1.
  std::optional<double> consensus_one_fraction;
  // Mean time per trial spent in each area.
  std::array<double, 7> mean_area_time{};
  double wall_clock_seconds = 0.0;
  std::vector<std::vector<TrajectoryRow>> rows;
};

// 0 means: MINLAB_THREADS if set, else the hardware concurrency.
int resolve_threads(int requested);

// Runs `config.trials` independent trials; trial i uses the stream
// trial_rng(seed, first_trial + i). Results do not depend on `threads`.
RunSummary run_trials(const ExperimentConfig& config, int threads = 0);

// Runs trial `index` of the configuration alone.
TrajectoryRecord run_single_trial(const ExperimentConfig& config,
                                  std::uint64_t index, bool record_rows);

nlohmann::json summary_to_json(const RunSummary& summary,
                               bool include_wall_clock = true);
// Header `trial,t,X,m,opinion,area` plus `,W,U` for diagnostic records.
std::string trajectory_csv(const RunSummary& summary);

// Runs `count` independent jobs on up to `threads` workers; `job(i)` must
// only write to its own slot.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& job);

}  // namespace minlab
