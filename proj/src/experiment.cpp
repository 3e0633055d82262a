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

#include "minlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <mutex>
#include <thread>

#include "minlab/error.hpp"
#include "minlab/random.hpp"
#include "minlab/sequential_sim.hpp"

namespace minlab {

const char* version_string() noexcept { return "1.0.0"; }

std::string_view to_string(RecordKind record) {
  switch (record) {
    case RecordKind::summary:
      return "summary";
    case RecordKind::trajectory:
      return "trajectory";
    case RecordKind::diagnostic:
      return "diagnostic";
  }
  return "summary";
}

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  fail(ErrorCode::config, what);
}

std::int64_t get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) config_error("field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) config_error("field '" + key + "' must be a string");
  return v.get<std::string>();
}

template <class T, class Parse>
T get_enum(const json& v, const std::string& key, Parse parse) {
  const auto parsed = parse(get_string(v, key));
  if (!parsed) config_error("field '" + key + "' has an unknown value");
  return *parsed;
}

std::optional<RecordKind> parse_record(std::string_view text) {
  if (text == "summary") return RecordKind::summary;
  if (text == "trajectory") return RecordKind::trajectory;
  if (text == "diagnostic") return RecordKind::diagnostic;
  return std::nullopt;
}

}  // namespace

KernelParams ExperimentConfig::kernel() const {
  const UpdateRule r = rule == RuleKind::voter ? UpdateRule::voter()
                                               : UpdateRule{rule, k};
  return KernelParams{r, n, sampling};
}

PopulationState ExperimentConfig::initial_state() const {
  switch (initial) {
    case InitialKind::balanced:
      return PopulationState(n, n / 2, source);
    case InitialKind::source_only:
      return PopulationState(n, *source == Opinion::one ? 1 : n - 1, source);
    case InitialKind::explicit_ones:
      return PopulationState(n, initial_ones, source);
  }
  return PopulationState(n, n / 2, source);
}

std::int64_t ExperimentConfig::time_budget() const {
  if (schedule == Schedule::parallel) {
    return max_rounds.value_or(default_max_rounds(n));
  }
  return max_steps.value_or(default_max_steps(n));
}

void set_config_field(ExperimentConfig& c, const std::string& key,
                      const json& v) {
  if (key == "n") {
    c.n = get_int(v, key);
  } else if (key == "k") {
    c.k = get_int(v, key);
  } else if (key == "rule") {
    c.rule = get_enum<RuleKind>(v, key, parse_rule);
  } else if (key == "schedule") {
    c.schedule = get_enum<Schedule>(v, key, parse_schedule);
  } else if (key == "sampling") {
    c.sampling = get_enum<SamplingMode>(v, key, parse_sampling);
  } else if (key == "initial") {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "balanced") {
        c.initial = InitialKind::balanced;
      } else if (s == "source-only") {
        c.initial = InitialKind::source_only;
      } else {
        config_error("field 'initial' must be \"balanced\", \"source-only\" or an integer");
      }
    } else {
      c.initial = InitialKind::explicit_ones;
      c.initial_ones = get_int(v, key);
    }
  } else if (key == "source") {
    if (v.is_null()) {
      c.source.reset();
    } else {
      const std::int64_t s = get_int(v, key);
      if (s != 0 && s != 1) config_error("field 'source' must be null, 0 or 1");
      c.source = s == 1 ? Opinion::one : Opinion::zero;
    }
  } else if (key == "trials") {
    c.trials = get_int(v, key);
  } else if (key == "max_rounds") {
    c.max_rounds = get_int(v, key);
  } else if (key == "max_steps") {
    c.max_steps = get_int(v, key);
  } else if (key == "seed") {
    if (v.is_null()) {
      c.seed.reset();
      return;
    }
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      config_error("field 'seed' must be a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  } else if (key == "stepper") {
    c.stepper = get_enum<Stepper>(v, key, parse_stepper);
  } else if (key == "record") {
    c.record = get_enum<RecordKind>(v, key, parse_record);
  } else if (key == "first_trial") {
    const std::int64_t f = get_int(v, key);
    if (f < 0) config_error("field 'first_trial' must be non-negative");
    c.first_trial = static_cast<std::uint64_t>(f);
  } else if (key == "summary_path") {
    c.summary_path = get_string(v, key);
  } else if (key == "trajectory_path") {
    c.trajectory_path = get_string(v, key);
  } else if (key == "schema_version") {
    if (get_int(v, key) != kSchemaVersion) config_error("unsupported schema_version");
  } else {
    config_error("unknown field '" + key + "'");
  }
}

void validate_config(ExperimentConfig& c) {
  if (c.n < 4) config_error("n must be at least 4");
  if (c.rule == RuleKind::voter) c.k = 1;
  if (c.k < 1) config_error("k must be at least 1");
  if (c.k > c.n) config_error("k must not exceed n");
  if (c.sampling == SamplingMode::exclusive && c.k > c.n - 1) {
    config_error("exclusive sampling needs k <= n - 1");
  }
  if (c.trials < 1) config_error("trials must be at least 1");
  if (c.max_rounds && *c.max_rounds < 1) config_error("max_rounds must be at least 1");
  if (c.max_steps && *c.max_steps < 1) config_error("max_steps must be at least 1");
  if (c.schedule == Schedule::parallel && c.max_steps) {
    config_error("max_steps applies to the sequential schedule; use max_rounds");
  }
  if (c.schedule == Schedule::sequential && c.max_rounds) {
    config_error("max_rounds applies to the parallel schedule; use max_steps");
  }
  if (c.initial == InitialKind::source_only && !c.source) {
    config_error("initial \"source-only\" needs a source");
  }
  if (c.initial == InitialKind::explicit_ones) {
    if (c.initial_ones < 0 || c.initial_ones > c.n) {
      config_error("initial must lie in [0, n]");
    }
    if (c.source == Opinion::one && c.initial_ones < 1) {
      config_error("a source with opinion 1 needs initial >= 1");
    }
    if (c.source == Opinion::zero && c.initial_ones > c.n - 1) {
      config_error("a source with opinion 0 needs initial <= n - 1");
    }
  }
  if (c.schedule == Schedule::parallel) {
    const bool diag = c.stepper == Stepper::diagnostic;
    if (diag && (c.rule != RuleKind::minority || c.source ||
                 c.sampling != SamplingMode::with_replacement)) {
      config_error("the diagnostic stepper needs the minority rule, "
                   "with-replacement sampling and no source");
    }
    if (c.record == RecordKind::diagnostic && !diag) {
      config_error("record \"diagnostic\" needs the diagnostic stepper");
    }
  } else if (c.record == RecordKind::diagnostic) {
    config_error("record \"diagnostic\" is only available for parallel runs");
  }
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) config_error("the configuration must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) set_config_field(c, key, value);
  if (!doc.contains("n")) config_error("missing field 'n'");
  if (!doc.contains("k") && c.rule != RuleKind::voter) config_error("missing field 'k'");
  validate_config(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["rule"] = to_string(c.rule);
  j["schedule"] = to_string(c.schedule);
  j["sampling"] = to_string(c.sampling);
  switch (c.initial) {
    case InitialKind::balanced:
      j["initial"] = "balanced";
      break;
    case InitialKind::source_only:
      j["initial"] = "source-only";
      break;
    case InitialKind::explicit_ones:
      j["initial"] = c.initial_ones;
      break;
  }
  j["source"] = c.source ? json(to_int(*c.source)) : json(nullptr);
  j["trials"] = c.trials;
  if (c.schedule == Schedule::parallel) {
    j["max_rounds"] = c.time_budget();
  } else {
    j["max_steps"] = c.time_budget();
  }
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["stepper"] = to_string(c.stepper);
  j["record"] = to_string(c.record);
  j["first_trial"] = c.first_trial;
  if (!c.summary_path.empty()) j["summary_path"] = c.summary_path;
  if (!c.trajectory_path.empty()) j["trajectory_path"] = c.trajectory_path;
  return j;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  require(!sorted.empty(), "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::optional<TimeStats> time_stats(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  TimeStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.median = quantile_sorted(values, 0.5);
  s.q10 = quantile_sorted(values, 0.1);
  s.q90 = quantile_sorted(values, 0.9);
  return s;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MINLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(threads)), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

TrajectoryRecord run_single_trial(const ExperimentConfig& config,
                                  std::uint64_t index, bool record_rows) {
  require(config.seed.has_value(), "a master seed is required");
  Rng rng = trial_rng(*config.seed, index);
  const KernelParams params = config.kernel();
  const PopulationState init = config.initial_state();
  if (config.schedule == Schedule::parallel) {
    return run_trajectory(init, params, config.time_budget(), config.stepper,
                          rng, record_rows);
  }
  return run_sequential(init, params, config.time_budget(), rng, record_rows);
}

RunSummary run_trials(const ExperimentConfig& config, int threads) {
  ExperimentConfig checked = config;
  validate_config(checked);
  require(checked.seed.has_value(), "a master seed is required");
  const auto start = std::chrono::steady_clock::now();
  const auto count = static_cast<std::size_t>(checked.trials);
  const bool record = checked.record != RecordKind::summary;

  RunSummary s;
  s.config = checked;
  s.trials.resize(count);
  if (record) s.rows.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const std::uint64_t index = checked.first_trial + i;
    TrajectoryRecord rec = run_single_trial(checked, index, record);
    TrialResult& r = s.trials[i];
    r.index = index;
    r.status = rec.status;
    r.time = rec.time;
    r.final_ones = rec.final_state.ones();
    r.area_time = rec.area_time;
    if (record) s.rows[i] = std::move(rec.rows);
  });

  std::vector<double> times;
  std::int64_t agree = 0;
  std::int64_t ones_final = 0;
  for (const TrialResult& r : s.trials) {
    for (std::size_t a = 0; a < r.area_time.size(); ++a) {
      s.mean_area_time[a] += static_cast<double>(r.area_time[a]);
    }
    if (r.status == TerminalStatus::censored) {
      ++s.censored;
      continue;
    }
    ++s.converged;
    times.push_back(static_cast<double>(r.time));
    if (r.final_ones == checked.n) ++ones_final;
    if (r.status == TerminalStatus::disseminated) ++agree;
  }
  for (double& v : s.mean_area_time) v /= static_cast<double>(count);
  s.time = time_stats(std::move(times));
  if (checked.source) {
    s.dissemination_agreement_rate =
        static_cast<double>(agree) / static_cast<double>(count);
  }
  if (s.converged > 0) {
    s.consensus_one_fraction =
        static_cast<double>(ones_final) / static_cast<double>(s.converged);
  }
  s.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

json summary_to_json(const RunSummary& s, bool include_wall_clock) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = version_string();
  j["config"] = config_to_json(s.config);
  j["trials"] = static_cast<std::int64_t>(s.trials.size());
  j["converged"] = s.converged;
  j["censored"] = s.censored;
  if (s.time) {
    j["time"] = {{"mean", s.time->mean},
                 {"median", s.time->median},
                 {"q10", s.time->q10},
                 {"q90", s.time->q90}};
  } else {
    j["time"] = nullptr;
  }
  j["dissemination_agreement_rate"] =
      s.dissemination_agreement_rate ? json(*s.dissemination_agreement_rate)
                                     : json(nullptr);
  j["consensus_one_fraction"] =
      s.consensus_one_fraction ? json(*s.consensus_one_fraction) : json(nullptr);
  json areas = json::object();
  for (Area a : kAllAreas) {
    areas[std::string(to_string(a))] =
        s.mean_area_time[static_cast<std::size_t>(a)];
  }
  j["mean_area_time"] = areas;
  json records = json::array();
  for (const TrialResult& r : s.trials) {
    records.push_back({{"index", r.index},
                       {"status", to_string(r.status)},
                       {"time", r.time},
                       {"final_X", r.final_ones}});
  }
  j["trial_records"] = records;
  if (include_wall_clock) j["wall_clock_seconds"] = s.wall_clock_seconds;
  return j;
}

std::string trajectory_csv(const RunSummary& s) {
  const bool diag = s.config.record == RecordKind::diagnostic;
  std::ostringstream out;
  out << "trial,t,X,m,opinion,area" << (diag ? ",W,U" : "") << '\n';
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    for (const TrajectoryRow& row : s.rows[i]) {
      out << s.trials[i].index << ',' << row.t << ',' << row.ones << ','
          << row.m << ',' << to_int(row.opinion) << ',' << to_string(row.area);
      if (diag) {
        out << ',';
        if (row.w) out << *row.w;
        out << ',';
        if (row.u) out << *row.u;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace minlab
