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

// minlab command-line driver. Talks to the library only through minlab.h.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "minlab/minlab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCensored = 3;

struct CString {
  char* p = nullptr;
  ~CString() { minlab_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

int report(minlab_status status) {
  std::cerr << "minlab: " << minlab_last_error() << '\n';
  switch (status) {
    case MINLAB_ERR_CONFIG:
    case MINLAB_ERR_UNKNOWN_SUITE:
      return kExitConfig;
    default:
      return kExitFailure;
  }
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  return static_cast<bool>(out);
}

int threads_option(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MINLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;
}

// A command-line value as JSON: numbers, null and quoted strings pass
// through, bare words become strings.
nlohmann::json as_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return text;
  }
}

struct SimulateArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  std::optional<std::uint64_t> seed;
  std::string summary_path;
  std::string trajectory_path;
  bool no_wall_clock = false;
  int threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  nlohmann::json doc = nlohmann::json::object();
  if (!a.config_path.empty()) {
    std::string text;
    if (!read_file(a.config_path, text)) {
      std::cerr << "minlab: cannot read " << a.config_path << '\n';
      return kExitConfig;
    }
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "minlab: malformed config: " << e.what() << '\n';
      return kExitConfig;
    }
    if (!doc.is_object()) {
      std::cerr << "minlab: the configuration must be a JSON object\n";
      return kExitConfig;
    }
  }
  for (const auto& [key, value] : a.flags) doc[key] = as_json(value);
  for (const std::string& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "minlab: --set expects key=value, got '" << kv << "'\n";
      return kExitConfig;
    }
    doc[kv.substr(0, eq)] = as_json(kv.substr(eq + 1));
  }
  if (a.seed) doc["seed"] = *a.seed;
  if (!a.summary_path.empty()) doc["summary_path"] = a.summary_path;
  if (!a.trajectory_path.empty()) doc["trajectory_path"] = a.trajectory_path;

  minlab_config* raw_cfg = nullptr;
  if (auto st = minlab_config_parse(doc.dump().c_str(), &raw_cfg)) return report(st);
  std::unique_ptr<minlab_config, decltype(&minlab_config_free)> cfg(raw_cfg, minlab_config_free);

  minlab_result* raw_res = nullptr;
  if (auto st = minlab_simulate(cfg.get(), threads_option(a.threads), &raw_res)) {
    return report(st);
  }
  std::unique_ptr<minlab_result, decltype(&minlab_result_free)> res(raw_res, minlab_result_free);

  CString summary;
  if (auto st = minlab_result_summary_json(res.get(), a.no_wall_clock ? 0 : 1, &summary.p)) {
    return report(st);
  }
  const std::string summary_path = doc.value("summary_path", std::string());
  if (!write_text(summary_path, summary.str())) {
    std::cerr << "minlab: cannot write " << summary_path << '\n';
    return kExitFailure;
  }
  const std::string record = doc.value("record", std::string("summary"));
  if (record != "summary") {
    CString csv;
    if (auto st = minlab_result_trajectory_csv(res.get(), &csv.p)) return report(st);
    const std::string path = doc.value("trajectory_path", std::string());
    if (path.empty()) {
      std::cerr << "minlab: trajectory recording needs trajectory_path\n";
      return kExitConfig;
    }
    if (!write_text(path, csv.str())) {
      std::cerr << "minlab: cannot write " << path << '\n';
      return kExitFailure;
    }
  }
  std::int64_t trials = 0, converged = 0, censored = 0;
  minlab_result_counts(res.get(), &trials, &converged, &censored);
  return censored == trials ? kExitCensored : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and exact analysis of k-minority opinion dynamics"};
  app.set_version_flag("--version", std::string(minlab_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run trials of an experiment configuration");
  simulate->add_option("config", sim.config_path, "JSON configuration file");
  simulate->add_option("--set", sim.sets, "Override a field: key=value (repeatable)");
  for (const char* key : {"n", "k", "rule", "schedule", "sampling", "initial", "source", "trials",
                          "max_rounds", "max_steps", "stepper", "record", "first_trial"}) {
    std::string flag = std::string("--") + key;
    for (char& c : flag) if (c == '_') c = '-';
    simulate->add_option_function<std::string>(
        flag, [&sim, key](const std::string& v) { sim.flags[key] = v; },
        std::string("Override field '") + key + "'");
  }
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--summary", sim.summary_path, "Summary JSON path (default stdout)");
  simulate->add_option("--trajectory", sim.trajectory_path, "Trajectory CSV path");
  simulate->add_flag("--no-wall-clock", sim.no_wall_clock, "Omit the wall-clock field");
  simulate->add_option("--threads", sim.threads, "Worker threads (default MINLAB_THREADS)");

  std::string chain_rule = "minority";
  std::string chain_sampling = "with-replacement";
  std::int64_t chain_n = 0, chain_k = 0;
  bool z_chain = false;
  std::string chain_format = "csv";
  auto* chain = app.add_subcommand("chain", "Exact birth-death chain of the sequential dynamics");
  chain->add_option("--rule", chain_rule)->check(CLI::IsMember({"minority", "majority", "voter"}));
  chain->add_option("--n", chain_n)->required();
  chain->add_option("--k", chain_k, "Sample size (ignored for voter)");
  chain->add_option("--sampling", chain_sampling)->check(CLI::IsMember({"with-replacement", "exclusive"}));
  chain->add_flag("--z-chain", z_chain, "Emit the central-band escape chain instead");
  chain->add_option("--format", chain_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::int64_t areas_n = 0, areas_k = 0;
  auto* areas = app.add_subcommand("areas", "Area thresholds and fixed points");
  areas->add_option("--n", areas_n)->required();
  areas->add_option("--k", areas_k)->required();

  std::string suite;
  std::int64_t verify_n = 0, verify_k = 0;
  int verify_threads = 0;
  auto* verify = app.add_subcommand("verify", "Run a named check suite");
  verify->add_option("suite", suite,
                     "appendix-bounds, whp-thresholds, orange-drift, yellow-instability, "
                     "bit-dissemination or all")->required();
  verify->add_option("--n", verify_n, "Population size (suite default if omitted)");
  verify->add_option("--k", verify_k, "Sample size (suite default if omitted)");
  verify->add_option("--threads", verify_threads, "Worker threads");

  std::string sweep_path, sweep_csv_path, sweep_json_path;
  int sweep_threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Convergence-time sweep over n or k");
  sweep->add_option("spec", sweep_path, "JSON sweep specification")->required();
  sweep->add_option("--csv", sweep_csv_path, "CSV path (default stdout)");
  sweep->add_option("--json", sweep_json_path, "Report JSON path");
  sweep->add_option("--threads", sweep_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*simulate) return cmd_simulate(sim);

  if (*chain) {
    minlab_chain* raw = nullptr;
    if (auto st = minlab_chain_build(chain_rule.c_str(), chain_n, chain_k,
                                     chain_sampling.c_str(), z_chain ? 1 : 0, &raw)) {
      return report(st);
    }
    std::unique_ptr<minlab_chain, decltype(&minlab_chain_free)> c(raw, minlab_chain_free);
    CString out;
    const minlab_status st = chain_format == "csv" ? minlab_chain_csv(c.get(), &out.p)
                                                   : minlab_chain_summary_json(c.get(), &out.p);
    if (st) return report(st);
    write_text("", out.str());
    return kExitOk;
  }

  if (*areas) {
    CString out;
    if (auto st = minlab_areas_json(areas_n, areas_k, &out.p)) return report(st);
    write_text("", out.str());
    return kExitOk;
  }

  if (*verify) {
    int passed = 0;
    CString out;
    if (auto st = minlab_verify(suite.c_str(), verify_n, verify_k,
                                threads_option(verify_threads), &passed, &out.p)) {
      return report(st);
    }
    write_text("", out.str());
    return passed ? kExitOk : kExitFailure;
  }

  if (*sweep) {
    std::string text;
    if (!read_file(sweep_path, text)) {
      std::cerr << "minlab: cannot read " << sweep_path << '\n';
      return kExitConfig;
    }
    CString csv, json;
    if (auto st = minlab_sweep(text.c_str(), threads_option(sweep_threads), &csv.p, &json.p)) {
      return report(st);
    }
    if (!write_text(sweep_csv_path, csv.str())) return kExitFailure;
    if (!sweep_json_path.empty() && !write_text(sweep_json_path, json.str())) return kExitFailure;
    return kExitOk;
  }
  return kExitFailure;
}
