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

#include "minlab/minlab.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "minlab/analysis.hpp"
#include "minlab/bounds.hpp"
#include "minlab/error.hpp"
#include "minlab/experiment.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/sequential_sim.hpp"

struct minlab_config {
  minlab::ExperimentConfig value;
};

struct minlab_result {
  minlab::RunSummary value;
};

struct minlab_chain {
  minlab::KernelParams params;
  bool z = false;
  minlab::ZChain zc;
  minlab::BirthDeathChain chain;
  minlab::EdgeHittingTimes tau;
  std::vector<double> log_absorb;
  std::int64_t start = 0;
  double log_lower_bound = 0.0;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

minlab_status map_code(minlab::ErrorCode code) {
  switch (code) {
    case minlab::ErrorCode::invalid_argument:
      return MINLAB_ERR_INVALID_ARGUMENT;
    case minlab::ErrorCode::mode_unsupported:
      return MINLAB_ERR_MODE_UNSUPPORTED;
    case minlab::ErrorCode::no_fixed_point:
      return MINLAB_ERR_NO_FIXED_POINT;
    case minlab::ErrorCode::config:
      return MINLAB_ERR_CONFIG;
    case minlab::ErrorCode::io:
      return MINLAB_ERR_IO;
    case minlab::ErrorCode::unknown_suite:
      return MINLAB_ERR_UNKNOWN_SUITE;
  }
  return MINLAB_ERR_INTERNAL;
}

template <class F>
minlab_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MINLAB_OK;
  } catch (const minlab::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return MINLAB_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MINLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MINLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MINLAB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  minlab::require(p != nullptr, std::string(what) + " must not be null");
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

minlab::KernelParams minority_params(std::int64_t n, std::int64_t k) {
  minlab::KernelParams p{minlab::UpdateRule::minority(k), n,
                         minlab::SamplingMode::with_replacement};
  p.validate();
  return p;
}

// One suite at its defaults (n, k <= 0) or at the given parameters.
json run_suite(const std::string& suite, std::int64_t n, std::int64_t k,
               int threads, bool& passed) {
  const bool defaults = n <= 0 || k <= 0;
  json j;
  if (suite == "appendix-bounds") {
    passed = true;
    json list = json::array();
    for (const auto& r : minlab::run_bound_suites()) {
      passed = passed && r.verdict();
      list.push_back({{"name", r.name},
                      {"points", r.points},
                      {"violations", r.violations},
                      {"worst_log_margin", r.worst_log_margin},
                      {"verdict", r.verdict()}});
    }
    j = {{"suites", list}};
  } else if (suite == "whp-thresholds") {
    const auto r = minlab::check_whp_thresholds(defaults ? 1000000 : n,
                                                defaults ? 5000 : k);
    passed = r.verdict;
    j = minlab::to_json(r);
  } else if (suite == "orange-drift") {
    const auto r = minlab::check_orange_drift(defaults ? 4000000 : n,
                                              defaults ? 1500000 : k,
                                              {1.0, 2.0, 5.0, 10.0, 50.0});
    passed = r.verdict;
    j = minlab::to_json(r);
  } else if (suite == "yellow-instability") {
    const auto r = minlab::check_yellow_instability(defaults ? 1000000 : n,
                                                    defaults ? 5000 : k);
    passed = r.capped_verdict && r.lower_endpoint_grows &&
             r.upper_endpoint_shrinks;
    j = minlab::to_json(r);
  } else if (suite == "bit-dissemination") {
    const std::int64_t nn = defaults ? 4000000 : n;
    const std::int64_t kk = defaults ? minlab::fast_regime_k(nn) : k;
    const auto r = minlab::check_bit_dissemination_recovery(nn, kk, 300, 1, threads);
    passed = r.recovery_fraction() >= 0.2;
    j = minlab::to_json(r);
    j["n"] = nn;
    j["k"] = kk;
  } else {
    minlab::fail(minlab::ErrorCode::unknown_suite, "unknown suite '" + suite + "'");
  }
  j["suite"] = suite;
  j["passed"] = passed;
  return j;
}

}  // namespace

extern "C" {

const char* minlab_version(void) { return minlab::version_string(); }

const char* minlab_last_error(void) { return g_last_error.c_str(); }

void minlab_string_free(char* s) { std::free(s); }

minlab_status minlab_config_parse(const char* text, minlab_config** out) {
  return guarded([&] {
    need(text, "json");
    need(out, "out");
    *out = new minlab_config{minlab::parse_config_text(text)};
  });
}

minlab_status minlab_config_set(minlab_config* cfg, const char* key,
                                const char* value_json) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value_json, "value_json");
    minlab::ExperimentConfig next = cfg->value;
    json value;
    try {
      value = json::parse(value_json);
    } catch (const json::parse_error&) {
      // Bare words such as sequential are taken as strings.
      value = std::string(value_json);
    }
    minlab::set_config_field(next, key, value);
    minlab::validate_config(next);
    cfg->value = next;
  });
}

minlab_status minlab_config_to_json(const minlab_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = copy_out(minlab::config_to_json(cfg->value).dump(2));
  });
}

void minlab_config_free(minlab_config* cfg) { delete cfg; }

minlab_status minlab_simulate(const minlab_config* cfg, int threads,
                              minlab_result** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    if (!cfg->value.seed) {
      minlab::fail(minlab::ErrorCode::config,
                   "a seed is required (config field 'seed' or --seed)");
    }
    *out = new minlab_result{minlab::run_trials(cfg->value, threads)};
  });
}

minlab_status minlab_result_summary_json(const minlab_result* res,
                                         int include_wall_clock, char** out) {
  return guarded([&] {
    need(res, "res");
    need(out, "out");
    *out = copy_out(minlab::summary_to_json(res->value, include_wall_clock != 0).dump(2));
  });
}

minlab_status minlab_result_trajectory_csv(const minlab_result* res,
                                           char** out) {
  return guarded([&] {
    need(res, "res");
    need(out, "out");
    *out = copy_out(minlab::trajectory_csv(res->value));
  });
}

minlab_status minlab_result_counts(const minlab_result* res, int64_t* trials,
                                   int64_t* converged, int64_t* censored) {
  return guarded([&] {
    need(res, "res");
    if (trials) *trials = static_cast<int64_t>(res->value.trials.size());
    if (converged) *converged = res->value.converged;
    if (censored) *censored = res->value.censored;
  });
}

void minlab_result_free(minlab_result* res) { delete res; }

minlab_status minlab_chain_build(const char* rule, int64_t n, int64_t k,
                                 const char* sampling, int z_chain,
                                 minlab_chain** out) {
  return guarded([&] {
    need(rule, "rule");
    need(out, "out");
    const auto kind = minlab::parse_rule(rule);
    minlab::require(kind.has_value(), std::string("unknown rule '") + rule + "'");
    auto mode = minlab::SamplingMode::with_replacement;
    if (sampling) {
      const auto parsed = minlab::parse_sampling(sampling);
      minlab::require(parsed.has_value(),
                      std::string("unknown sampling mode '") + sampling + "'");
      mode = *parsed;
    }
    minlab::require(n >= 4 && n <= 100000, "chain analytics need 4 <= n <= 1e5");
    auto c = std::make_unique<minlab_chain>();
    c->params = minlab::KernelParams{
        *kind == minlab::RuleKind::voter ? minlab::UpdateRule::voter()
                                         : minlab::UpdateRule{*kind, k},
        n, mode};
    c->params.validate();
    c->z = z_chain != 0;
    if (c->z) {
      c->zc = minlab::z_chain(c->params);
      c->chain = c->zc.chain;
      c->log_absorb = minlab::log_absorption_time(c->chain, false, true);
      c->start = 0;
    } else {
      c->chain = minlab::build_birth_death(c->params);
      c->log_absorb = minlab::log_absorption_time(c->chain, true, true);
      c->start = n / 2;
    }
    c->tau = minlab::edge_hitting_times(c->chain);
    c->log_lower_bound = minlab::lower_bound_sum(c->chain);
    *out = c.release();
  });
}

minlab_status minlab_chain_csv(const minlab_chain* c, char** out) {
  return guarded([&] {
    need(c, "chain");
    need(out, "out");
    std::ostringstream s;
    s << "i,p,q,r,tau_edge,E_absorb\n";
    const auto size = c->chain.p.size();
    for (std::size_t i = 0; i < size; ++i) {
      s << i << ',' << fmt(c->chain.p[i]) << ',' << fmt(c->chain.q[i]) << ','
        << fmt(c->chain.r[i]) << ',';
      if (i > 0) s << fmt(c->tau.edge[i - 1]);
      s << ',' << fmt(std::exp(c->log_absorb[i])) << '\n';
    }
    *out = copy_out(s.str());
  });
}

minlab_status minlab_chain_summary_json(const minlab_chain* c, char** out) {
  return guarded([&] {
    need(c, "chain");
    need(out, "out");
    const double log_e = c->log_absorb[static_cast<std::size_t>(c->start)];
    json j = {{"schema_version", minlab::kSchemaVersion},
              {"rule", minlab::to_string(c->params.rule.kind)},
              {"n", c->params.n},
              {"k", c->params.k()},
              {"sampling", minlab::to_string(c->params.mode)},
              {"z_chain", c->z},
              {"last_state", c->chain.last()},
              {"tau_total", finite_or_null(c->tau.total)},
              {"ln_tau_total", finite_or_null(c->tau.log_total)},
              {"ln_lower_bound_sum", finite_or_null(c->log_lower_bound)},
              {"start", c->start},
              {"E_absorb_from_start", finite_or_null(std::exp(log_e))},
              {"ln_E_absorb_from_start", finite_or_null(log_e)}};
    if (c->z) {
      j["m"] = c->zc.m;
      j["offset"] = c->zc.offset;
      j["exact_sixth"] = c->zc.exact_sixth;
    }
    *out = copy_out(j.dump(2));
  });
}

void minlab_chain_free(minlab_chain* chain) { delete chain; }

minlab_status minlab_areas_json(int64_t n, int64_t k, char** out) {
  return guarded([&] {
    need(out, "out");
    const minlab::AreaPartition part(n, k);
    json areas = json::object();
    for (minlab::Area a : minlab::kAllAreas) {
      const auto r = part.range(a);
      areas[std::string(minlab::to_string(a))] = {{"lo", r.lo}, {"hi", r.hi}};
    }
    json fixed = {{"orange", static_cast<double>(n) / 2.0}};
    try {
      fixed["yellow"] = minlab::fixed_point_yellow(minority_params(n, k), part).value;
    } catch (const minlab::Error& e) {
      fixed["yellow"] = nullptr;
      fixed["yellow_error"] = e.what();
    }
    json j = {{"schema_version", minlab::kSchemaVersion},
              {"n", n},
              {"k", k},
              {"thresholds", part.thresholds()},
              {"areas", areas},
              {"degenerate", part.is_degenerate()},
              {"outside_recommended_k", part.outside_recommended_k()},
              {"fixed_points", fixed}};
    *out = copy_out(j.dump(2));
  });
}

minlab_status minlab_verify(const char* suite, int64_t n, int64_t k,
                            int threads, int* passed, char** report_json) {
  return guarded([&] {
    need(suite, "suite");
    need(passed, "passed");
    const std::string name = suite;
    bool ok = true;
    json report;
    if (name == "all") {
      json list = json::array();
      for (const char* s : {"appendix-bounds", "whp-thresholds", "orange-drift",
                            "yellow-instability", "bit-dissemination"}) {
        bool one = false;
        list.push_back(run_suite(s, 0, 0, threads, one));
        ok = ok && one;
      }
      report = {{"suite", "all"}, {"passed", ok}, {"suites", list}};
    } else {
      report = run_suite(name, n, k, threads, ok);
    }
    *passed = ok ? 1 : 0;
    if (report_json) *report_json = copy_out(report.dump(2));
  });
}

minlab_status minlab_sweep(const char* spec_json, int threads, char** csv,
                           char** report_json) {
  return guarded([&] {
    need(spec_json, "spec_json");
    json doc;
    try {
      doc = json::parse(spec_json);
    } catch (const json::parse_error& e) {
      minlab::fail(minlab::ErrorCode::config, std::string("malformed JSON: ") + e.what());
    }
    const auto result = minlab::convergence_sweep(minlab::parse_sweep_spec(doc), threads);
    if (csv) *csv = copy_out(minlab::sweep_csv(result));
    if (report_json) *report_json = copy_out(minlab::to_json(result).dump(2));
  });
}

minlab_status minlab_log_binomial_tail_geq(int64_t k, double p, int64_t j,
                                           double* out) {
  return guarded([&] {
    need(out, "out");
    *out = minlab::log_binomial_tail_geq(k, p, j);
  });
}

minlab_status minlab_expected_u(int64_t n, int64_t k, int64_t m, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = minlab::expected_u(minority_params(n, k), m);
  });
}

minlab_status minlab_expected_w(int64_t n, int64_t k, int64_t m, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = minlab::expected_w(minority_params(n, k), m);
  });
}

}  // extern "C"
