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

#include "minlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minlab/error.hpp"
#include "minlab/prob_kernel.hpp"
#include "minlab/random.hpp"
#include "minlab/sequential_sim.hpp"

namespace minlab {
namespace {

using nlohmann::json;

KernelParams minority_kernel(std::int64_t n, std::int64_t k) {
  return KernelParams{UpdateRule::minority(k), n,
                      SamplingMode::with_replacement};
}

DriftPoint upper_point(std::string label, double parameter, std::int64_t m,
                       double exact, double bound) {
  return {std::move(label), parameter, m, exact, bound, exact <= bound,
          bound - exact};
}

DriftPoint lower_point(std::string label, double parameter, std::int64_t m,
                       double exact, double bound) {
  return {std::move(label), parameter, m, exact, bound, exact >= bound,
          exact - bound};
}

void summarize(DriftReport& r) {
  r.verdict = !r.points.empty();
  r.worst_margin = kInf;
  for (const DriftPoint& p : r.points) {
    r.verdict = r.verdict && p.holds;
    r.worst_margin = std::min(r.worst_margin, p.margin);
  }
}

double ln(std::int64_t n) { return std::log(static_cast<double>(n)); }
double dbl(std::int64_t n) { return static_cast<double>(n); }

}  // namespace

std::int64_t fast_regime_k(std::int64_t n) {
  return static_cast<std::int64_t>(std::ceil(185.0 * std::sqrt(dbl(n) * ln(n))));
}

DriftReport check_orange_drift(std::int64_t n, std::int64_t k,
                               const std::vector<double>& alphas) {
  const KernelParams params = minority_kernel(n, k);
  params.validate();
  const double root = std::sqrt(dbl(n));
  DriftReport r;
  r.name = "orange-drift";
  r.n = n;
  r.k = k;
  if (dbl(k) < 185.0 * std::sqrt(dbl(n) * ln(n))) {
    r.notes.push_back("k below 185 sqrt(n ln n): exploratory regime");
  }
  for (double alpha : alphas) {
    require(alpha >= 1.0 && alpha <= root / 4.0,
            "orange drift: alpha must lie in [1, sqrt(n)/4]");
  }
  for (double alpha : alphas) {
    const auto m = static_cast<std::int64_t>(std::llround(dbl(n) / 2.0 - alpha * root));
    r.points.push_back(upper_point("alpha", alpha, m, expected_w(params, m),
                                   dbl(n) / 2.0 - 1.8 * alpha * root));
  }
  summarize(r);
  return r;
}

DriftPoint yellow_instability_point(std::int64_t n, std::int64_t k,
                                    std::int64_t m, double fixed_point) {
  const KernelParams params = minority_kernel(n, k);
  const AreaPartition part(n, k);
  const double delta = std::fabs(dbl(m) - fixed_point);
  return lower_point("m", dbl(m), m,
                     std::fabs(f_map(params, m, part) - fixed_point),
                     ln(n) / 8.0 * delta);
}

YellowReport check_yellow_instability(std::int64_t n, std::int64_t k) {
  const KernelParams params = minority_kernel(n, k);
  const AreaPartition part(n, k);
  const YellowFixedPoint fp = fixed_point_yellow(params, part);
  const double mbar = fp.value;

  YellowReport out;
  out.fixed_point = mbar;
  out.stated.name = "yellow-instability";
  out.stated.n = n;
  out.stated.k = k;
  const auto& b = part.thresholds();
  out.lower_endpoint_grows = expected_u_real(n, k, b[2]) > b[2];
  out.upper_endpoint_shrinks = expected_u_real(n, k, b[3]) < b[3];
  const auto rounded = static_cast<std::int64_t>(std::llround(mbar));
  out.rounding_residual = std::fabs(expected_u(params, rounded) - mbar);

  const AreaRange yellow = part.range(Area::yellow);
  const double gap = std::sqrt(dbl(n) / dbl(k));
  std::vector<std::int64_t> grid;
  for (std::int64_t m = yellow.lo; m < yellow.hi; ++m) {
    if (std::fabs(dbl(m) - mbar) >= gap) grid.push_back(m);
  }
  constexpr std::size_t kMaxPoints = 2000;
  if (grid.size() > kMaxPoints) {
    std::vector<std::int64_t> thinned;
    for (std::size_t i = 0; i < kMaxPoints; ++i) {
      thinned.push_back(grid[i * (grid.size() - 1) / (kMaxPoints - 1)]);
    }
    grid = std::move(thinned);
  }
  out.capped_verdict = !grid.empty();
  out.capped_worst_margin = kInf;
  for (std::int64_t m : grid) {
    DriftPoint p = yellow_instability_point(n, k, m, mbar);
    const double capped = std::min(p.bound, 0.7 * mbar);
    out.capped_verdict = out.capped_verdict && p.exact >= capped;
    out.capped_worst_margin = std::min(out.capped_worst_margin, p.exact - capped);
    out.stated.points.push_back(std::move(p));
  }
  summarize(out.stated);
  if (!out.stated.verdict) {
    out.stated.notes.push_back(
        "the stated factor exceeds the largest possible |f(m) - mbar| = mbar "
        "where (ln n / 8) |m - mbar| > mbar; see capped_verdict");
  }
  return out;
}

DriftReport check_whp_thresholds(std::int64_t n, std::int64_t k) {
  const KernelParams params = minority_kernel(n, k);
  params.validate();
  require(dbl(k) >= 5.0 * ln(n), "w.h.p. thresholds need k >= 5 ln n");
  const double nn = dbl(n);
  auto in_range = [&](std::int64_t m) {
    require(m >= 0 && 2 * m <= n,
            "w.h.p. thresholds: evaluation point outside [0, n/2]");
    return m;
  };
  const std::int64_t m_u = in_range(static_cast<std::int64_t>(std::ceil(3.0 * nn * ln(n) / dbl(k))));
  const std::int64_t m_w = in_range(static_cast<std::int64_t>(
      std::floor(nn / 2.0 - nn * std::sqrt(1.5 * ln(n) / dbl(k)))));
  const std::int64_t m_lo = in_range(static_cast<std::int64_t>(std::floor(nn / (3.0 * dbl(k)))));
  const std::int64_t m_hi = in_range(static_cast<std::int64_t>(std::ceil(2.0 * nn / dbl(k))));
  DriftReport r;
  r.name = "whp-thresholds";
  r.n = n;
  r.k = k;
  const double inv_n2 = 1.0 / (nn * nn);
  r.points.push_back(upper_point("E[U] <= n^-2", dbl(m_u), m_u,
                                 expected_u(params, m_u), inv_n2));
  r.points.push_back(upper_point("E[W] <= n^-2", dbl(m_w), m_w,
                                 expected_w(params, m_w), inv_n2));
  r.points.push_back(lower_point("E[U] >= 0.69n", dbl(m_lo), m_lo,
                                 expected_u(params, m_lo), 0.69 * nn));
  r.points.push_back(upper_point("E[U] <= 0.15n", dbl(m_hi), m_hi,
                                 expected_u(params, m_hi), 0.15 * nn));
  summarize(r);
  return r;
}

TransitReport area_transit_stats(const TransitConfig& config) {
  const KernelParams params = minority_kernel(config.n, config.k);
  params.validate();
  require(config.trials >= 1, "area transit: trials must be at least 1");
  const PopulationState init(config.n, config.initial_ones);
  const std::int64_t budget =
      config.max_rounds > 0 ? config.max_rounds : default_max_rounds(config.n);

  struct Partial {
    TransitReport report;
  };
  std::vector<Partial> partial(static_cast<std::size_t>(config.trials));
  parallel_for(partial.size(), config.threads, [&](std::size_t i) {
    Rng rng = trial_rng(config.seed, i);
    const TrajectoryRecord rec =
        run_trajectory(init, params, budget, config.stepper, rng, true);
    TransitReport& r = partial[i].report;
    const auto& rows = rec.rows;
    TrialTransit tt;
    tt.initial = rows.front().area;
    if (rows.size() > 1) {
      tt.flipped_after_one_round = rows[1].opinion != rows[0].opinion;
    }
    std::size_t start = 0;
    while (start < rows.size()) {
      const Area area = rows[start].area;
      std::size_t end = start;
      while (end + 1 < rows.size() && rows[end + 1].area == area) ++end;
      if (area != Area::consensus) {
        AreaTransit& at = r.areas[static_cast<std::size_t>(area)];
        // Rows start..end are rounds begun in `area`; the last one is the
        // terminal row of a censored run when nothing follows.
        const bool exited = end + 1 < rows.size();
        const auto dwell = static_cast<std::int64_t>(end - start + (exited ? 1 : 0));
        ++at.visits;
        at.rounds += dwell;
        at.max_dwell = std::max(at.max_dwell, dwell);
        if (exited) {
          const TrajectoryRow& next = rows[end + 1];
          ++at.exits[static_cast<std::size_t>(next.area)];
          if (next.area == Area::consensus && dwell == 1 &&
              next.opinion != rows[end].opinion) {
            ++at.immediate_flip_consensus;
          }
        }
      }
      if (start == 0 && end + 1 < rows.size()) {
        tt.first_exit_time = static_cast<std::int64_t>(end + 1);
        tt.first_exit_area = rows[end + 1].area;
        tt.first_exit_flipped = rows[end + 1].opinion != rows[end].opinion;
      }
      start = end + 1;
    }
    for (std::size_t t = 1; t < rows.size(); ++t) {
      if (rows[t - 1].area != Area::green || !rows[t].w) continue;
      ++r.green_rounds;
      if (*rows[t].w > 0 && *rows[t].u > 0) ++r.green_w_and_u;
    }
    r.trials.push_back(tt);
  });

  TransitReport out;
  for (const Partial& p : partial) {
    const TransitReport& r = p.report;
    for (std::size_t a = 0; a < out.areas.size(); ++a) {
      AreaTransit& dst = out.areas[a];
      const AreaTransit& src = r.areas[a];
      dst.visits += src.visits;
      dst.rounds += src.rounds;
      dst.max_dwell = std::max(dst.max_dwell, src.max_dwell);
      dst.immediate_flip_consensus += src.immediate_flip_consensus;
      for (std::size_t b = 0; b < dst.exits.size(); ++b) dst.exits[b] += src.exits[b];
    }
    out.trials.insert(out.trials.end(), r.trials.begin(), r.trials.end());
    out.green_rounds += r.green_rounds;
    out.green_w_and_u += r.green_w_and_u;
  }
  return out;
}

DisseminationReport check_bit_dissemination_recovery(std::int64_t n,
                                                     std::int64_t k,
                                                     std::int64_t trials,
                                                     std::uint64_t seed,
                                                     int threads) {
  const KernelParams params = minority_kernel(n, k);
  params.validate();
  require(trials >= 1, "bit dissemination: trials must be at least 1");
  const AreaPartition part(n, k);
  const PopulationState init(n, 1, Opinion::one);
  std::vector<std::array<bool, 3>> flags(static_cast<std::size_t>(trials));
  parallel_for(flags.size(), threads, [&](std::size_t i) {
    Rng rng = trial_rng(seed, i);
    const PopulationState one = init.with_ones(step_aggregate(init, params, rng).next_ones);
    const MinorityView view = minority_view(one);
    const PopulationState two = one.with_ones(step_aggregate(one, params, rng).next_ones);
    flags[i] = {two.is_disseminated(), view.opinion == Opinion::one,
                part.classify(view.size) == Area::green};
  });
  DisseminationReport r;
  r.trials = trials;
  for (const auto& f : flags) {
    r.recovered_two_rounds += f[0];
    r.same_label_after_one += f[1];
    r.green_after_one += f[2];
  }
  return r;
}

std::optional<double> ls_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
  if (x.size() < 2 || x.size() != y.size()) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= dbl(static_cast<std::int64_t>(x.size()));
  my /= dbl(static_cast<std::int64_t>(x.size()));
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

SweepSpec parse_sweep_spec(const json& doc) {
  auto bad = [](const std::string& what) { fail(ErrorCode::config, "sweep: " + what); };
  if (!doc.is_object()) bad("the spec must be a JSON object");
  SweepSpec spec;
  json base;
  for (const auto& [key, v] : doc.items()) {
    if (key == "axis") {
      if (v == "n") {
        spec.axis = SweepAxis::n;
      } else if (v == "k") {
        spec.axis = SweepAxis::k;
      } else {
        bad("axis must be \"n\" or \"k\"");
      }
    } else if (key == "points") {
      if (!v.is_array() || v.empty()) bad("points must be a non-empty array");
      for (const auto& p : v) {
        if (!p.is_number_integer()) bad("points must be integers");
        spec.points.push_back(p.get<std::int64_t>());
      }
    } else if (key == "base") {
      base = v;
    } else if (key == "k_from_n") {
      if (!v.is_boolean()) bad("k_from_n must be a boolean");
      spec.k_from_n = v.get<bool>();
    } else if (key == "exact") {
      if (!v.is_boolean()) bad("exact must be a boolean");
      spec.exact = v.get<bool>();
    } else {
      bad("unknown field '" + key + "'");
    }
  }
  if (spec.points.empty()) bad("missing points");
  if (!std::is_sorted(spec.points.begin(), spec.points.end())) {
    bad("points must be sorted");
  }
  if (!base.is_object()) bad("missing base configuration");
  // The base is completed per point; fill placeholders so it validates.
  json filled = base;
  const std::int64_t first = spec.points.front();
  if (spec.axis == SweepAxis::n) {
    filled["n"] = first;
    if (spec.k_from_n || !filled.contains("k")) {
      filled["k"] = std::min<std::int64_t>(first, std::max<std::int64_t>(1, fast_regime_k(first)));
    }
  } else {
    filled["k"] = first;
  }
  spec.base = parse_config(filled);
  if (spec.k_from_n && spec.axis != SweepAxis::n) bad("k_from_n needs axis n");
  if (spec.exact && spec.base.schedule != Schedule::sequential) {
    bad("exact sweeps need the sequential schedule");
  }
  return spec;
}

SweepResult convergence_sweep(const SweepSpec& spec, int threads) {
  SweepResult out;
  out.axis = spec.axis;
  out.exact = spec.exact;
  std::vector<double> lx, lx2, med, nk, logt;
  for (std::int64_t value : spec.points) {
    ExperimentConfig c = spec.base;
    if (spec.axis == SweepAxis::n) {
      c.n = value;
      if (spec.k_from_n) c.k = fast_regime_k(value);
    } else {
      c.k = value;
    }
    validate_config(c);
    SweepPoint point;
    point.axis = value;
    point.k = c.k;
    if (spec.exact) {
      const BirthDeathChain chain = build_birth_death(c.kernel());
      const std::vector<double> le = log_absorption_time(chain, true, true);
      point.log_exact_time = le[static_cast<std::size_t>(c.n / 2)];
      nk.push_back(dbl(c.n) * dbl(c.k));
      logt.push_back(*point.log_exact_time);
    } else {
      const RunSummary s = run_trials(c, threads);
      point.time = s.time;
      point.censored_fraction = dbl(s.censored) / dbl(c.trials);
      if (s.time) {
        const double l = std::log(dbl(value));
        lx.push_back(l);
        lx2.push_back(l * l);
        med.push_back(s.time->median);
      }
    }
    out.points.push_back(point);
  }
  if (spec.exact) {
    out.slope_log_time_vs_nk = ls_slope(nk, logt);
  } else {
    out.slope_ln = ls_slope(lx, med);
    out.slope_ln2 = ls_slope(lx2, med);
  }
  return out;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const DriftReport& r) {
  json points = json::array();
  for (const DriftPoint& p : r.points) {
    points.push_back({{"label", p.label},
                      {"parameter", p.parameter},
                      {"m", p.m},
                      {"exact", p.exact},
                      {"bound", p.bound},
                      {"holds", p.holds},
                      {"margin", p.margin}});
  }
  return {{"name", r.name},       {"n", r.n},
          {"k", r.k},             {"verdict", r.verdict},
          {"worst_margin", r.worst_margin}, {"points", points},
          {"notes", r.notes}};
}

json to_json(const YellowReport& r) {
  json j = to_json(r.stated);
  j["fixed_point"] = r.fixed_point;
  j["rounding_residual"] = r.rounding_residual;
  j["capped_verdict"] = r.capped_verdict;
  j["capped_worst_margin"] = r.capped_worst_margin;
  j["lower_endpoint_grows"] = r.lower_endpoint_grows;
  j["upper_endpoint_shrinks"] = r.upper_endpoint_shrinks;
  return j;
}

json to_json(const TransitReport& r) {
  json areas = json::object();
  for (Area a : kAllAreas) {
    if (a == Area::consensus) continue;
    const AreaTransit& at = r.areas[static_cast<std::size_t>(a)];
    json exits = json::object();
    for (Area b : kAllAreas) {
      const auto c = at.exits[static_cast<std::size_t>(b)];
      if (c) exits[std::string(to_string(b))] = c;
    }
    areas[std::string(to_string(a))] = {
        {"visits", at.visits},
        {"rounds", at.rounds},
        {"mean_dwell", at.mean_dwell()},
        {"max_dwell", at.max_dwell},
        {"exits", exits},
        {"immediate_flip_consensus", at.immediate_flip_consensus}};
  }
  return {{"trials", static_cast<std::int64_t>(r.trials.size())},
          {"areas", areas},
          {"green_rounds", r.green_rounds},
          {"green_w_and_u", r.green_w_and_u}};
}

json to_json(const DisseminationReport& r) {
  return {{"trials", r.trials},
          {"recovered_two_rounds", r.recovered_two_rounds},
          {"recovery_fraction", r.recovery_fraction()},
          {"same_label_after_one", r.same_label_after_one},
          {"green_after_one", r.green_after_one}};
}

json to_json(const SweepResult& r) {
  json points = json::array();
  for (const SweepPoint& p : r.points) {
    json jp = {{"axis", p.axis},
               {"k", p.k},
               {"censored_frac", p.censored_fraction},
               {"log_exact_time", opt(p.log_exact_time)}};
    if (p.time) {
      jp["mean"] = p.time->mean;
      jp["median"] = p.time->median;
      jp["q10"] = p.time->q10;
      jp["q90"] = p.time->q90;
    }
    points.push_back(jp);
  }
  return {{"axis", r.axis == SweepAxis::n ? "n" : "k"},
          {"exact", r.exact},
          {"points", points},
          {"slope_ln", opt(r.slope_ln)},
          {"slope_ln2", opt(r.slope_ln2)},
          {"slope_log_time_vs_nk", opt(r.slope_log_time_vs_nk)}};
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "axis,median,q10,q90,censored_frac\n";
  for (const SweepPoint& p : r.points) {
    out << p.axis << ',';
    if (p.time) {
      out << p.time->median << ',' << p.time->q10 << ',' << p.time->q90;
    } else if (p.log_exact_time) {
      // Exact sweeps carry the expected time; there are no quantiles.
      out << std::exp(*p.log_exact_time) << ",,";
    } else {
      out << ",,";
    }
    out << ',' << p.censored_fraction << '\n';
  }
  return out.str();
}

}  // namespace minlab
