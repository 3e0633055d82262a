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

#include "minlab/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

PopulationState::PopulationState(std::int64_t n, std::int64_t ones,
                                 std::optional<Opinion> source)
    : n_(n), ones_(ones), source_(source) {
  require(n >= 1, "population size must be positive");
  require(ones >= 0 && ones <= n, "ones-count must lie in [0, n]");
  if (source == Opinion::one) {
    require(ones >= 1, "a source holding 1 needs X >= 1");
  } else if (source == Opinion::zero) {
    require(ones <= n - 1, "a source holding 0 needs X <= n - 1");
  }
}

PopulationState PopulationState::flipped() const {
  std::optional<Opinion> src;
  if (source_) src = opposite(*source_);
  return PopulationState(n_, n_ - ones_, src);
}

bool PopulationState::is_disseminated() const noexcept {
  if (!source_) return false;
  return *source_ == Opinion::one ? ones_ == n_ : ones_ == 0;
}

MinorityView minority_view(std::int64_t n, std::int64_t ones) {
  const std::int64_t zeros = n - ones;
  if (2 * ones == n) return {ones, Opinion::one};
  if (ones < zeros) return {ones, Opinion::one};
  return {zeros, Opinion::zero};
}

MinorityView minority_view(const PopulationState& state) {
  return minority_view(state.n(), state.ones());
}

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::minority: return "minority";
    case RuleKind::majority: return "majority";
    case RuleKind::voter: return "voter";
  }
  return "?";
}

std::string_view to_string(Schedule schedule) {
  return schedule == Schedule::parallel ? "parallel" : "sequential";
}

std::string_view to_string(SamplingMode mode) {
  return mode == SamplingMode::with_replacement ? "with-replacement"
                                                : "exclusive";
}

std::string_view to_string(Area area) {
  switch (area) {
    case Area::consensus: return "consensus";
    case Area::blue1: return "blue1";
    case Area::red: return "red";
    case Area::blue2: return "blue2";
    case Area::yellow: return "yellow";
    case Area::green: return "green";
    case Area::orange: return "orange";
  }
  return "?";
}

std::optional<RuleKind> parse_rule(std::string_view text) {
  if (text == "minority") return RuleKind::minority;
  if (text == "majority") return RuleKind::majority;
  if (text == "voter") return RuleKind::voter;
  return std::nullopt;
}

std::optional<Schedule> parse_schedule(std::string_view text) {
  if (text == "parallel") return Schedule::parallel;
  if (text == "sequential") return Schedule::sequential;
  return std::nullopt;
}

std::optional<SamplingMode> parse_sampling(std::string_view text) {
  if (text == "with-replacement") return SamplingMode::with_replacement;
  if (text == "exclusive") return SamplingMode::exclusive;
  return std::nullopt;
}

std::optional<Area> parse_area(std::string_view text) {
  for (Area a : kAllAreas) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

AreaPartition::AreaPartition(std::int64_t n, std::int64_t k) : n_(n), k_(k) {
  require(n >= 4, "area partition needs n >= 4");
  require(k >= 1, "area partition needs k >= 1");

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double ln_n = std::log(nd);
  const double center = nd * std::log(2.0) / kd;
  const double spread = std::sqrt(center);

  b_[0] = center - spread;
  b_[1] = center + spread;
  b_[2] = (nd / kd) * std::log(kd / (4.0 * ln_n));
  b_[3] = 3.0 * nd * ln_n / kd;
  b_[4] = nd / 2.0 - nd * std::sqrt(2.0 * ln_n / kd);
  b_[5] = nd / 2.0;

  const std::int64_t half = n / 2;
  const auto integer_start = [half](double threshold) -> std::int64_t {
    const double c = std::ceil(threshold);
    if (c <= 1.0) return 1;
    // n/2 always belongs to Orange.
    if (c >= static_cast<double>(half)) return half;
    return static_cast<std::int64_t>(c);
  };

  start_[0] = 1;
  for (std::size_t i = 1; i < start_.size(); ++i) {
    start_[i] = std::max(start_[i - 1], integer_start(b_[i - 1]));
  }

  for (std::size_t i = 0; i + 1 < b_.size(); ++i) {
    if (!(b_[i] < b_[i + 1])) degenerate_ = true;
  }
  for (Area a : kAllAreas) {
    if (a != Area::consensus && range(a).empty()) degenerate_ = true;
  }
  outside_recommended_ = kd < 5.0 * ln_n || 2 * k > n;
}

AreaRange AreaPartition::range(Area area) const {
  if (area == Area::consensus) return {0, 1};
  const auto idx = static_cast<std::size_t>(area) - 1;
  const std::int64_t end = n_ / 2 + 1;
  const std::int64_t hi = idx + 1 < start_.size() ? start_[idx + 1] : end;
  return {start_[idx], hi};
}

Area AreaPartition::classify(std::int64_t m) const {
  require(m >= 0 && m <= n_ / 2, "minority size out of range [0, n/2]");
  if (m == 0) return Area::consensus;
  // Scan from the last area; starts are nondecreasing so the first start
  // not exceeding m identifies the (nonempty) area holding m.
  for (std::size_t i = start_.size(); i-- > 0;) {
    if (m >= start_[i]) return static_cast<Area>(i + 1);
  }
  return Area::blue1;
}

AreaPartition area_partition(std::int64_t n, std::int64_t k) {
  return AreaPartition(n, k);
}

}  // namespace minlab
