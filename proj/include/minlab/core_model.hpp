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

// Global state of a binary opinion population on the complete graph, the
// update-rule and schedule descriptors, and the partition of minority sizes
// into the six phase areas used throughout the analysis.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace minlab {

enum class Opinion : std::uint8_t { zero = 0, one = 1 };

constexpr Opinion opposite(Opinion o) noexcept {
  return o == Opinion::one ? Opinion::zero : Opinion::one;
}
constexpr int to_int(Opinion o) noexcept { return o == Opinion::one ? 1 : 0; }

// Exact global state: n nodes, `ones` of which hold opinion 1, and possibly
// one pinned source node that never updates.
class PopulationState {
 public:
  PopulationState(std::int64_t n, std::int64_t ones,
                  std::optional<Opinion> source = std::nullopt);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t ones() const noexcept { return ones_; }
  std::int64_t zeros() const noexcept { return n_ - ones_; }
  const std::optional<Opinion>& source() const noexcept { return source_; }

  PopulationState with_ones(std::int64_t ones) const {
    return PopulationState(n_, ones, source_);
  }

  // All opinions flipped (and the source's, if any).
  PopulationState flipped() const;

  bool is_consensus() const noexcept { return ones_ == 0 || ones_ == n_; }
  // All nodes agree with the source. False when there is no source.
  bool is_disseminated() const noexcept;

  friend bool operator==(const PopulationState&,
                         const PopulationState&) = default;

 private:
  std::int64_t n_;
  std::int64_t ones_;
  std::optional<Opinion> source_;
};

struct MinorityView {
  std::int64_t size;
  Opinion opinion;

  friend bool operator==(const MinorityView&, const MinorityView&) = default;
};

// m = min(X, n - X). At X = n/2 the label is opinion 1; at consensus it is
// the opinion nobody holds.
MinorityView minority_view(const PopulationState& state);
MinorityView minority_view(std::int64_t n, std::int64_t ones);

enum class RuleKind { minority, majority, voter };

// Ties (even k) are always broken uniformly at random.
struct UpdateRule {
  RuleKind kind = RuleKind::minority;
  std::int64_t k = 1;

  static UpdateRule minority(std::int64_t k) { return {RuleKind::minority, k}; }
  static UpdateRule majority(std::int64_t k) { return {RuleKind::majority, k}; }
  static UpdateRule voter() { return {RuleKind::voter, 1}; }

  friend bool operator==(const UpdateRule&, const UpdateRule&) = default;
};

enum class Schedule { parallel, sequential };

enum class SamplingMode {
  // k i.i.d. uniform draws from all n nodes (the node itself included).
  with_replacement,
  // k distinct nodes among the other n - 1.
  exclusive,
};

enum class Area { consensus, blue1, red, blue2, yellow, green, orange };

inline constexpr std::array<Area, 7> kAllAreas = {
    Area::consensus, Area::blue1, Area::red,   Area::blue2,
    Area::yellow,    Area::green, Area::orange};

std::string_view to_string(RuleKind kind);
std::string_view to_string(Schedule schedule);
std::string_view to_string(SamplingMode mode);
std::string_view to_string(Area area);

std::optional<RuleKind> parse_rule(std::string_view text);
std::optional<Schedule> parse_schedule(std::string_view text);
std::optional<SamplingMode> parse_sampling(std::string_view text);
std::optional<Area> parse_area(std::string_view text);

// Half-open integer interval [lo, hi) of minority sizes.
struct AreaRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t width() const noexcept { return hi > lo ? hi - lo : 0; }
  bool empty() const noexcept { return hi <= lo; }
};

// Thresholds b1..b6 split [1, n/2] into Blue1, Red, Blue2, Yellow, Green and
// Orange. Each area is [b_{i-1}, b_i) over the integers, Orange is closed at
// n/2, and m = 0 is Consensus. When thresholds cross, the later area starts
// at the running maximum so that every m still has exactly one label.
class AreaPartition {
 public:
  AreaPartition(std::int64_t n, std::int64_t k);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t k() const noexcept { return k_; }

  // b1..b6 in real arithmetic.
  const std::array<double, 6>& thresholds() const noexcept { return b_; }

  Area classify(std::int64_t m) const;
  AreaRange range(Area area) const;

  // Some area has no integer point or the thresholds are not increasing.
  bool is_degenerate() const noexcept { return degenerate_; }
  // k outside [5 ln n, n/2].
  bool outside_recommended_k() const noexcept { return outside_recommended_; }

 private:
  std::int64_t n_;
  std::int64_t k_;
  std::array<double, 6> b_{};
  // Integer start of each of the six colored areas, nondecreasing.
  std::array<std::int64_t, 6> start_{};
  bool degenerate_ = false;
  bool outside_recommended_ = false;
};

AreaPartition area_partition(std::int64_t n, std::int64_t k);

}  // namespace minlab
