#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fragclass/grid.hpp"

namespace fragclass {

/// Closed subinterval [lo, hi] of [0,1] with lo < hi.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

/// An observation window: a finite union of disjoint closed subintervals of
/// [0,1]. A curve carrying this pattern has values only inside the union.
///
/// Each endpoint must sit on a grid node and each interval must span an even
/// number of grid cells, so composite Simpson quadrature applies piecewise.
class MissingPattern {
 public:
  MissingPattern(std::vector<Interval> intervals, const TimeGrid& grid)
      : intervals_(std::move(intervals)) {
    if (intervals_.empty())
      throw std::invalid_argument("MissingPattern: no intervals");
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double prev_hi = -1.0;
    for (const Interval& iv : intervals_) {
      if (!(iv.lo < iv.hi))
        throw std::invalid_argument("MissingPattern: interval with nonpositive length");
      if (iv.lo < 0.0 || iv.hi > 1.0)
        throw std::invalid_argument("MissingPattern: interval outside [0,1]");
      if (iv.lo <= prev_hi)
        throw std::invalid_argument("MissingPattern: intervals overlap or touch");
      prev_hi = iv.hi;
      const int i0 = grid.require_node_index(iv.lo, "MissingPattern endpoint");
      const int i1 = grid.require_node_index(iv.hi, "MissingPattern endpoint");
      if (i1 - i0 < 2)
        throw std::invalid_argument("MissingPattern: interval covers fewer than 3 nodes");
      if ((i1 - i0) % 2 != 0)
        throw std::invalid_argument("MissingPattern: interval spans an odd number of grid cells");
    }
  }

  const std::vector<Interval>& intervals() const { return intervals_; }

  double measure() const {
    double m = 0.0;
    for (const Interval& iv : intervals_) m += iv.hi - iv.lo;
    return m;
  }

  bool is_full() const {
    return intervals_.size() == 1 && intervals_[0].lo == 0.0 && intervals_[0].hi == 1.0;
  }

  /// Per-node observability flags.
  std::vector<bool> node_mask(const TimeGrid& grid) const {
    std::vector<bool> mask(grid.points(), false);
    for (const Interval& iv : intervals_) {
      const int i0 = grid.require_node_index(iv.lo, "MissingPattern endpoint");
      const int i1 = grid.require_node_index(iv.hi, "MissingPattern endpoint");
      for (int i = i0; i <= i1; ++i) mask[i] = true;
    }
    return mask;
  }

  /// The unobserved part [0,1] \ pattern, as closed intervals. The shared
  /// endpoints have measure zero, so using closed intervals does not change
  /// any integral.
  std::optional<MissingPattern> complement(const TimeGrid& grid) const {
    std::vector<Interval> out;
    double cursor = 0.0;
    for (const Interval& iv : intervals_) {
      if (iv.lo > cursor) out.push_back({cursor, iv.lo});
      cursor = iv.hi;
    }
    if (cursor < 1.0) out.push_back({cursor, 1.0});
    if (out.empty()) return std::nullopt;
    return MissingPattern(std::move(out), grid);
  }

  friend bool operator==(const MissingPattern& a, const MissingPattern& b) {
    return a.intervals_ == b.intervals_;
  }

  static MissingPattern full(const TimeGrid& grid) {
    return MissingPattern({{0.0, 1.0}}, grid);
  }

 private:
  std::vector<Interval> intervals_;
};

/// The finite set of patterns occurring in a dataset, indexed 1..M.
/// Index 1 is reserved for the fully observed pattern: whenever the full
/// window is present it must sit at index 1.
class PatternCatalog {
 public:
  explicit PatternCatalog(std::vector<MissingPattern> patterns)
      : patterns_(std::move(patterns)) {
    if (patterns_.empty())
      throw std::invalid_argument("PatternCatalog: empty");
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      if (patterns_[i].is_full() && i != 0)
        throw std::invalid_argument("PatternCatalog: full pattern must have index 1");
      for (std::size_t j = i + 1; j < patterns_.size(); ++j)
        if (patterns_[i] == patterns_[j])
          throw std::invalid_argument("PatternCatalog: duplicate pattern");
    }
  }

  int size() const { return static_cast<int>(patterns_.size()); }

  /// 1-based access, matching pattern indices stored on curves.
  const MissingPattern& at(int k) const {
    if (k < 1 || k > size())
      throw std::invalid_argument("PatternCatalog: pattern index " + std::to_string(k) +
                                  " out of range 1.." + std::to_string(size()));
    return patterns_[static_cast<std::size_t>(k - 1)];
  }

  std::optional<int> find(const MissingPattern& p) const {
    for (int k = 1; k <= size(); ++k)
      if (at(k) == p) return k;
    return std::nullopt;
  }

  friend bool operator==(const PatternCatalog& a, const PatternCatalog& b) {
    return a.patterns_ == b.patterns_;
  }

 private:
  std::vector<MissingPattern> patterns_;
};

/// The five observation windows used by the simulation study. Window 1 is the
/// full domain; the remaining four leave out different fragment sets. All
/// endpoints are multiples of 0.05, so they align with any grid whose cell
/// count is a multiple of 20.
inline PatternCatalog simulation_catalog(int n_patterns, const TimeGrid& grid) {
  if (n_patterns < 1 || n_patterns > 5)
    throw std::invalid_argument("simulation_catalog: supports 1..5 patterns");
  const std::vector<std::vector<Interval>> defs = {
      {{0.0, 1.0}},
      {{0.0, 0.3}, {0.5, 1.0}},
      {{0.0, 0.1}, {0.2, 0.45}, {0.6, 0.85}, {0.9, 1.0}},
      {{0.25, 0.5}, {0.65, 1.0}},
      {{0.0, 0.2}, {0.3, 0.55}, {0.75, 0.9}},
  };
  std::vector<MissingPattern> out;
  out.reserve(static_cast<std::size_t>(n_patterns));
  for (int k = 0; k < n_patterns; ++k) out.emplace_back(defs[static_cast<std::size_t>(k)], grid);
  return PatternCatalog(std::move(out));
}

}  // namespace fragclass
