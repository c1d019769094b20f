#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fragclass/grid.hpp"
#include "fragclass/pattern.hpp"

namespace fragclass {

/// A curve sampled on a grid, observable only inside its pattern's window.
/// Nodes outside the window hold NaN so that any accidental read of an
/// unobserved value poisons downstream results instead of passing silently.
struct ObservedCurve {
  TimeGrid grid;
  std::vector<double> values;      // NaN outside the pattern
  int pattern_index = 0;           // 1-based index into the catalog; 0 = unassigned
  std::optional<int> label;        // class in {0,1} when known
  std::string id;

  bool observed_at(int i) const { return std::isfinite(values[static_cast<std::size_t>(i)]); }
};

struct Dataset {
  TimeGrid grid;
  PatternCatalog catalog;
  std::vector<ObservedCurve> curves;

  int size() const { return static_cast<int>(curves.size()); }
};

namespace detail {

/// Maximal runs of consecutive observed nodes, as node index pairs [i0, i1].
inline std::vector<std::pair<int, int>> observed_runs(const ObservedCurve& c) {
  std::vector<std::pair<int, int>> runs;
  const int n = c.grid.points();
  int start = -1;
  for (int i = 0; i <= n; ++i) {
    const bool obs = i < n && c.observed_at(i);
    if (obs && start < 0) start = i;
    if (!obs && start >= 0) {
      runs.emplace_back(start, i - 1);
      start = -1;
    }
  }
  return runs;
}

/// The pattern carried by a curve's own observability mask.
inline MissingPattern mask_pattern(const ObservedCurve& c) {
  const auto runs = observed_runs(c);
  if (runs.empty())
    throw std::invalid_argument("curve '" + c.id + "': no observed values");
  std::vector<Interval> ivs;
  ivs.reserve(runs.size());
  for (const auto& [i0, i1] : runs) {
    if (i1 - i0 < 2)
      throw std::invalid_argument("curve '" + c.id +
                                  "': observed fragment covers fewer than 3 grid nodes "
                                  "(zero or unusable measure)");
    if ((i1 - i0) % 2 != 0)
      throw std::invalid_argument("curve '" + c.id +
                                  "': observed fragment spans an odd number of grid cells");
    ivs.push_back({c.grid.node(i0), c.grid.node(i1)});
  }
  return MissingPattern(std::move(ivs), c.grid);
}

}  // namespace detail

/// Catalog the distinct observability masks in a raw dataset and assign
/// pattern indices: the fully observed mask gets index 1; the rest are
/// ordered by decreasing frequency, ties broken by ascending lexicographic
/// mask. The assignment depends only on the multiset of masks, so it is
/// stable under shuffling and idempotent.
inline Dataset detect_patterns(const TimeGrid& grid, std::vector<ObservedCurve> curves) {
  if (curves.empty()) throw std::invalid_argument("detect_patterns: empty dataset");
  for (const ObservedCurve& c : curves)
    if (!(c.grid == grid))
      throw std::invalid_argument("detect_patterns: curve '" + c.id +
                                  "' is sampled on a different grid");

  struct Group {
    MissingPattern pattern;
    std::vector<std::size_t> members;
  };
  std::map<std::vector<bool>, Group> groups;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    MissingPattern p = detail::mask_pattern(curves[i]);
    auto mask = p.node_mask(grid);
    auto it = groups.find(mask);
    if (it == groups.end())
      it = groups.emplace(std::move(mask), Group{std::move(p), {}}).first;
    it->second.members.push_back(i);
  }

  std::vector<const std::map<std::vector<bool>, Group>::value_type*> order;
  order.reserve(groups.size());
  for (const auto& kv : groups) order.push_back(&kv);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    const bool fa = a->second.pattern.is_full();
    const bool fb = b->second.pattern.is_full();
    if (fa != fb) return fa;
    if (a->second.members.size() != b->second.members.size())
      return a->second.members.size() > b->second.members.size();
    return a->first < b->first;
  });

  std::vector<MissingPattern> patterns;
  patterns.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    patterns.push_back(order[k]->second.pattern);
    for (std::size_t i : order[k]->second.members)
      curves[i].pattern_index = static_cast<int>(k) + 1;
  }
  return Dataset{grid, PatternCatalog(std::move(patterns)), std::move(curves)};
}

/// Build a curve holding the given node values restricted to a pattern;
/// unobserved nodes are set to NaN.
inline ObservedCurve restrict_to_pattern(const TimeGrid& grid, const std::vector<double>& full_values,
                                         const MissingPattern& pattern, int pattern_index,
                                         std::optional<int> label = std::nullopt,
                                         std::string id = {}) {
  if (static_cast<int>(full_values.size()) != grid.points())
    throw std::invalid_argument("restrict_to_pattern: value count does not match grid");
  ObservedCurve c{grid, std::vector<double>(full_values.size(),
                                            std::numeric_limits<double>::quiet_NaN()),
                  pattern_index, label, std::move(id)};
  const auto mask = pattern.node_mask(grid);
  for (int i = 0; i < grid.points(); ++i)
    if (mask[static_cast<std::size_t>(i)])
      c.values[static_cast<std::size_t>(i)] = full_values[static_cast<std::size_t>(i)];
  return c;
}

}  // namespace fragclass
