#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fragclass/grid.hpp"
#include "fragclass/pattern.hpp"

namespace fragclass {

/// Composite Simpson node weights over a pattern's window, as sparse
/// (node index, weight) pairs. Only nodes inside the window appear, so a
/// weighted sum over them never touches unobserved (NaN) values.
///
/// Each interval contributes h/3 * {1,4,2,4,...,2,4,1}; the rule is exact
/// for polynomials of degree <= 3 on every interval.
inline std::vector<std::pair<int, double>> simpson_weights(const TimeGrid& grid,
                                                           const MissingPattern& pattern) {
  std::vector<std::pair<int, double>> w;
  const double h = grid.spacing();
  for (const Interval& iv : pattern.intervals()) {
    const int i0 = grid.require_node_index(iv.lo, "quad_integral endpoint");
    const int i1 = grid.require_node_index(iv.hi, "quad_integral endpoint");
    if (i1 - i0 < 2)
      throw std::invalid_argument("quad_integral: interval covers fewer than 3 nodes");
    if ((i1 - i0) % 2 != 0)
      throw std::invalid_argument("quad_integral: interval spans an odd number of grid cells");
    w.emplace_back(i0, h / 3.0);
    for (int i = i0 + 1; i < i1; ++i)
      w.emplace_back(i, ((i - i0) % 2 == 1 ? 4.0 : 2.0) * h / 3.0);
    w.emplace_back(i1, h / 3.0);
  }
  return w;
}

/// Integral of grid-sampled values over the pattern's window.
inline double quad_integral(std::span<const double> values, const TimeGrid& grid,
                            const MissingPattern& pattern) {
  if (static_cast<int>(values.size()) != grid.points())
    throw std::invalid_argument("quad_integral: value count does not match grid");
  double acc = 0.0;
  for (const auto& [i, wi] : simpson_weights(grid, pattern))
    acc += wi * values[static_cast<std::size_t>(i)];
  return acc;
}

/// Integral of f over the pattern's window, evaluating f at grid nodes.
template <typename F>
double quad_integral_fn(F&& f, const TimeGrid& grid, const MissingPattern& pattern) {
  double acc = 0.0;
  for (const auto& [i, wi] : simpson_weights(grid, pattern)) acc += wi * f(grid.node(i));
  return acc;
}

}  // namespace fragclass
