#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "fragclass/basis.hpp"
#include "fragclass/curve.hpp"
#include "fragclass/quadrature.hpp"

namespace fragclass {

/// The filtered representation of a fragment: its first d basis coefficients
/// computed over the observed window.
struct ScoreVector {
  std::vector<double> scores;
  int pattern_index = 0;

  int dim() const { return static_cast<int>(scores.size()); }
};

/// Project a curve onto the first d basis functions over its own window.
/// Coefficient j is the quadrature of values * psi_j over the pattern, so a
/// truncation to d' < d coincides exactly with a direct computation at d'.
inline ScoreVector filter_curve(const ObservedCurve& curve, int d, const BasisTable& basis,
                                const PatternCatalog& catalog) {
  if (d < 1 || d > basis.dim())
    throw std::invalid_argument("filter_curve: dimension out of range 1..max_dim");
  if (!(curve.grid == basis.grid()))
    throw std::invalid_argument("filter_curve: curve grid does not match basis grid");
  const MissingPattern& pattern = catalog.at(curve.pattern_index);
  const auto weights = simpson_weights(curve.grid, pattern);

  ScoreVector out;
  out.pattern_index = curve.pattern_index;
  out.scores.assign(static_cast<std::size_t>(d), 0.0);
  for (int j = 1; j <= d; ++j) {
    double acc = 0.0;
    for (const auto& [i, wi] : weights)
      acc += wi * curve.values[static_cast<std::size_t>(i)] * basis.at(j, i);
    if (!std::isfinite(acc))
      throw std::runtime_error("filter_curve: non-finite score for curve '" + curve.id +
                               "' (unobserved value read?)");
    out.scores[static_cast<std::size_t>(j - 1)] = acc;
  }
  return out;
}

inline ScoreVector filter_curve(const ObservedCurve& curve, int d, const BasisSpec& spec,
                                const PatternCatalog& catalog) {
  return filter_curve(curve, d, BasisTable(spec, curve.grid), catalog);
}

/// Score vectors for a whole dataset, each at the basis's full dimension.
/// Computed once; selection truncates rather than re-integrating.
struct ScoreTable {
  int d_max = 0;
  std::vector<std::vector<double>> scores;  // one row per curve
  std::vector<int> pattern;                 // 1-based pattern index per curve
  std::vector<int> label;                   // -1 when unlabeled

  int size() const { return static_cast<int>(scores.size()); }
};

inline ScoreTable build_score_table(const Dataset& data, const BasisTable& basis) {
  ScoreTable t;
  t.d_max = basis.dim();
  t.scores.reserve(data.curves.size());
  t.pattern.reserve(data.curves.size());
  t.label.reserve(data.curves.size());
  for (const ObservedCurve& c : data.curves) {
    t.scores.push_back(filter_curve(c, basis.dim(), basis, data.catalog).scores);
    t.pattern.push_back(c.pattern_index);
    t.label.push_back(c.label.value_or(-1));
  }
  return t;
}

}  // namespace fragclass
