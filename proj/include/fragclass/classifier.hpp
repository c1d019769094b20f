#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "fragclass/basis.hpp"
#include "fragclass/curve.hpp"
#include "fragclass/filtering.hpp"
#include "fragclass/kernel.hpp"
#include "fragclass/pattern.hpp"

namespace fragclass {

/// One training observation as stored in a fitted model: its score vector at
/// the basis's full dimension plus its class label.
struct TrainingPoint {
  std::vector<double> scores;
  int label = 0;
};

/// A fitted pattern-dispatched kernel classifier: the training sample
/// partitioned by pattern, the selected dimension and per-pattern bandwidths,
/// and the basis/kernel/grid configuration needed to score new fragments.
struct FittedModel {
  TimeGrid grid;
  PatternCatalog catalog;
  BasisSpec basis;
  KernelSpec kernel;
  int d_hat = 1;
  std::vector<double> h_hat;                      // one bandwidth per pattern
  std::vector<std::vector<TrainingPoint>> store;  // store[k-1] holds pattern k
  bool complete_case = false;  // trained on complete curves only; see classify()

  void validate() const {
    basis.validate();
    if (d_hat < 1 || d_hat > basis.max_dim)
      throw std::invalid_argument("FittedModel: d_hat out of range");
    if (static_cast<int>(h_hat.size()) != catalog.size() ||
        static_cast<int>(store.size()) != catalog.size())
      throw std::invalid_argument("FittedModel: per-pattern sizes do not match catalog");
    for (double h : h_hat)
      if (!(h > 0.0)) throw std::invalid_argument("FittedModel: bandwidths must be positive");
  }
};

/// Signed kernel vote of pattern k's training class at query scores x:
///
///   sum over stored i with pattern k of (2 y_i - 1) K((x - x_i) / h)
///
/// using the first d components of the stored scores. An empty class votes 0.
inline double vote(const FittedModel& model, int k, std::span<const double> x, double h, int d) {
  if (k < 1 || k > model.catalog.size())
    throw std::invalid_argument("vote: pattern index out of catalog range");
  if (!(h > 0.0)) throw std::invalid_argument("vote: bandwidth must be positive");
  if (d < 1 || static_cast<int>(x.size()) < d)
    throw std::invalid_argument("vote: query has fewer than d scores");
  double acc = 0.0;
  for (const TrainingPoint& p : model.store[static_cast<std::size_t>(k - 1)]) {
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
      const double u = (x[static_cast<std::size_t>(j)] - p.scores[static_cast<std::size_t>(j)]) / h;
      sq += u * u;
    }
    acc += (2.0 * p.label - 1.0) * kernel_eval_sq(model.kernel, sq);
  }
  return acc;
}

/// Deterministic unbiased bit derived from a curve's observed values.
/// Same curve, same bit; over independently generated curves the bit is
/// balanced and carries no class information.
inline int curve_coin(const ObservedCurve& curve) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(curve.pattern_index);
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (!std::isfinite(curve.values[i])) continue;
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(double));
    std::memcpy(&bits, &curve.values[i], sizeof(bits));
    h ^= bits + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 29;
  }
  h *= 0x94d049bb133111ebull;
  h ^= h >> 32;
  return static_cast<int>(h >> 63);
}

/// Classify a fragment: filter it at the selected dimension over its own
/// window and take the sign of the matching pattern's vote. A vote of
/// exactly zero (including the empty-class case) yields class 0.
///
/// Complete-case models have no training scores comparable with a
/// fragmented query (their store was filtered over the full window), so
/// they classify fragments by an uninformed deterministic coin and apply
/// the kernel vote to fully observed queries only.
inline int classify(const FittedModel& model, const ObservedCurve& curve,
                    const BasisTable& basis_table) {
  const int k = curve.pattern_index;
  if (k < 1 || k > model.catalog.size())
    throw std::invalid_argument("classify: curve '" + curve.id +
                                "' carries a pattern not in the catalog");
  if (model.complete_case && k != 1) return curve_coin(curve);
  const ScoreVector x = filter_curve(curve, model.d_hat, basis_table, model.catalog);
  const double v =
      vote(model, k, x.scores, model.h_hat[static_cast<std::size_t>(k - 1)], model.d_hat);
  return v > 0.0 ? 1 : 0;
}

inline int classify(const FittedModel& model, const ObservedCurve& curve) {
  return classify(model, curve, BasisTable(model.basis, model.grid));
}

/// Assemble a model directly from labeled data at given (d, h_1..h_M),
/// storing every curve's scores at the basis's full dimension.
inline FittedModel make_model(const Dataset& data, const BasisTable& basis_table,
                              const KernelSpec& kernel, int d_hat, std::vector<double> h_hat) {
  FittedModel m{data.grid, data.catalog, BasisSpec{basis_table.dim()}, kernel,
                d_hat,     std::move(h_hat)};
  m.store.resize(static_cast<std::size_t>(data.catalog.size()));
  for (const ObservedCurve& c : data.curves) {
    if (!c.label) throw std::invalid_argument("make_model: unlabeled curve '" + c.id + "'");
    ScoreVector s = filter_curve(c, basis_table.dim(), basis_table, data.catalog);
    m.store[static_cast<std::size_t>(c.pattern_index - 1)].push_back(
        TrainingPoint{std::move(s.scores), *c.label});
  }
  m.validate();
  return m;
}

}  // namespace fragclass
