#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fragclass/classifier.hpp"
#include "fragclass/curve.hpp"
#include "fragclass/filtering.hpp"
#include "fragclass/rng.hpp"

namespace fragclass {

/// Search space for the data-splitting parameter selection: candidate
/// dimensions, a shared bandwidth grid, and the split schedule.
struct SelectionGrid {
  std::vector<int> d_values;
  std::vector<double> h_values;
  int n_splits = 20;
  double split_ratio = 0.65;

  void validate() const {
    if (d_values.empty() || h_values.empty())
      throw std::invalid_argument("SelectionGrid: empty grid");
    for (std::size_t i = 0; i < d_values.size(); ++i) {
      if (d_values[i] < 1) throw std::invalid_argument("SelectionGrid: dimensions must be >= 1");
      if (i > 0 && d_values[i] <= d_values[i - 1])
        throw std::invalid_argument("SelectionGrid: d_values must be strictly ascending");
    }
    for (std::size_t i = 0; i < h_values.size(); ++i) {
      if (!(h_values[i] > 0.0))
        throw std::invalid_argument("SelectionGrid: bandwidths must be positive");
      if (i > 0 && h_values[i] <= h_values[i - 1])
        throw std::invalid_argument("SelectionGrid: h_values must be strictly ascending");
    }
    if (n_splits < 1) throw std::invalid_argument("SelectionGrid: n_splits must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
      throw std::invalid_argument("SelectionGrid: split_ratio must be in (0,1)");
  }

  /// Equally spaced bandwidths (0,1]: {1/count, 2/count, ..., 1}.
  static std::vector<double> default_h_grid(int count = 20) {
    if (count < 1) throw std::invalid_argument("default_h_grid: count must be >= 1");
    std::vector<double> h(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      h[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / count;
    return h;
  }
};

/// Dimension cap as a function of sample size: floor(2.5 ln n), at least 1.
inline int d_max_rule(int n) {
  if (n < 2) return 1;
  const int d = static_cast<int>(std::floor(2.5 * std::log(static_cast<double>(n))));
  return std::max(d, 1);
}

/// Uniform random partition of {0..n-1} into (train, test) index sets with
/// |train| = round(ratio * n). Deterministic for a given rng state.
inline std::pair<std::vector<int>, std::vector<int>> split_indices(int n, double ratio, Rng& rng) {
  if (n < 2) throw std::invalid_argument("split: need at least 2 observations");
  const int m = static_cast<int>(std::lround(ratio * n));
  if (m < 1 || m >= n)
    throw std::invalid_argument("split: ratio leaves an empty train or test part");
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  std::vector<int> train(idx.begin(), idx.begin() + m);
  std::vector<int> test(idx.begin() + m, idx.end());
  return {std::move(train), std::move(test)};
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, Rng& rng) {
  auto [train_idx, test_idx] = split_indices(data.size(), ratio, rng);
  Dataset train{data.grid, data.catalog, {}};
  Dataset test{data.grid, data.catalog, {}};
  train.curves.reserve(train_idx.size());
  test.curves.reserve(test_idx.size());
  for (int i : train_idx) train.curves.push_back(data.curves[static_cast<std::size_t>(i)]);
  for (int i : test_idx) test.curves.push_back(data.curves[static_cast<std::size_t>(i)]);
  return {std::move(train), std::move(test)};
}

/// Fraction of test curves misclassified by the pattern-dispatched rule.
inline double empirical_risk(const FittedModel& model, const Dataset& test,
                             const BasisTable& basis_table) {
  if (test.curves.empty()) throw std::invalid_argument("empirical_risk: empty test sequence");
  int wrong = 0;
  for (const ObservedCurve& c : test.curves) {
    if (!c.label) throw std::invalid_argument("empirical_risk: unlabeled curve '" + c.id + "'");
    wrong += classify(model, c, basis_table) != *c.label;
  }
  return static_cast<double>(wrong) / static_cast<double>(test.curves.size());
}

inline double empirical_risk(const FittedModel& model, const Dataset& test) {
  return empirical_risk(model, test, BasisTable(model.basis, model.grid));
}

struct RiskRow {
  int d = 0;
  std::vector<double> h;  // one bandwidth per pattern
  double mean_risk = 0.0;
  double se_risk = 0.0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
  RiskRow selected;
  std::vector<double> selected_split_risks;
  int splits_evaluated = 0;
};

struct SelectionResult {
  int d_hat = 1;
  std::vector<double> h_hat;
  RiskReport report;
};

namespace detail {

/// Per-split, per-pattern misclassification counts for every (d, h) cell.
/// Because each test curve is dispatched to exactly one pattern, the risk of
/// a full tuple (d, h_1..h_M) is the sum of these counts over k, which is
/// what makes both the Cartesian enumeration and the per-pattern decoupled
/// search exact.
struct SplitErrorTensor {
  int n_splits = 0, n_patterns = 0, n_d = 0, n_h = 0;
  int test_size = 0;                  // constant across splits
  std::vector<int> counts;            // [s][k][di][hi]
  std::vector<int> pattern_test_total;  // per pattern, summed over splits

  int& at(int s, int k, int di, int hi) {
    return counts[static_cast<std::size_t>(((s * n_patterns + (k - 1)) * n_d + di) * n_h + hi)];
  }
  int at(int s, int k, int di, int hi) const {
    return counts[static_cast<std::size_t>(((s * n_patterns + (k - 1)) * n_d + di) * n_h + hi)];
  }
};

inline SplitErrorTensor evaluate_splits(const ScoreTable& scores, int n_patterns,
                                        const SelectionGrid& grid, const KernelSpec& kernel,
                                        Rng& rng) {
  const int n = scores.size();
  const int n_d = static_cast<int>(grid.d_values.size());
  const int n_h = static_cast<int>(grid.h_values.size());
  SplitErrorTensor t;
  t.n_splits = grid.n_splits;
  t.n_patterns = n_patterns;
  t.n_d = n_d;
  t.n_h = n_h;
  t.counts.assign(static_cast<std::size_t>(grid.n_splits) * n_patterns * n_d * n_h, 0);
  t.pattern_test_total.assign(static_cast<std::size_t>(n_patterns), 0);

  const int max_d = grid.d_values.back();
  std::vector<double> inv2h2(static_cast<std::size_t>(n_h));
  for (int hi = 0; hi < n_h; ++hi) {
    const double h = grid.h_values[static_cast<std::size_t>(hi)];
    inv2h2[static_cast<std::size_t>(hi)] = 1.0 / (h * h);
  }

  std::vector<double> votes(static_cast<std::size_t>(n_d) * n_h);
  std::vector<std::vector<int>> train_by_pattern(static_cast<std::size_t>(n_patterns));

  for (int s = 0; s < grid.n_splits; ++s) {
    auto [train_idx, test_idx] = split_indices(n, grid.split_ratio, rng);
    t.test_size = static_cast<int>(test_idx.size());
    for (auto& v : train_by_pattern) v.clear();
    for (int j : train_idx)
      train_by_pattern[static_cast<std::size_t>(scores.pattern[static_cast<std::size_t>(j)] - 1)]
          .push_back(j);

    for (int i : test_idx) {
      const int k = scores.pattern[static_cast<std::size_t>(i)];
      const int y = scores.label[static_cast<std::size_t>(i)];
      if (y != 0 && y != 1)
        throw std::invalid_argument("select_params: dataset contains unlabeled curves");
      t.pattern_test_total[static_cast<std::size_t>(k - 1)]++;
      std::fill(votes.begin(), votes.end(), 0.0);
      const auto& xi = scores.scores[static_cast<std::size_t>(i)];
      for (int j : train_by_pattern[static_cast<std::size_t>(k - 1)]) {
        const auto& xj = scores.scores[static_cast<std::size_t>(j)];
        const double sign = 2.0 * scores.label[static_cast<std::size_t>(j)] - 1.0;
        double sq = 0.0;
        int di = 0;
        for (int d = 1; d <= max_d; ++d) {
          const double diff = xi[static_cast<std::size_t>(d - 1)] - xj[static_cast<std::size_t>(d - 1)];
          sq += diff * diff;
          if (d == grid.d_values[static_cast<std::size_t>(di)]) {
            double* row = votes.data() + static_cast<std::size_t>(di) * n_h;
            for (int hi = 0; hi < n_h; ++hi)
              row[hi] += sign * kernel_eval_sq(kernel, sq * inv2h2[static_cast<std::size_t>(hi)]);
            if (++di == n_d) break;
          }
        }
      }
      for (int di = 0; di < n_d; ++di)
        for (int hi = 0; hi < n_h; ++hi) {
          const int pred = votes[static_cast<std::size_t>(di) * n_h + hi] > 0.0 ? 1 : 0;
          if (pred != y) t.at(s, k, di, hi)++;
        }
    }
  }
  return t;
}

}  // namespace detail

/// Choose (d_hat, h_hat_1..h_hat_M) by minimizing the mean misclassification
/// rate over repeated random train/test splits.
///
/// For every d the bandwidth tuple is searched exhaustively when M <= 3 and
/// pattern-by-pattern otherwise; the two routes agree because the split risk
/// decomposes additively across patterns. Ties prefer the smallest d, then
/// the lexicographically smallest bandwidth tuple. Patterns that never occur
/// in a test part get the median bandwidth of the grid.
inline SelectionResult select_params(const Dataset& data, const SelectionGrid& grid,
                                     const BasisSpec& basis, const KernelSpec& kernel, Rng& rng) {
  grid.validate();
  basis.validate();
  if (grid.d_values.back() > basis.max_dim)
    throw std::invalid_argument("select_params: grid dimension exceeds basis max_dim");
  const int M = data.catalog.size();

  SelectionResult result;
  if (grid.d_values.size() == 1 && grid.h_values.size() == 1) {
    result.d_hat = grid.d_values[0];
    result.h_hat.assign(static_cast<std::size_t>(M), grid.h_values[0]);
    result.report.selected = RiskRow{result.d_hat, result.h_hat, 0.0, 0.0};
    if (data.size() >= 2) {
      // fill the report honestly when splits are possible
      detail::SplitErrorTensor t = detail::evaluate_splits(
          build_score_table(data, BasisTable(basis, data.grid)), M, grid, kernel, rng);
      std::vector<double> risks(static_cast<std::size_t>(grid.n_splits), 0.0);
      for (int s = 0; s < grid.n_splits; ++s) {
        int e = 0;
        for (int k = 1; k <= M; ++k) e += t.at(s, k, 0, 0);
        risks[static_cast<std::size_t>(s)] = static_cast<double>(e) / t.test_size;
      }
      double mean = 0.0;
      for (double r : risks) mean += r;
      mean /= static_cast<double>(risks.size());
      double var = 0.0;
      for (double r : risks) var += (r - mean) * (r - mean);
      const double se = risks.size() > 1
                            ? std::sqrt(var / (static_cast<double>(risks.size()) - 1.0) /
                                        static_cast<double>(risks.size()))
                            : 0.0;
      result.report.selected = RiskRow{result.d_hat, result.h_hat, mean, se};
      result.report.selected_split_risks = std::move(risks);
      result.report.splits_evaluated = grid.n_splits;
    }
    result.report.rows = {result.report.selected};
    return result;
  }

  if (data.size() < 2) throw std::invalid_argument("select_params: need at least 2 observations");

  const BasisTable basis_table(basis, data.grid);
  const ScoreTable scores = build_score_table(data, basis_table);
  const detail::SplitErrorTensor t = detail::evaluate_splits(scores, M, grid, kernel, rng);

  const int n_d = t.n_d, n_h = t.n_h, S = t.n_splits;

  // aggregate counts over splits
  auto agg = [&](int k, int di, int hi) {
    int e = 0;
    for (int s = 0; s < S; ++s) e += t.at(s, k, di, hi);
    return e;
  };
  std::vector<int> present;  // patterns with any test representation
  for (int k = 1; k <= M; ++k)
    if (t.pattern_test_total[static_cast<std::size_t>(k - 1)] > 0) present.push_back(k);

  std::vector<std::vector<int>> agg_err(static_cast<std::size_t>(M));  // [k-1][di*n_h+hi]
  for (int k = 1; k <= M; ++k) {
    agg_err[static_cast<std::size_t>(k - 1)].resize(static_cast<std::size_t>(n_d) * n_h);
    for (int di = 0; di < n_d; ++di)
      for (int hi = 0; hi < n_h; ++hi)
        agg_err[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(di) * n_h + hi] =
            agg(k, di, hi);
  }

  const int median_hi = static_cast<int>((grid.h_values.size() - 1) / 2);
  const bool cartesian = M <= 3;

  // best bandwidth index tuple (over present patterns) for each d
  std::vector<std::vector<int>> best_hi_at_d(static_cast<std::size_t>(n_d),
                                             std::vector<int>(static_cast<std::size_t>(M), median_hi));
  std::vector<int> best_err_at_d(static_cast<std::size_t>(n_d), 0);

  for (int di = 0; di < n_d; ++di) {
    auto& chosen = best_hi_at_d[static_cast<std::size_t>(di)];
    if (cartesian && !present.empty()) {
      const std::size_t np = present.size();
      std::vector<int> tuple(np, 0), best_tuple(np, 0);
      long best = std::numeric_limits<long>::max();
      bool done = false;
      while (!done) {
        long e = 0;
        for (std::size_t p = 0; p < np; ++p)
          e += agg_err[static_cast<std::size_t>(present[p] - 1)]
                      [static_cast<std::size_t>(di) * n_h + tuple[p]];
        if (e < best) {  // strict: ties keep the earlier (lexicographically smaller) tuple
          best = e;
          best_tuple = tuple;
        }
        // advance odometer, last index fastest
        for (std::size_t p = np; p-- > 0;) {
          if (++tuple[p] < n_h) break;
          tuple[p] = 0;
          if (p == 0) done = true;
        }
      }
      for (std::size_t p = 0; p < np; ++p) chosen[static_cast<std::size_t>(present[p] - 1)] = best_tuple[p];
      best_err_at_d[static_cast<std::size_t>(di)] = static_cast<int>(best);
    } else {
      int total = 0;
      for (int k : present) {
        const auto& row = agg_err[static_cast<std::size_t>(k - 1)];
        int best_hi = 0;
        for (int hi = 1; hi < n_h; ++hi)
          if (row[static_cast<std::size_t>(di) * n_h + hi] <
              row[static_cast<std::size_t>(di) * n_h + best_hi])
            best_hi = hi;
        chosen[static_cast<std::size_t>(k - 1)] = best_hi;
        total += row[static_cast<std::size_t>(di) * n_h + best_hi];
      }
      best_err_at_d[static_cast<std::size_t>(di)] = total;
    }
  }

  int best_di = 0;
  for (int di = 1; di < n_d; ++di)
    if (best_err_at_d[static_cast<std::size_t>(di)] < best_err_at_d[static_cast<std::size_t>(best_di)])
      best_di = di;

  auto tuple_h = [&](const std::vector<int>& his) {
    std::vector<double> h(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k)
      h[static_cast<std::size_t>(k)] = grid.h_values[static_cast<std::size_t>(his[static_cast<std::size_t>(k)])];
    return h;
  };
  auto split_risks_of = [&](int di, const std::vector<int>& his) {
    std::vector<double> risks(static_cast<std::size_t>(S));
    for (int s = 0; s < S; ++s) {
      int e = 0;
      for (int k = 1; k <= M; ++k)
        e += t.at(s, k, di, his[static_cast<std::size_t>(k - 1)]);
      risks[static_cast<std::size_t>(s)] = static_cast<double>(e) / t.test_size;
    }
    return risks;
  };
  auto mean_se = [&](const std::vector<double>& risks) {
    double mean = 0.0;
    for (double r : risks) mean += r;
    mean /= static_cast<double>(risks.size());
    double var = 0.0;
    for (double r : risks) var += (r - mean) * (r - mean);
    const double se = risks.size() > 1 ? std::sqrt(var / (static_cast<double>(risks.size()) - 1.0) /
                                                   static_cast<double>(risks.size()))
                                       : 0.0;
    return std::pair<double, double>(mean, se);
  };

  result.d_hat = grid.d_values[static_cast<std::size_t>(best_di)];
  result.h_hat = tuple_h(best_hi_at_d[static_cast<std::size_t>(best_di)]);
  result.report.splits_evaluated = S;
  result.report.selected_split_risks =
      split_risks_of(best_di, best_hi_at_d[static_cast<std::size_t>(best_di)]);
  {
    auto [mean, se] = mean_se(result.report.selected_split_risks);
    result.report.selected = RiskRow{result.d_hat, result.h_hat, mean, se};
  }

  // report rows: full tuple table when small, otherwise the per-d optima
  double tuple_count = static_cast<double>(n_d);
  for (std::size_t p = 0; p < present.size(); ++p) tuple_count *= n_h;
  if (tuple_count <= 10000.0) {
    const std::size_t np = present.size();
    std::vector<int> tuple(np, 0);
    for (int di = 0; di < n_d; ++di) {
      bool done = false;
      std::fill(tuple.begin(), tuple.end(), 0);
      while (!done) {
        std::vector<int> his(static_cast<std::size_t>(M), median_hi);
        for (std::size_t p = 0; p < np; ++p)
          his[static_cast<std::size_t>(present[p] - 1)] = tuple[p];
        auto risks = split_risks_of(di, his);
        auto [mean, se] = mean_se(risks);
        result.report.rows.push_back(
            RiskRow{grid.d_values[static_cast<std::size_t>(di)], tuple_h(his), mean, se});
        if (np == 0) break;
        for (std::size_t p = np; p-- > 0;) {
          if (++tuple[p] < n_h) break;
          tuple[p] = 0;
          if (p == 0) done = true;
        }
      }
    }
  } else {
    for (int di = 0; di < n_d; ++di) {
      auto risks = split_risks_of(di, best_hi_at_d[static_cast<std::size_t>(di)]);
      auto [mean, se] = mean_se(risks);
      result.report.rows.push_back(RiskRow{grid.d_values[static_cast<std::size_t>(di)],
                                           tuple_h(best_hi_at_d[static_cast<std::size_t>(di)]),
                                           mean, se});
    }
  }
  return result;
}

struct FitResult {
  FittedModel model;
  RiskReport report;
};

/// Select parameters by data splitting, then refit on the entire dataset.
inline FitResult fit_with_report(const Dataset& data, const SelectionGrid& grid,
                                 const BasisSpec& basis, const KernelSpec& kernel, Rng& rng) {
  SelectionResult sel = select_params(data, grid, basis, kernel, rng);
  return FitResult{make_model(data, BasisTable(basis, data.grid), kernel, sel.d_hat, sel.h_hat),
                   std::move(sel.report)};
}

inline FittedModel fit(const Dataset& data, const SelectionGrid& grid, const BasisSpec& basis,
                       const KernelSpec& kernel, Rng& rng) {
  return fit_with_report(data, grid, basis, kernel, rng).model;
}

/// The complete-case subsample as a single-pattern dataset.
inline Dataset complete_cases(const Dataset& data) {
  Dataset out{data.grid, PatternCatalog({MissingPattern::full(data.grid)}), {}};
  if (!data.catalog.at(1).is_full()) return out;  // no complete pattern catalogued
  for (const ObservedCurve& c : data.curves)
    if (c.pattern_index == 1) {
      out.curves.push_back(c);
      out.curves.back().pattern_index = 1;
    }
  return out;
}

/// Complete-case baseline: selection and refit use only fully observed
/// curves. At prediction time fully observed queries are voted against the
/// complete store with the single selected bandwidth; fragmented queries,
/// which the complete-trained store cannot score, fall back to the
/// uninformed deterministic coin (see classify). Discarding the fragments'
/// information is what makes this baseline degrade as missingness grows.
inline FitResult fit_complete_case_with_report(const Dataset& data, const SelectionGrid& grid,
                                               const BasisSpec& basis, const KernelSpec& kernel,
                                               Rng& rng) {
  Dataset cc = complete_cases(data);
  if (cc.curves.empty())
    throw std::invalid_argument("fit_complete_case: no fully observed training curves");
  SelectionResult sel = select_params(cc, grid, basis, kernel, rng);
  const BasisTable basis_table(basis, data.grid);
  FittedModel m = make_model(cc, basis_table, kernel, sel.d_hat, sel.h_hat);
  // widen to the prediction catalog: all queries dispatch to the complete store
  m.catalog = data.catalog;
  m.h_hat.assign(static_cast<std::size_t>(data.catalog.size()), sel.h_hat[0]);
  m.store.resize(static_cast<std::size_t>(data.catalog.size()));
  m.complete_case = true;
  m.validate();
  return FitResult{std::move(m), std::move(sel.report)};
}

inline FittedModel fit_complete_case(const Dataset& data, const SelectionGrid& grid,
                                     const BasisSpec& basis, const KernelSpec& kernel, Rng& rng) {
  return fit_complete_case_with_report(data, grid, basis, kernel, rng).model;
}

}  // namespace fragclass
