#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fragclass/config.hpp"
#include "fragclass/datagen.hpp"
#include "fragclass/dataset_io.hpp"
#include "fragclass/selection.hpp"

namespace fragclass {

enum class ClassifierKind { proposed, complete_case, full_data };

inline std::string to_string(ClassifierKind c) {
  switch (c) {
    case ClassifierKind::proposed: return "proposed";
    case ClassifierKind::complete_case: return "complete_case";
    case ClassifierKind::full_data: return "full_data";
  }
  return "?";
}

inline ClassifierKind classifier_from_string(const std::string& s) {
  if (s == "proposed") return ClassifierKind::proposed;
  if (s == "complete_case") return ClassifierKind::complete_case;
  if (s == "full_data") return ClassifierKind::full_data;
  throw std::invalid_argument("unknown classifier '" + s + "'");
}

/// Worker count for replicate-level parallelism: FRAGCLASS_WORKERS when set,
/// otherwise the hardware concurrency. Results never depend on it.
inline int worker_count() {
  if (const char* env = std::getenv("FRAGCLASS_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Run fn(i) for i in [0, n) on up to `workers` threads. Tasks pull indices
/// from a shared counter and write to their own slots, so output is
/// independent of scheduling.
template <typename F>
void parallel_for(int n, int workers, F&& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Everything needed to run one simulated experiment cell.
struct ExperimentConfig {
  int grid_points = 1001;
  int n = 100;
  int n_patterns = 3;
  CurveModel curve_model;
  MissingMechanism mechanism;
  KernelSpec kernel;
  SelectionGrid selection;  // d_values defaulted from n when empty
  std::vector<ClassifierKind> classifiers{ClassifierKind::proposed};
  int replications = 20;
  int test_size = 1000;
  std::uint64_t seed = 1;

  void finalize() {
    if (n < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
    if (replications < 1) throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    if (test_size < 1) throw std::invalid_argument("ExperimentConfig: test_size must be >= 1");
    if (classifiers.empty())
      throw std::invalid_argument("ExperimentConfig: no classifiers requested");
    if (selection.d_values.empty()) {
      for (int d = 1; d <= d_max_rule(n); ++d) selection.d_values.push_back(d);
    }
    if (selection.h_values.empty()) selection.h_values = SelectionGrid::default_h_grid();
    selection.validate();
    mechanism.validate(n_patterns);
  }

  BasisSpec basis() const { return BasisSpec{selection.d_values.back()}; }
};

/// Aggregated outcome of one classifier in one cell. The spread column is
/// the sample standard deviation over replications; se is that divided by
/// sqrt(R).
struct ResultRow {
  std::string cell;
  std::string classifier;
  int n = 0;
  int replications = 0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  double se_error = 0.0;
  std::vector<double> replicate_errors;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline ResultRow aggregate(std::string classifier, int n, std::vector<double> errors) {
  ResultRow row;
  row.classifier = std::move(classifier);
  row.n = n;
  row.replications = static_cast<int>(errors.size());
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= static_cast<double>(errors.size());
  double var = 0.0;
  for (double e : errors) var += (e - mean) * (e - mean);
  row.mean_error = mean;
  row.sd_error = errors.size() > 1 ? std::sqrt(var / (static_cast<double>(errors.size()) - 1.0)) : 0.0;
  row.se_error = row.sd_error / std::sqrt(static_cast<double>(errors.size()));
  row.replicate_errors = std::move(errors);
  return row;
}

}  // namespace detail

/// Run one cell: per replicate, generate a training set, fit each requested
/// classifier, and measure its error on an independently generated test set.
/// Replicate r draws from the stream seeded seed + r; each classifier's
/// parameter selection uses its own derived stream, so results for one
/// classifier do not depend on which others were requested. Replicates run
/// in parallel; aggregation is slot-based and worker-count independent.
inline std::vector<ResultRow> run_cell(const ExperimentConfig& cfg_in,
                                       int workers = worker_count()) {
  ExperimentConfig cfg = cfg_in;
  cfg.finalize();
  const TimeGrid grid(cfg.grid_points);
  const PatternCatalog catalog = simulation_catalog(cfg.n_patterns, grid);
  const BasisSpec basis = cfg.basis();

  // canonical evaluation order, independent of request order
  std::vector<ClassifierKind> kinds = cfg.classifiers;
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  const bool need_complete_view =
      std::find(kinds.begin(), kinds.end(), ClassifierKind::full_data) != kinds.end();

  std::vector<std::vector<double>> errors(kinds.size(),
                                          std::vector<double>(static_cast<std::size_t>(cfg.replications), 0.0));

  parallel_for(cfg.replications, workers, [&](int r) {
    Rng rng(cfg.seed + static_cast<std::uint64_t>(r));
    std::vector<GeneratedDraw> train_draws(static_cast<std::size_t>(cfg.n));
    for (auto& d : train_draws) d = gen_draw(cfg.curve_model, cfg.mechanism, catalog, grid, rng);
    std::vector<GeneratedDraw> test_draws(static_cast<std::size_t>(cfg.test_size));
    for (auto& d : test_draws) d = gen_draw(cfg.curve_model, cfg.mechanism, catalog, grid, rng);

    auto build = [&](const std::vector<GeneratedDraw>& draws, bool as_complete) {
      Dataset ds{grid, catalog, {}};
      ds.curves.reserve(draws.size());
      for (std::size_t i = 0; i < draws.size(); ++i)
        ds.curves.push_back(
            make_curve(draws[i], catalog, grid, std::to_string(i + 1), as_complete));
      return ds;
    };
    const Dataset train = build(train_draws, false);
    const Dataset test = build(test_draws, false);
    Dataset train_complete{grid, catalog, {}};
    Dataset test_complete{grid, catalog, {}};
    if (need_complete_view) {
      train_complete = build(train_draws, true);
      test_complete = build(test_draws, true);
    }
    const BasisTable basis_table(basis, grid);

    for (std::size_t c = 0; c < kinds.size(); ++c) {
      // same derived stream for every classifier: results are independent of
      // which classifiers run together, and classifiers coincide exactly on
      // datasets where they are mathematically identical
      Rng sel_rng(detail::mix_seed(cfg.seed + static_cast<std::uint64_t>(r), 0xFC));
      double err = 0.0;
      switch (kinds[c]) {
        case ClassifierKind::proposed: {
          const FittedModel m = fit(train, cfg.selection, basis, cfg.kernel, sel_rng);
          err = empirical_risk(m, test, basis_table);
          break;
        }
        case ClassifierKind::complete_case: {
          const FittedModel m = fit_complete_case(train, cfg.selection, basis, cfg.kernel, sel_rng);
          err = empirical_risk(m, test, basis_table);
          break;
        }
        case ClassifierKind::full_data: {
          const FittedModel m = fit(train_complete, cfg.selection, basis, cfg.kernel, sel_rng);
          err = empirical_risk(m, test_complete, basis_table);
          break;
        }
      }
      errors[c][static_cast<std::size_t>(r)] = err;
    }
  });

  std::vector<ResultRow> rows;
  rows.reserve(kinds.size());
  for (std::size_t c = 0; c < kinds.size(); ++c)
    rows.push_back(detail::aggregate(to_string(kinds[c]), cfg.n, std::move(errors[c])));
  return rows;
}

// ---------------------------------------------------------------------------
// Simulation-study cell registry
// ---------------------------------------------------------------------------

/// One coefficient row of the simulation study: logistic coefficients for
/// candidate windows 2..5 plus the flat complete rate used by mcar.
struct StudyRow {
  MechanismKind mech = MechanismKind::nmar;
  MissingMechanism::Coef coef[4];
  double mcar_rate = 0.7;
};

struct CellSpec {
  std::string label;
  int n = 100;
  int n_patterns = 1;  // dataset patterns (1 for the fully observed baseline)
  ClassifierKind classifier = ClassifierKind::proposed;
  StudyRow row;
};

/// All fifty cells of the study table. Complete-case cells are evaluated on
/// the 3-pattern datasets of their row; the fully-observed baseline cells use
/// no missingness at all.
inline const std::vector<CellSpec>& table_cells() {
  static const std::vector<CellSpec> cells = [] {
    const StudyRow none{MechanismKind::none, {}, 0.7};
    const StudyRow nmar30a{MechanismKind::nmar,
                           {{0, 0.95, 0.13}, {0, 0.9, 1}, {0, 1.05, 0.13}, {0, 1.2, 1}},
                           0.7};
    const StudyRow nmar30b{MechanismKind::nmar,
                           {{2, 0.01, 0.8}, {2, 0.01, 0.4}, {2, 0.01, 0.3}, {2, 0.01, 0.3}},
                           0.7};
    const StudyRow mar30{MechanismKind::mar,
                         {{1.9, 0.075, 0}, {1.9, 0.075, 0}, {2, 0.085, 0}, {2, 0.085, 0}},
                         0.7};
    const StudyRow mcar30{MechanismKind::mcar, {}, 0.7};
    const StudyRow nmar80a{MechanismKind::nmar,
                           {{0, -1.9, 1.5}, {0, -1.45, -3}, {0, -2.1, 1.5}, {0, -2, -3}},
                           0.2};
    const StudyRow nmar80b{MechanismKind::nmar,
                           {{-5, -0.4, 0.25}, {-4, -0.5, -0.15}, {-5, -0.4, 0.25}, {-4, -0.5, -0.15}},
                           0.2};
    const StudyRow mar80{MechanismKind::mar,
                         {{1, -3, 0}, {-1.45, -0.95, 0}, {0.6, -3, 0}, {-1.9, -0.95, 0}},
                         0.2};
    const StudyRow mcar80{MechanismKind::mcar, {}, 0.2};

    std::vector<CellSpec> v;
    v.push_back({"C1", 100, 1, ClassifierKind::full_data, none});
    v.push_back({"C2", 200, 1, ClassifierKind::full_data, none});
    int c = 3;
    for (int n : {100, 200})
      for (const StudyRow& row : {nmar30a, nmar30b, mar30, mcar30}) {
        v.push_back({"C" + std::to_string(c++), n, 3, ClassifierKind::complete_case, row});
        v.push_back({"C" + std::to_string(c++), n, 3, ClassifierKind::proposed, row});
        v.push_back({"C" + std::to_string(c++), n, 5, ClassifierKind::proposed, row});
      }
    for (int n : {100, 200})
      for (const StudyRow& row : {nmar80a, nmar80b, mar80, mcar80}) {
        v.push_back({"C" + std::to_string(c++), n, 3, ClassifierKind::complete_case, row});
        v.push_back({"C" + std::to_string(c++), n, 3, ClassifierKind::proposed, row});
        v.push_back({"C" + std::to_string(c++), n, 5, ClassifierKind::proposed, row});
      }
    return v;
  }();
  return cells;
}

inline const CellSpec& find_cell(const std::string& label) {
  for (const CellSpec& c : table_cells())
    if (c.label == label) return c;
  throw std::invalid_argument("unknown table cell '" + label + "'");
}

/// Experiment configuration for one registry cell, with shared knobs
/// (replications, grids, seed, kernel) taken from the base configuration.
inline ExperimentConfig cell_config(const CellSpec& cell, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.n = cell.n;
  cfg.n_patterns = cell.n_patterns;
  cfg.classifiers = {cell.classifier};
  cfg.mechanism = MissingMechanism{};
  cfg.mechanism.kind = cell.row.mech;
  cfg.mechanism.mcar_complete_rate = cell.row.mcar_rate;
  if (cell.row.mech == MechanismKind::nmar || cell.row.mech == MechanismKind::mar)
    cfg.mechanism.coef.assign(cell.row.coef, cell.row.coef + (cell.n_patterns - 1));
  cfg.selection.d_values.clear();  // re-derive the dimension cap from this cell's n
  return cfg;
}

}  // namespace fragclass
