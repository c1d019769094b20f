#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fragclass/config.hpp"
#include "fragclass/experiment.hpp"
#include "fragclass/model_io.hpp"

namespace fragclass::cli {

/// All configuration keys resolved against their defaults. One config file
/// can drive every subcommand; commands read the parts they need.
struct ResolvedConfig {
  ExperimentConfig experiment;
  ClassifierKind fit_classifier = ClassifierKind::proposed;
  int d_max_override = 0;  // 0 = derive from sample size
  int h_grid_size = 20;
};

inline ResolvedConfig resolve_config(const Config& cfg) {
  ResolvedConfig r;
  ExperimentConfig& e = r.experiment;
  e.grid_points = static_cast<int>(cfg.get_int("grid_points", 1001));
  e.n = static_cast<int>(cfg.get_int("n", 100));
  e.n_patterns = static_cast<int>(cfg.get_int("M", 3));
  e.mechanism.kind = mechanism_from_string(cfg.get_string("mechanism", "none"));
  e.mechanism.mcar_complete_rate = cfg.get_double("mcar_rate", 0.7);
  for (int k = 2; k <= 5; ++k) {
    MissingMechanism::Coef co;
    co.a = cfg.get_double("a_" + std::to_string(k), 0.0);
    co.b = cfg.get_double("b_" + std::to_string(k), 0.0);
    co.c = cfg.get_double("c_" + std::to_string(k), 0.0);
    if (k <= e.n_patterns) e.mechanism.coef.push_back(co);
  }
  if (e.mechanism.kind != MechanismKind::nmar && e.mechanism.kind != MechanismKind::mar)
    e.mechanism.coef.clear();
  e.kernel.family = kernel_family_from_string(cfg.get_string("kernel", "gaussian"));
  r.d_max_override = static_cast<int>(cfg.get_int("d_max", 0));
  r.h_grid_size = static_cast<int>(cfg.get_int("h_grid_size", 20));
  e.selection.n_splits = static_cast<int>(cfg.get_int("n_splits", 20));
  e.selection.split_ratio = cfg.get_double("split_ratio", 0.65);
  const std::string h_list = cfg.get_string("h_grid", "");
  if (!h_list.empty()) {  // explicit bandwidth list overrides h_grid_size
    std::stringstream ss(h_list);
    std::string item;
    e.selection.h_values.clear();
    while (std::getline(ss, item, ','))
      if (!item.empty()) e.selection.h_values.push_back(std::stod(item));
  } else {
    e.selection.h_values = SelectionGrid::default_h_grid(r.h_grid_size);
  }
  if (r.d_max_override > 0)
    for (int d = 1; d <= r.d_max_override; ++d) e.selection.d_values.push_back(d);
  e.replications = static_cast<int>(cfg.get_int("replications", 20));
  e.test_size = static_cast<int>(cfg.get_int("test_size", 1000));
  e.seed = cfg.get_seed("seed", 1);
  {
    std::stringstream ss(cfg.get_string("classifiers", "proposed"));
    std::string item;
    e.classifiers.clear();
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) e.classifiers.push_back(classifier_from_string(item));
    }
    if (e.classifiers.empty()) e.classifiers = {ClassifierKind::proposed};
  }
  r.fit_classifier = classifier_from_string(cfg.get_string("classifier", "proposed"));
  cfg.reject_unused();
  return r;
}

/// Deterministic echo of the resolved configuration: fixed key order, exact
/// number formatting, no timestamps or host details.
inline std::string manifest_text(const ResolvedConfig& r) {
  const ExperimentConfig& e = r.experiment;
  std::ostringstream os;
  os << "grid_points = " << e.grid_points << '\n';
  os << "n = " << e.n << '\n';
  os << "M = " << e.n_patterns << '\n';
  os << "mechanism = " << to_string(e.mechanism.kind) << '\n';
  for (std::size_t i = 0; i < e.mechanism.coef.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    os << "a_" << k << " = " << fmt_double(e.mechanism.coef[i].a) << '\n';
    os << "b_" << k << " = " << fmt_double(e.mechanism.coef[i].b) << '\n';
    os << "c_" << k << " = " << fmt_double(e.mechanism.coef[i].c) << '\n';
  }
  if (e.mechanism.kind == MechanismKind::mcar)
    os << "mcar_rate = " << fmt_double(e.mechanism.mcar_complete_rate) << '\n';
  os << "kernel = " << to_string(e.kernel.family) << '\n';
  os << "d_max = " << (r.d_max_override > 0 ? r.d_max_override : 0)
     << (r.d_max_override > 0 ? "" : "  # derived per sample size: floor(2.5 ln n)") << '\n';
  os << "h_grid =";
  for (std::size_t i = 0; i < e.selection.h_values.size(); ++i)
    os << (i ? "," : " ") << fmt_double(e.selection.h_values[i]);
  os << '\n';
  os << "n_splits = " << e.selection.n_splits << '\n';
  os << "split_ratio = " << fmt_double(e.selection.split_ratio) << '\n';
  os << "replications = " << e.replications << '\n';
  os << "test_size = " << e.test_size << '\n';
  os << "seed = " << e.seed << '\n';
  os << "# selection note: a pattern missing from a split's test part contributes no\n";
  os << "# information to its bandwidth in that split; a pattern never represented in\n";
  os << "# any test part falls back to the median bandwidth of the grid.\n";
  os << "# cell note: complete_case cells run on the 3-pattern datasets of their row.\n";
  return os.str();
}

inline SelectionGrid selection_for(const ResolvedConfig& r, int sample_size) {
  SelectionGrid g = r.experiment.selection;
  if (g.d_values.empty())
    for (int d = 1; d <= d_max_rule(sample_size); ++d) g.d_values.push_back(d);
  return g;
}

inline int cmd_simulate(const std::string& config_path, const std::string& output) {
  const ResolvedConfig r = resolve_config(Config::parse_file(config_path));
  const ExperimentConfig& e = r.experiment;
  const TimeGrid grid(e.grid_points);
  const PatternCatalog catalog = simulation_catalog(e.n_patterns, grid);
  e.mechanism.validate(catalog.size());
  const Dataset data = gen_dataset(e.n, e.curve_model, e.mechanism, catalog, grid, e.seed);
  write_dataset_file(output, data);
  std::cout << "wrote " << data.size() << " curves to " << output << '\n';
  return 0;
}

inline int cmd_fit(const std::string& config_path, const std::string& data_path,
                   const std::string& model_out, const std::string& report_path,
                   const std::string& scores_path) {
  const ResolvedConfig r = resolve_config(Config::parse_file(config_path));
  const TimeGrid grid(r.experiment.grid_points);
  Dataset data = read_dataset_file(data_path, grid);
  const SelectionGrid sel = selection_for(r, data.size());
  const BasisSpec basis{sel.d_values.back()};
  Rng rng(r.experiment.seed);

  FitResult fitted = r.fit_classifier == ClassifierKind::complete_case
                         ? fit_complete_case_with_report(data, sel, basis, r.experiment.kernel, rng)
                         : fit_with_report(data, sel, basis, r.experiment.kernel, rng);
  save_model(model_out, fitted.model);
  std::cout << "fitted " << to_string(r.fit_classifier) << " model on " << data.size()
            << " curves (" << data.catalog.size() << " patterns), d_hat=" << fitted.model.d_hat
            << ", wrote " << model_out << '\n';

  if (!report_path.empty()) {
    std::ofstream os(report_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + report_path + "' for writing");
    write_risk_report(os, fitted.report, data.catalog.size());
  }
  if (!scores_path.empty()) {
    std::ofstream os(scores_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + scores_path + "' for writing");
    write_scores(os, data, build_score_table(data, BasisTable(basis, grid)));
  }
  return 0;
}

inline int cmd_predict(const std::string& model_path, const std::string& data_path,
                       const std::string& output) {
  const FittedModel model = load_model(model_path);
  PatternAssignment assigned =
      assign_patterns(read_raw_curves_file(data_path, model.grid), model.catalog);
  const BasisTable basis_table(model.basis, model.grid);
  std::vector<std::pair<std::string, int>> preds;
  preds.reserve(assigned.matched.size());
  for (const ObservedCurve& c : assigned.matched)
    preds.emplace_back(c.id, classify(model, c, basis_table));
  {
    std::ofstream os(output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + output + "' for writing");
    write_predictions(os, preds);
  }
  std::cout << "predicted " << preds.size() << " curves to " << output << '\n';
  for (const auto& [id, reason] : assigned.failures)
    std::cerr << "error: curve '" << id << "': " << reason << '\n';
  return assigned.failures.empty() ? 0 : 1;
}

inline int cmd_evaluate(const std::string& pred_path, const std::string& data_path,
                        int grid_points, const std::string& output) {
  std::ifstream ps(pred_path, std::ios::binary);
  if (!ps) throw std::runtime_error("cannot open '" + pred_path + "'");
  const auto preds = read_predictions(ps);
  const auto curves = read_raw_curves_file(data_path, TimeGrid(grid_points));
  std::map<std::string, int> labels;
  for (const ObservedCurve& c : curves)
    if (c.label) labels[c.id] = *c.label;

  int matched = 0, wrong = 0;
  for (const auto& [id, cls] : preds) {
    const auto it = labels.find(id);
    if (it == labels.end()) continue;  // unlabeled rows carry no risk information
    ++matched;
    wrong += cls != it->second;
  }
  if (matched == 0) throw std::runtime_error("evaluate: no labeled predictions to score");
  std::ostringstream report;
  report << "predictions = " << preds.size() << '\n'
         << "labeled = " << matched << '\n'
         << "misclassified = " << wrong << '\n'
         << "error_rate = " << fmt_double(static_cast<double>(wrong) / matched) << '\n';
  std::cout << report.str();
  if (!output.empty()) {
    std::ofstream os(output, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + output + "' for writing");
    os << report.str();
  }
  return 0;
}

inline int cmd_reproduce_table(const std::string& config_path, const std::string& cells_csv,
                               const std::string& output_dir) {
  const ResolvedConfig r = resolve_config(Config::parse_file(config_path));

  std::vector<std::string> labels;
  {
    std::stringstream ss(cells_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) labels.push_back(item);
  }
  if (labels.empty()) throw std::runtime_error("reproduce-table: no cells requested");
  std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
    return std::stoi(a.substr(1)) < std::stoi(b.substr(1));
  });
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  // group cells sharing a generator so classifiers see the same draws
  struct Group {
    ExperimentConfig cfg;
    std::vector<const CellSpec*> cells;
  };
  std::vector<Group> groups;
  for (const std::string& label : labels) {
    const CellSpec& cell = find_cell(label);
    ExperimentConfig cfg = cell_config(cell, r.experiment);
    bool placed = false;
    for (Group& g : groups) {
      if (g.cfg.n == cfg.n && g.cfg.n_patterns == cfg.n_patterns &&
          g.cfg.mechanism.kind == cfg.mechanism.kind &&
          g.cfg.mechanism.mcar_complete_rate == cfg.mechanism.mcar_complete_rate &&
          g.cfg.mechanism.coef.size() == cfg.mechanism.coef.size()) {
        bool same = true;
        for (std::size_t i = 0; i < cfg.mechanism.coef.size(); ++i)
          same = same && g.cfg.mechanism.coef[i].a == cfg.mechanism.coef[i].a &&
                 g.cfg.mechanism.coef[i].b == cfg.mechanism.coef[i].b &&
                 g.cfg.mechanism.coef[i].c == cfg.mechanism.coef[i].c;
        if (same) {
          g.cfg.classifiers.push_back(cell.classifier);
          g.cells.push_back(&cell);
          placed = true;
          break;
        }
      }
    }
    if (!placed) groups.push_back(Group{std::move(cfg), {&cell}});
  }

  std::filesystem::create_directories(output_dir);
  std::vector<std::pair<const CellSpec*, ResultRow>> results;
  for (Group& g : groups) {
    const std::vector<ResultRow> rows = run_cell(g.cfg);
    for (const CellSpec* cell : g.cells) {
      const std::string want = to_string(cell->classifier);
      for (const ResultRow& row : rows)
        if (row.classifier == want) {
          results.emplace_back(cell, row);
          break;
        }
    }
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::stoi(a.first->label.substr(1)) < std::stoi(b.first->label.substr(1));
  });

  {
    std::ofstream os(output_dir + "/results.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write results.csv");
    os << "cell,classifier,n,patterns,mechanism,replications,mean_error,sd_error,se_error\n";
    for (const auto& [cell, row] : results)
      os << cell->label << ',' << row.classifier << ',' << cell->n << ',' << cell->n_patterns
         << ',' << to_string(cell->row.mech) << ',' << row.replications << ','
         << fmt_double(row.mean_error) << ',' << fmt_double(row.sd_error) << ','
         << fmt_double(row.se_error) << '\n';
  }
  {
    std::ofstream os(output_dir + "/replicates.csv", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write replicates.csv");
    os << "cell,replicate,error\n";
    for (const auto& [cell, row] : results)
      for (std::size_t i = 0; i < row.replicate_errors.size(); ++i)
        os << cell->label << ',' << i + 1 << ',' << fmt_double(row.replicate_errors[i]) << '\n';
  }
  {
    std::ofstream os(output_dir + "/manifest.txt", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write manifest.txt");
    os << "cells =";
    for (std::size_t i = 0; i < results.size(); ++i)
      os << (i ? "," : " ") << results[i].first->label;
    os << '\n' << manifest_text(r);
  }
  for (const auto& [cell, row] : results)
    std::cout << cell->label << " " << row.classifier << " n=" << cell->n
              << " mean_error=" << row.mean_error << " sd=" << row.sd_error << '\n';
  return 0;
}

}  // namespace fragclass::cli
