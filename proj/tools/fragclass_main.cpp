#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fragclass/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Classification of partially observed curves via filtered kernel votes"};
  app.require_subcommand(1);

  std::string config_path, data_path, model_path, output, report_path, scores_path, pred_path,
      cells;
  int grid_points = 1001;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--output", output, "long-format dataset to write")->required();

  auto* fit = app.add_subcommand("fit", "Fit a classifier to a long-format dataset");
  fit->add_option("--config", config_path, "config file")->required();
  fit->add_option("--data", data_path, "long-format training dataset")->required();
  fit->add_option("--model", model_path, "model file to write")->required();
  fit->add_option("--report", report_path, "selection risk report to write");
  fit->add_option("--export-scores", scores_path, "filtered-score table to write");

  auto* predict = app.add_subcommand("predict", "Classify curves with a fitted model");
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--data", data_path, "long-format dataset")->required();
  predict->add_option("--output", output, "predictions file to write")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against labels");
  evaluate->add_option("--predictions", pred_path, "predictions file")->required();
  evaluate->add_option("--data", data_path, "long-format dataset with labels")->required();
  evaluate->add_option("--grid-points", grid_points, "grid resolution of the dataset");
  evaluate->add_option("--output", output, "report file to write");

  auto* table = app.add_subcommand("reproduce-table", "Run simulation-study cells");
  table->add_option("--cells", cells, "comma-separated cell labels, e.g. C1,C30,C31")->required();
  table->add_option("--config", config_path, "config file")->required();
  table->add_option("--output", output, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return fragclass::cli::cmd_simulate(config_path, output);
    if (*fit) return fragclass::cli::cmd_fit(config_path, data_path, model_path, report_path,
                                             scores_path);
    if (*predict) return fragclass::cli::cmd_predict(model_path, data_path, output);
    if (*evaluate) return fragclass::cli::cmd_evaluate(pred_path, data_path, grid_points, output);
    if (*table) return fragclass::cli::cmd_reproduce_table(config_path, cells, output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
