#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fragclass/classifier.hpp"

namespace fragclass {

/// Model persistence as a single self-describing JSON file. Doubles are
/// serialized exactly, so a reloaded model reproduces bit-identical
/// predictions.
inline void save_model(const std::string& path, const FittedModel& model) {
  model.validate();
  nlohmann::json j;
  j["format"] = "fragclass-model";
  j["version"] = 1;
  j["grid_points"] = model.grid.points();
  nlohmann::json cat = nlohmann::json::array();
  for (int k = 1; k <= model.catalog.size(); ++k) {
    nlohmann::json ivs = nlohmann::json::array();
    for (const Interval& iv : model.catalog.at(k).intervals())
      ivs.push_back(nlohmann::json::array({iv.lo, iv.hi}));
    cat.push_back(ivs);
  }
  j["catalog"] = cat;
  j["basis"] = {{"family", "fourier"}, {"max_dim", model.basis.max_dim}};
  j["kernel"] = to_string(model.kernel.family);
  j["d_hat"] = model.d_hat;
  j["h_hat"] = model.h_hat;
  j["complete_case"] = model.complete_case;
  nlohmann::json store = nlohmann::json::array();
  for (const auto& points : model.store) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrainingPoint& p : points)
      arr.push_back({{"scores", p.scores}, {"label", p.label}});
    store.push_back(arr);
  }
  j["store"] = store;

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << j.dump(1) << '\n';
}

inline FittedModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  is >> j;
  if (j.value("format", "") != std::string("fragclass-model"))
    throw std::runtime_error("'" + path + "' is not a model file");

  const TimeGrid grid(j.at("grid_points").get<int>());
  std::vector<MissingPattern> patterns;
  for (const auto& ivs : j.at("catalog")) {
    std::vector<Interval> intervals;
    for (const auto& iv : ivs)
      intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    patterns.emplace_back(std::move(intervals), grid);
  }
  FittedModel m{grid,
                PatternCatalog(std::move(patterns)),
                BasisSpec{j.at("basis").at("max_dim").get<int>()},
                KernelSpec{kernel_family_from_string(j.at("kernel").get<std::string>())},
                j.at("d_hat").get<int>(),
                j.at("h_hat").get<std::vector<double>>()};
  m.complete_case = j.value("complete_case", false);
  for (const auto& points : j.at("store")) {
    m.store.emplace_back();
    for (const auto& p : points)
      m.store.back().push_back(
          TrainingPoint{p.at("scores").get<std::vector<double>>(), p.at("label").get<int>()});
  }
  m.validate();
  return m;
}

}  // namespace fragclass
