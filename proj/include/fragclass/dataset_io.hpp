#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fragclass/curve.hpp"
#include "fragclass/filtering.hpp"
#include "fragclass/selection.hpp"

namespace fragclass {

/// Shortest exact decimal form of a double: reading it back recovers the
/// same bits, which keeps exports byte-stable and models round-trippable.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (std::strtod(buf, nullptr) == v) {
    // try shorter forms first for readable files
    for (int prec = 1; prec < 17; ++prec) {
      char s[40];
      std::snprintf(s, sizeof(s), "%.*g", prec, v);
      if (std::strtod(s, nullptr) == v) return s;
    }
  }
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, long line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse " + what +
                             " '" + s + "'");
  return v;
}

}  // namespace detail

/// Write a dataset in long format: header `id,t,value,label`, one row per
/// observed node. Unobserved nodes are simply absent.
inline void write_dataset(std::ostream& os, const Dataset& data) {
  os << "id,t,value,label\n";
  for (const ObservedCurve& c : data.curves) {
    if (c.id.find(',') != std::string::npos)
      throw std::invalid_argument("write_dataset: curve id contains a comma");
    const std::string label = c.label ? std::to_string(*c.label) : "";
    for (int i = 0; i < data.grid.points(); ++i)
      if (c.observed_at(i))
        os << c.id << ',' << fmt_double(data.grid.node(i)) << ','
           << fmt_double(c.values[static_cast<std::size_t>(i)]) << ',' << label << '\n';
  }
}

inline void write_dataset_file(const std::string& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dataset(os, data);
}

/// Read long-format curves. Rows must carry grid-aligned t values (within
/// 1e-9); an empty value field marks the node unobserved. Labels, when
/// present, must be 0 or 1 and consistent within a curve. Pattern indices
/// are left unassigned.
inline std::vector<ObservedCurve> read_raw_curves(std::istream& is, const TimeGrid& grid) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty dataset file");
  {
    auto header = detail::split_csv_line(line);
    if (header.size() != 4 || header[0] != "id" || header[1] != "t" || header[2] != "value" ||
        header[3] != "label")
      throw std::runtime_error("line 1: expected header 'id,t,value,label'");
  }
  std::vector<ObservedCurve> curves;
  std::map<std::string, std::size_t> by_id;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                               std::to_string(f.size()));
    const std::string& id = f[0];
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      it = by_id.emplace(id, curves.size()).first;
      curves.push_back(ObservedCurve{
          grid,
          std::vector<double>(static_cast<std::size_t>(grid.points()),
                              std::numeric_limits<double>::quiet_NaN()),
          0,
          std::nullopt,
          id});
    }
    ObservedCurve& c = curves[it->second];

    const double t = detail::parse_double(f[1], line_no, "t");
    const int node = grid.node_index(t);
    if (node < 0)
      throw std::runtime_error("line " + std::to_string(line_no) + ": t=" + f[1] +
                               " does not match any grid node (grid has " +
                               std::to_string(grid.points()) + " nodes)");
    if (!f[2].empty()) {
      const double v = detail::parse_double(f[2], line_no, "value");
      if (c.observed_at(node) && c.values[static_cast<std::size_t>(node)] != v)
        throw std::runtime_error("line " + std::to_string(line_no) + ": conflicting value for id '" +
                                 id + "' at t=" + f[1]);
      c.values[static_cast<std::size_t>(node)] = v;
    }
    if (!f[3].empty()) {
      if (f[3] != "0" && f[3] != "1")
        throw std::runtime_error("line " + std::to_string(line_no) + ": label must be 0 or 1");
      const int lab = f[3] == "1" ? 1 : 0;
      if (c.label && *c.label != lab)
        throw std::runtime_error("line " + std::to_string(line_no) + ": conflicting label for id '" +
                                 id + "'");
      c.label = lab;
    }
  }
  if (curves.empty()) throw std::runtime_error("dataset file contains no rows");
  return curves;
}

inline std::vector<ObservedCurve> read_raw_curves_file(const std::string& path,
                                                       const TimeGrid& grid) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_raw_curves(is, grid);
}

inline Dataset read_dataset_file(const std::string& path, const TimeGrid& grid) {
  return detect_patterns(grid, read_raw_curves_file(path, grid));
}

/// Match each curve's own observability mask against an existing catalog.
/// Curves whose pattern is absent are reported by id instead of silently
/// remapped.
struct PatternAssignment {
  std::vector<ObservedCurve> matched;
  std::vector<std::pair<std::string, std::string>> failures;  // (id, reason)
};

inline PatternAssignment assign_patterns(std::vector<ObservedCurve> curves,
                                         const PatternCatalog& catalog) {
  PatternAssignment out;
  for (ObservedCurve& c : curves) {
    try {
      const MissingPattern p = detail::mask_pattern(c);
      if (auto k = catalog.find(p)) {
        c.pattern_index = *k;
        out.matched.push_back(std::move(c));
      } else {
        out.failures.emplace_back(c.id, "observed pattern not in model catalog");
      }
    } catch (const std::exception& e) {
      out.failures.emplace_back(c.id, e.what());
    }
  }
  return out;
}

/// Filtered-dataset export: `id,pattern,d,score_1..score_d` (rows ragged by d).
inline void write_scores(std::ostream& os, const Dataset& data, const ScoreTable& table) {
  os << "id,pattern,d,scores\n";
  for (int i = 0; i < table.size(); ++i) {
    os << data.curves[static_cast<std::size_t>(i)].id << ','
       << table.pattern[static_cast<std::size_t>(i)] << ',' << table.d_max;
    for (double s : table.scores[static_cast<std::size_t>(i)]) os << ',' << fmt_double(s);
    os << '\n';
  }
}

/// Risk report export: `d,h_1,...,h_M,mean_risk,se_risk`.
inline void write_risk_report(std::ostream& os, const RiskReport& report, int n_patterns) {
  os << "d";
  for (int k = 1; k <= n_patterns; ++k) os << ",h_" << k;
  os << ",mean_risk,se_risk\n";
  for (const RiskRow& row : report.rows) {
    os << row.d;
    for (double h : row.h) os << ',' << fmt_double(h);
    os << ',' << fmt_double(row.mean_risk) << ',' << fmt_double(row.se_risk) << '\n';
  }
}

inline void write_predictions(std::ostream& os,
                              const std::vector<std::pair<std::string, int>>& preds) {
  os << "id,predicted_class\n";
  for (const auto& [id, cls] : preds) os << id << ',' << cls << '\n';
}

inline std::vector<std::pair<std::string, int>> read_predictions(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty predictions file");
  {
    auto header = detail::split_csv_line(line);
    if (header.size() != 2 || header[0] != "id" || header[1] != "predicted_class")
      throw std::runtime_error("line 1: expected header 'id,predicted_class'");
  }
  std::vector<std::pair<std::string, int>> out;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 2 || (f[1] != "0" && f[1] != "1"))
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 'id,predicted_class' with class 0 or 1");
    out.emplace_back(f[0], f[1] == "1" ? 1 : 0);
  }
  return out;
}

}  // namespace fragclass
