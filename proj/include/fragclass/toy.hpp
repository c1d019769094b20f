#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fragclass {

/// A finite joint distribution of (score x, class y, pattern delta), used as
/// an enumerable stand-in for the classification problem: small enough that
/// every possible decision table can be tried.
struct DiscreteToyDist {
  struct Atom {
    double x = 0.0;
    int y = 0;
    int delta = 1;
    double prob = 0.0;
  };

  std::vector<Atom> atoms;

  void validate() const {
    if (atoms.empty()) throw std::invalid_argument("DiscreteToyDist: empty support");
    double total = 0.0;
    for (const Atom& a : atoms) {
      if (a.prob < 0.0) throw std::invalid_argument("DiscreteToyDist: negative probability");
      if (a.y != 0 && a.y != 1) throw std::invalid_argument("DiscreteToyDist: class not in {0,1}");
      if (a.delta < 1) throw std::invalid_argument("DiscreteToyDist: pattern index < 1");
      total += a.prob;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("DiscreteToyDist: probabilities do not sum to 1");
  }
};

/// A classifier on the toy: a label for every observable (delta, x) cell.
using ToyDecisionTable = std::map<std::pair<int, double>, int>;

struct BruteForceResult {
  ToyDecisionTable optimal_table;  // the plug-in table, which attains the minimum
  double optimal_error = 0.0;      // exhaustive minimum over all decision tables
  double plugin_error = 0.0;       // error of the plug-in rule I{phi_k(x) > 0}
};

namespace detail {

struct ToyCells {
  std::vector<std::pair<int, double>> keys;         // distinct (delta, x)
  std::vector<std::array<double, 2>> mass;          // P(x, y, delta) per cell, by y
};

inline ToyCells toy_cells(const DiscreteToyDist& toy) {
  ToyCells cells;
  std::map<std::pair<int, double>, std::size_t> index;
  for (const auto& a : toy.atoms) {
    const std::pair<int, double> key{a.delta, a.x};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, cells.keys.size()).first;
      cells.keys.push_back(key);
      cells.mass.push_back({0.0, 0.0});
    }
    cells.mass[it->second][static_cast<std::size_t>(a.y)] += a.prob;
  }
  return cells;
}

}  // namespace detail

/// The conditional vote phi_k(x) = E[(2Y-1) I{delta=k} | X = x], computed
/// from the joint probabilities. The score is shared across patterns in the
/// toy, so the conditioning marginal is P(X = x).
inline double toy_phi(const DiscreteToyDist& toy, int k, double x) {
  double num = 0.0, marginal = 0.0;
  for (const auto& a : toy.atoms) {
    if (a.x == x) marginal += a.prob;
    if (a.x == x && a.delta == k) num += (2.0 * a.y - 1.0) * a.prob;
  }
  if (marginal <= 0.0) throw std::invalid_argument("toy_phi: x outside support");
  return num / marginal;
}

/// Error of an arbitrary decision table under the toy distribution.
inline double toy_error(const DiscreteToyDist& toy, const ToyDecisionTable& table) {
  double err = 0.0;
  for (const auto& a : toy.atoms) {
    const auto it = table.find({a.delta, a.x});
    if (it == table.end()) throw std::invalid_argument("toy_error: table misses a support cell");
    if (it->second != a.y) err += a.prob;
  }
  return err;
}

/// Enumerate every decision table on the toy's observable cells and return
/// the minimum error, together with the plug-in rule I{phi_k(x) > 0} and its
/// error. The plug-in rule attains the minimum (ties decided as class 0 are
/// still optimal, since a tied cell costs the same either way).
inline BruteForceResult brute_force_optimal(const DiscreteToyDist& toy) {
  toy.validate();
  if (toy.atoms.size() > 20)
    throw std::invalid_argument("brute_force_optimal: support too large to enumerate");
  const detail::ToyCells cells = detail::toy_cells(toy);
  const std::size_t n = cells.keys.size();
  if (n > 20) throw std::invalid_argument("brute_force_optimal: support too large to enumerate");

  BruteForceResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    double err = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const int lab = (bits >> c) & 1u;
      err += cells.mass[c][static_cast<std::size_t>(1 - lab)];
    }
    best = std::min(best, err);
  }
  out.optimal_error = best;

  for (std::size_t c = 0; c < n; ++c) {
    const auto& [k, x] = cells.keys[c];
    out.optimal_table[{k, x}] = toy_phi(toy, k, x) > 0.0 ? 1 : 0;
  }
  out.plugin_error = toy_error(toy, out.optimal_table);
  return out;
}

/// Excess-risk bound check for an approximate vote function table
/// phi_tilde[(k, x)]: the gap between the error of I{phi_tilde > 0} and the
/// optimal error never exceeds sum over k of E|phi_k(X) - phi_tilde_k(X)|.
/// Returns (excess, bound).
inline std::pair<double, double> toy_excess_and_bound(
    const DiscreteToyDist& toy, const std::map<std::pair<int, double>, double>& phi_tilde) {
  const BruteForceResult base = brute_force_optimal(toy);
  ToyDecisionTable table;
  for (const auto& [key, v] : phi_tilde) table[key] = v > 0.0 ? 1 : 0;
  const double excess = toy_error(toy, table) - base.optimal_error;

  // marginal of x
  std::map<double, double> px;
  for (const auto& a : toy.atoms) px[a.x] += a.prob;
  double bound = 0.0;
  for (const auto& [key, v] : phi_tilde) {
    const auto& [k, x] = key;
    bound += px.at(x) * std::fabs(toy_phi(toy, k, x) - v);
  }
  return {excess, bound};
}

}  // namespace fragclass
