#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fragclass {

/// Uniform sampling grid on [0,1], both endpoints included.
///
/// The node count must be odd so that composite Simpson quadrature applies
/// on any aligned subinterval with an even cell span. Nodes are exactly
/// t_i = i/(n_points-1).
class TimeGrid {
 public:
  explicit TimeGrid(int n_points = 1001) : n_points_(n_points) {
    if (n_points < 3) throw std::invalid_argument("TimeGrid: need at least 3 nodes");
    if (n_points % 2 == 0) throw std::invalid_argument("TimeGrid: node count must be odd");
  }

  int points() const { return n_points_; }
  int cells() const { return n_points_ - 1; }
  double spacing() const { return 1.0 / (n_points_ - 1); }
  double node(int i) const { return static_cast<double>(i) / (n_points_ - 1); }

  /// Index of the node matching t, or -1 when t is not aligned within tol.
  int node_index(double t, double tol = 1e-9) const {
    const double x = t * (n_points_ - 1);
    const auto i = static_cast<long>(std::llround(x));
    if (i < 0 || i >= n_points_) return -1;
    if (std::fabs(t - node(static_cast<int>(i))) > tol) return -1;
    return static_cast<int>(i);
  }

  /// Like node_index but throws with context on misalignment.
  int require_node_index(double t, const std::string& what) const {
    const int i = node_index(t);
    if (i < 0)
      throw std::invalid_argument(what + ": value " + std::to_string(t) +
                                  " is not a grid node (grid has " +
                                  std::to_string(n_points_) + " nodes)");
    return i;
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.n_points_ == b.n_points_;
  }

 private:
  int n_points_;
};

}  // namespace fragclass
