#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fragclass/grid.hpp"

namespace fragclass {

/// Orthonormal Fourier system on [0,1]:
///
///   psi_1(t) = 1,
///   psi_2k(t) = sqrt(2) cos(2 pi k t),
///   psi_2k+1(t) = sqrt(2) sin(2 pi k t),  k >= 1.
inline double fourier_basis(int j, double t) {
  if (j < 1) throw std::invalid_argument("fourier_basis: index must be >= 1");
  if (j == 1) return 1.0;
  const double w = 2.0 * std::numbers::pi * static_cast<double>(j / 2);
  return (j % 2 == 0) ? std::numbers::sqrt2 * std::cos(w * t)
                      : std::numbers::sqrt2 * std::sin(w * t);
}

/// Basis configuration: the Fourier family above, truncated at max_dim.
struct BasisSpec {
  int max_dim = 1;

  void validate() const {
    if (max_dim < 1) throw std::invalid_argument("BasisSpec: max_dim must be >= 1");
  }
};

/// Basis values tabulated at every grid node, row j-1 holding psi_j.
/// Shared read-only by everything that projects curves on one grid.
class BasisTable {
 public:
  BasisTable(const BasisSpec& spec, const TimeGrid& grid) : dim_(spec.max_dim), grid_(grid) {
    spec.validate();
    values_.resize(static_cast<std::size_t>(dim_) * grid.points());
    for (int j = 1; j <= dim_; ++j)
      for (int i = 0; i < grid.points(); ++i)
        values_[idx(j, i)] = fourier_basis(j, grid.node(i));
  }

  int dim() const { return dim_; }
  const TimeGrid& grid() const { return grid_; }
  double at(int j, int node) const { return values_[idx(j, node)]; }

 private:
  std::size_t idx(int j, int i) const {
    return static_cast<std::size_t>(j - 1) * grid_.points() + static_cast<std::size_t>(i);
  }

  int dim_;
  TimeGrid grid_;
  std::vector<double> values_;
};

}  // namespace fragclass
