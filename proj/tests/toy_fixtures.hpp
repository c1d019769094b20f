#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <utility>
#include <vector>

#include "fragclass/rng.hpp"
#include "fragclass/toy.hpp"

namespace toyfix {

/// Random toy with the given number of atoms and dyadic probabilities
/// (weights are a composition of 64), so error sums are exact doubles and
/// equality checks are meaningful.
inline fragclass::DiscreteToyDist random_toy(fragclass::Rng& rng, int n_atoms = 6) {
  const double xs[3] = {-1.0, 0.5, 2.0};
  std::set<std::pair<int, int>> seen;  // (x index * 4 + delta*2 + y) dedup
  std::vector<std::array<int, 3>> combos;
  while (static_cast<int>(combos.size()) < n_atoms) {
    const int xi = rng.uniform_int(0, 2);
    const int y = rng.uniform_int(0, 1);
    const int delta = rng.uniform_int(1, 2);
    if (seen.insert({xi * 4 + delta * 2 + y, 0}).second)
      combos.push_back({xi, y, delta});
  }
  // composition of 64 into n_atoms positive parts
  std::set<int> cuts;
  while (static_cast<int>(cuts.size()) < n_atoms - 1) cuts.insert(rng.uniform_int(1, 63));
  std::vector<int> bounds(cuts.begin(), cuts.end());
  bounds.push_back(64);
  fragclass::DiscreteToyDist toy;
  int prev = 0;
  for (int i = 0; i < n_atoms; ++i) {
    const int w = bounds[static_cast<std::size_t>(i)] - prev;
    prev = bounds[static_cast<std::size_t>(i)];
    toy.atoms.push_back({xs[combos[static_cast<std::size_t>(i)][0]],
                         combos[static_cast<std::size_t>(i)][1],
                         combos[static_cast<std::size_t>(i)][2], w / 64.0});
  }
  toy.validate();
  return toy;
}

}  // namespace toyfix
