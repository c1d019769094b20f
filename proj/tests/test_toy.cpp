#include <doctest.h>

#include <cmath>
#include <map>

#include "fragclass/toy.hpp"
#include "toy_fixtures.hpp"

using namespace fragclass;

TEST_CASE("class determined by the observable cell: zero optimal error, attained by plug-in") {
  DiscreteToyDist toy;
  toy.atoms = {{0.0, 1, 1, 0.25}, {1.0, 0, 1, 0.25}, {0.0, 0, 2, 0.25}, {1.0, 1, 2, 0.25}};
  const BruteForceResult r = brute_force_optimal(toy);
  CHECK(r.optimal_error == 0.0);
  CHECK(r.plugin_error == 0.0);
  CHECK(r.optimal_table.at({1, 0.0}) == 1);
  CHECK(r.optimal_table.at({2, 0.0}) == 0);
}

TEST_CASE("tied cell: both labelings optimal, plug-in picks 0") {
  DiscreteToyDist toy;
  toy.atoms = {{0.0, 1, 1, 0.25}, {0.0, 0, 1, 0.25}, {1.0, 1, 1, 0.5}};
  const BruteForceResult r = brute_force_optimal(toy);
  CHECK(r.optimal_error == 0.25);           // the tied cell is always half wrong
  CHECK(r.plugin_error == r.optimal_error);  // ties cost the same either way
  CHECK(r.optimal_table.at({1, 0.0}) == 0);  // strict rule at phi = 0
  CHECK(toy_phi(toy, 1, 0.0) == 0.0);
}

TEST_CASE("plug-in equals the exhaustive minimum on random toys, exactly") {
  Rng rng(2024);
  for (int rep = 0; rep < 25; ++rep) {
    const DiscreteToyDist toy = toyfix::random_toy(rng);
    const BruteForceResult r = brute_force_optimal(toy);
    CHECK(r.plugin_error == r.optimal_error);
  }
}

TEST_CASE("excess risk of a perturbed vote table stays within the absolute-difference bound") {
  Rng rng(2025);
  for (int rep = 0; rep < 25; ++rep) {
    const DiscreteToyDist toy = toyfix::random_toy(rng);
    std::map<std::pair<int, double>, double> tilde;
    for (const auto& a : toy.atoms)
      tilde[{a.delta, a.x}] = rng.uniform(-1.0, 1.0);
    const auto [excess, bound] = toy_excess_and_bound(toy, tilde);
    CHECK(excess >= -1e-15);
    CHECK(excess <= bound);
  }
}

TEST_CASE("oversized supports are rejected") {
  DiscreteToyDist toy;
  for (int i = 0; i < 21; ++i)
    toy.atoms.push_back({static_cast<double>(i), i % 2, 1, 1.0 / 21});
  CHECK_THROWS_AS(brute_force_optimal(toy), std::invalid_argument);
}

TEST_CASE("distribution validation") {
  DiscreteToyDist bad;
  bad.atoms = {{0.0, 1, 1, 0.7}, {1.0, 0, 1, 0.7}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.atoms = {{0.0, 2, 1, 1.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
