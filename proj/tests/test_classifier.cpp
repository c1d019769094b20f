#include <doctest.h>

#include <cmath>
#include <vector>

#include "fragclass/classifier.hpp"
#include "fragclass/rng.hpp"

using namespace fragclass;

namespace {

// small hand-built model over a 101-node grid with two patterns
struct Fixture {
  TimeGrid grid{101};
  PatternCatalog catalog{{MissingPattern::full(grid), MissingPattern({{0.0, 0.5}}, grid)}};
  FittedModel model;

  explicit Fixture(KernelFamily family = KernelFamily::gaussian, int d = 2)
      : model{grid, catalog, BasisSpec{4}, KernelSpec{family}, d, {0.5, 0.5}} {
    model.store.resize(2);
  }

  void add(int k, std::vector<double> scores4, int label) {
    model.store[static_cast<std::size_t>(k - 1)].push_back(TrainingPoint{std::move(scores4), label});
  }
};

}  // namespace

TEST_CASE("vote examples") {
  Fixture fx;
  const std::vector<double> q{0.3, -0.2};

  SUBCASE("empty pattern class votes zero") { CHECK(vote(fx.model, 1, q, 0.5, 2) == 0.0); }

  SUBCASE("one matching positive point votes K(0) = 1") {
    fx.add(1, {0.3, -0.2, 9.0, 9.0}, 1);  // trailing components ignored at d = 2
    CHECK(vote(fx.model, 1, q, 0.5, 2) == 1.0);
  }

  SUBCASE("equidistant opposite labels cancel") {
    fx.add(1, {0.3 + 0.1, -0.2, 0.0, 0.0}, 1);
    fx.add(1, {0.3 - 0.1, -0.2, 0.0, 0.0}, 0);
    CHECK(vote(fx.model, 1, q, 0.5, 2) == doctest::Approx(0.0));
  }

  SUBCASE("argument checks") {
    CHECK_THROWS_AS(vote(fx.model, 3, q, 0.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(vote(fx.model, 1, q, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(vote(fx.model, 1, q, 0.5, 3), std::invalid_argument);
  }
}

TEST_CASE("classify examples") {
  const TimeGrid grid(101);
  const PatternCatalog catalog({MissingPattern::full(grid)});
  const BasisTable basis(BasisSpec{2}, grid);

  // constant curve: scores (1, 0) at d = 2
  const std::vector<double> ones(static_cast<std::size_t>(grid.points()), 1.0);
  const ObservedCurve query = restrict_to_pattern(grid, ones, catalog.at(1), 1);
  const auto qscores = filter_curve(query, 2, basis, catalog).scores;

  FittedModel m{grid, catalog, BasisSpec{2}, KernelSpec{}, 2, {0.4}};
  m.store.resize(1);

  SUBCASE("positive point at the query's own scores gives class 1") {
    m.store[0].push_back(TrainingPoint{qscores, 1});
    CHECK(classify(m, query) == 1);
  }

  SUBCASE("exact zero vote gives class 0") {
    m.store[0].push_back(TrainingPoint{qscores, 1});
    m.store[0].push_back(TrainingPoint{qscores, 0});
    CHECK(classify(m, query) == 0);
  }

  SUBCASE("empty training class gives class 0") { CHECK(classify(m, query) == 0); }

  SUBCASE("pattern outside the catalog is an error") {
    ObservedCurve bad = query;
    bad.pattern_index = 2;
    CHECK_THROWS_AS(classify(m, bad), std::invalid_argument);
  }
}

TEST_CASE("classify is the sign of the vote, invariant to positive scaling") {
  Fixture fx;
  Rng rng(21);
  for (int i = 0; i < 12; ++i)
    fx.add(1 + (i % 2), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)},
           i % 3 == 0 ? 1 : 0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> q{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const int k = 1 + (rep % 2);
    const double v = vote(fx.model, k, q, 0.5, 2);
    for (double scale : {0.25, 1.0, 40.0})
      CHECK((scale * v > 0.0) == (v > 0.0));
  }
}

TEST_CASE("adding a positive point never decreases a vote") {
  Fixture fx;
  Rng rng(22);
  for (int i = 0; i < 10; ++i)
    fx.add(1, {rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0, 0.0}, rng.bernoulli(0.5) ? 1 : 0);
  Fixture more = fx;
  more.model.store[0].push_back(TrainingPoint{{0.1, 0.1, 0.0, 0.0}, 1});
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<double> q{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(vote(more.model, 1, q, 0.5, 2) >= vote(fx.model, 1, q, 0.5, 2));
  }
}

TEST_CASE("classification is dispatched: other patterns' stores are irrelevant") {
  const TimeGrid grid(101);
  const PatternCatalog catalog({MissingPattern::full(grid), MissingPattern({{0.0, 0.5}}, grid)});
  const BasisTable basis(BasisSpec{3}, grid);
  Rng rng(23);

  auto random_curve = [&](int k) {
    std::vector<double> v(static_cast<std::size_t>(grid.points()));
    const double a = rng.uniform(0, 5), b = rng.uniform(0, 1);
    for (int i = 0; i < grid.points(); ++i) {
      const double t = grid.node(i);
      v[static_cast<std::size_t>(i)] = a * (t - 0.5) * (t - 0.5) + b;
    }
    return restrict_to_pattern(grid, v, catalog.at(k), k);
  };

  FittedModel m{grid, catalog, BasisSpec{3}, KernelSpec{}, 3, {0.3, 0.7}};
  m.store.resize(2);
  for (int i = 0; i < 8; ++i) {
    m.store[0].push_back(TrainingPoint{{rng.uniform(-1, 2), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                       rng.bernoulli(0.5) ? 1 : 0});
    m.store[1].push_back(TrainingPoint{{rng.uniform(-1, 2), rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                       rng.bernoulli(0.5) ? 1 : 0});
  }
  FittedModel scrambled = m;
  std::reverse(scrambled.store[1].begin(), scrambled.store[1].end());
  scrambled.store[1][0].label = 1 - scrambled.store[1][0].label;  // perturb the other pattern

  for (int rep = 0; rep < 20; ++rep) {
    const ObservedCurve q = random_curve(1);
    CHECK(classify(m, q) == classify(scrambled, q));
  }
}

TEST_CASE("box kernel reproduces an isolated training point's label") {
  const TimeGrid grid(101);
  const PatternCatalog catalog({MissingPattern::full(grid)});
  const BasisTable basis(BasisSpec{2}, grid);
  Rng rng(24);

  // well-separated training curves with distinct scores
  Dataset data{grid, catalog, {}};
  std::vector<double> levels{0.0, 1.0, 2.5, 4.0, 6.0, 9.0};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::vector<double> v(static_cast<std::size_t>(grid.points()), levels[i]);
    data.curves.push_back(
        restrict_to_pattern(grid, v, catalog.at(1), 1, static_cast<int>(i % 2), std::to_string(i)));
  }
  // smallest pairwise score distance is 1.0 (levels 0 and 1); h below half of it
  const FittedModel m = make_model(data, basis, KernelSpec{KernelFamily::box}, 2, {0.4});
  for (const ObservedCurve& c : data.curves) CHECK(classify(m, c, basis) == *c.label);
}

TEST_CASE("complete-case models: kernel vote on complete queries, coin on fragments") {
  const TimeGrid grid(101);
  const PatternCatalog catalog({MissingPattern::full(grid), MissingPattern({{0.0, 0.5}}, grid)});
  const BasisTable basis(BasisSpec{1}, grid);

  // one positive complete training curve, constant 1: score (1)
  FittedModel m{grid, catalog, BasisSpec{1}, KernelSpec{}, 1, {0.5, 0.5}};
  m.store.resize(2);
  m.store[0].push_back(TrainingPoint{{1.0}, 1});
  m.complete_case = true;

  // complete query near the stored point: positive vote
  const std::vector<double> ones(static_cast<std::size_t>(grid.points()), 1.0);
  const ObservedCurve complete = restrict_to_pattern(grid, ones, catalog.at(1), 1);
  CHECK(classify(m, complete, basis) == 1);

  // fragmented query: the deterministic coin, same answer on repeat calls
  const ObservedCurve frag = restrict_to_pattern(grid, ones, catalog.at(2), 2);
  const int coin = classify(m, frag, basis);
  CHECK(coin == curve_coin(frag));
  CHECK(classify(m, frag, basis) == coin);

  // without the flag the empty pattern-2 store votes zero -> class 0
  m.complete_case = false;
  CHECK(classify(m, frag, basis) == 0);
}

TEST_CASE("the fallback coin is balanced and label-free over generated fragments") {
  const TimeGrid grid(101);
  const PatternCatalog catalog({MissingPattern::full(grid), MissingPattern({{0.0, 0.5}}, grid)});
  Rng rng(31);
  int heads = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(static_cast<std::size_t>(grid.points()));
    const double a = rng.uniform(0, 5), b = rng.uniform(0, 1);
    for (int node = 0; node < grid.points(); ++node) {
      const double t = grid.node(node);
      v[static_cast<std::size_t>(node)] = a * (t - 0.5) * (t - 0.5) + b;
    }
    heads += curve_coin(restrict_to_pattern(grid, v, catalog.at(2), 2));
  }
  CHECK(std::fabs(static_cast<double>(heads) / n - 0.5) < 0.03);
}
