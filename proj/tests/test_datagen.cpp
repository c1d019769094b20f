#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fragclass/datagen.hpp"
#include "fragclass/dataset_io.hpp"

using namespace fragclass;

namespace {

// closed-form oracle for the completeness probability: symbolic integrals of
// the quadratic curve and of t * curve over interval unions
double oracle_complete_prob(const MissingMechanism::Coef& co, const MissingPattern& s,
                            const MissingPattern* comp, double A, double B, int y) {
  auto chi_int = [&](double lo, double hi) {
    auto F = [&](double t) { return A * std::pow(t - 0.5, 3) / 3.0 + B * t; };
    return F(hi) - F(lo);
  };
  auto tchi_int = [&](double lo, double hi) {
    auto F = [&](double t) {
      return A * (t * t * t * t / 4.0 - t * t * t / 3.0 + t * t / 8.0) + B * t * t / 2.0;
    };
    return F(hi) - F(lo);
  };
  double obs = 0.0;
  for (const Interval& iv : s.intervals()) obs += chi_int(iv.lo, iv.hi);
  double unobs = 0.0;
  if (comp)
    for (const Interval& iv : comp->intervals()) unobs += tchi_int(iv.lo, iv.hi);
  const double x = co.a * (1.0 - y) + co.b * obs + co.c * unobs;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

TEST_CASE("logistic completeness probability matches the closed form") {
  const TimeGrid grid(1001);
  const PatternCatalog catalog = simulation_catalog(5, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::nmar;
  mech.coef = {{2, 0.01, 0.8}, {2, 0.01, 0.4}, {2, 0.01, 0.3}, {2, 0.01, 0.3}};

  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const double A = rng.uniform(-2, 8), B = rng.uniform(-1, 2);
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const int k = rng.uniform_int(2, 5);
    const MissingPattern& s = catalog.at(k);
    const auto comp = s.complement(grid);
    const double expected =
        oracle_complete_prob(mech.coef[static_cast<std::size_t>(k - 2)], s,
                             comp ? &*comp : nullptr, A, B, y);
    const double got = complete_probability(mech, catalog, grid, A, B, y, k);
    CHECK(std::fabs(got - expected) <= 1e-12);
  }
}

TEST_CASE("logistic saturation and the zero-coefficient case") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::nmar;
  mech.coef = {{50, 0, 0}, {50, 0, 0}};
  CHECK(complete_probability(mech, catalog, grid, 1.0, 0.5, 0, 2) > 1.0 - 1e-10);

  mech.coef = {{0, 0, 0}, {0, 0, 0}};
  CHECK(complete_probability(mech, catalog, grid, 3.0, 0.7, 1, 2) == 0.5);
  CHECK(complete_probability(mech, catalog, grid, 3.0, 0.7, 0, 3) == 0.5);
}

TEST_CASE("pattern probabilities sum to one") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::nmar;
  mech.coef = {{-5, -0.4, 0.25}, {-4, -0.5, -0.15}};
  for (const double A : {0.5, 4.0}) {
    for (const int y : {0, 1}) {
      double total = 0.0;
      for (int k = 1; k <= 3; ++k)
        total += detail::delta_probability(mech, catalog, grid, A, 0.5, y, k);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("mcar long-run complete rate") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::mcar;
  mech.mcar_complete_rate = 0.7;
  Rng rng(5);
  int complete = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    complete += gen_draw(CurveModel{}, mech, catalog, grid, rng).delta == 1;
  CHECK(std::fabs(static_cast<double>(complete) / draws - 0.7) <= 0.02);
}

TEST_CASE("class-conditional coefficient moments") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(2, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::mcar;
  mech.mcar_complete_rate = 0.5;
  Rng rng(6);
  double sum_a1 = 0.0;
  int n1 = 0;
  for (int i = 0; i < 10000; ++i) {
    const GeneratedDraw d = gen_draw(CurveModel{}, mech, catalog, grid, rng);
    if (d.label == 1) {
      sum_a1 += d.a;
      ++n1;
    }
  }
  CHECK(n1 > 4000);
  CHECK(std::fabs(sum_a1 / n1 - 5.0) <= 0.1);
}

TEST_CASE("generated curves satisfy the quadratic law exactly at observed nodes") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::nmar;
  mech.coef = {{0, 0.95, 0.13}, {0, 0.9, 1}};
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const GeneratedDraw d = gen_draw(CurveModel{}, mech, catalog, grid, rng);
    const ObservedCurve c = make_curve(d, catalog, grid, "x");
    CHECK(c.pattern_index == d.delta);
    CHECK(1 <= d.delta);
    CHECK(d.delta <= 3);
    for (int i = 0; i < grid.points(); ++i)
      if (c.observed_at(i)) {
        const double t = grid.node(i);
        CHECK(c.values[static_cast<std::size_t>(i)] == d.a * (t - 0.5) * (t - 0.5) + d.b);
      }
  }
}

TEST_CASE("datasets are deterministic per seed, byte for byte") {
  const TimeGrid grid(201);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::mcar;
  mech.mcar_complete_rate = 0.7;
  const Dataset d1 = gen_dataset(25, CurveModel{}, mech, catalog, grid, 99);
  const Dataset d2 = gen_dataset(25, CurveModel{}, mech, catalog, grid, 99);
  std::ostringstream s1, s2;
  write_dataset(s1, d1);
  write_dataset(s2, d2);
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().find("id,t,value,label") == 0);

  CHECK_THROWS_AS(gen_dataset(0, CurveModel{}, mech, catalog, grid, 1), std::invalid_argument);
}

TEST_CASE("oracle recovers coefficients exactly and uses support boundaries") {
  const TimeGrid grid(1001);
  const PatternCatalog catalog = simulation_catalog(3, grid);
  MissingMechanism mech;
  mech.kind = MechanismKind::mcar;
  mech.mcar_complete_rate = 0.7;

  SUBCASE("coefficient B outside the class-0 box forces class 1") {
    // B = 2.5 cannot come from Unif(0,1); the normal class-1 law allows it
    GeneratedDraw d{3.0, 2.5, 1, 1};
    const ObservedCurve c = make_curve(d, catalog, grid, "q");
    CHECK(bayes_oracle_sim(CurveModel{}, mech, catalog, grid, c) == 1);

    GeneratedDraw frag{3.0, 2.5, 1, 2};
    CHECK(bayes_oracle_sim(CurveModel{}, mech, catalog, grid, make_curve(frag, catalog, grid, "f")) == 1);
  }

  SUBCASE("an exact tie resolves to class 0 by the strict rule") {
    CurveModel no_class1 = CurveModel{};
    no_class1.prior_class1 = 0.0;  // weight of class 1 is exactly zero
    GeneratedDraw d{3.0, 2.5, 0, 1};  // and B = 2.5 zeroes the class-0 density
    const ObservedCurve c = make_curve(d, catalog, grid, "tie");
    CHECK(bayes_oracle_sim(no_class1, mech, catalog, grid, c) == 0);
  }

  SUBCASE("fragments with fewer than 3 observed nodes are rejected") {
    ObservedCurve tiny{grid,
                       std::vector<double>(static_cast<std::size_t>(grid.points()),
                                           std::numeric_limits<double>::quiet_NaN()),
                       1, 1, "tiny"};
    tiny.values[0] = 1.0;
    tiny.values[1] = 1.1;
    CHECK_THROWS_AS(bayes_oracle_sim(CurveModel{}, mech, catalog, grid, tiny),
                    std::invalid_argument);
  }

  SUBCASE("the oracle classifies deep class-1 and class-0 regions correctly") {
    // (A, B) in the middle of the class-0 box where the uniform density wins
    GeneratedDraw mid{2.5, 0.5, 0, 2};
    CHECK(bayes_oracle_sim(CurveModel{}, mech, catalog, grid, make_curve(mid, catalog, grid, "m")) == 0);
    // far outside the box
    GeneratedDraw out{9.0, 1.8, 1, 3};
    CHECK(bayes_oracle_sim(CurveModel{}, mech, catalog, grid, make_curve(out, catalog, grid, "o")) == 1);
  }
}

TEST_CASE("mechanism validation") {
  MissingMechanism mar;
  mar.kind = MechanismKind::mar;
  mar.coef = {{1, 2, 0.5}, {1, 2, 0}};
  CHECK_THROWS_AS(mar.validate(3), std::invalid_argument);  // nonzero c under mar
  mar.coef = {{1, 2, 0}, {1, 2, 0}};
  CHECK_NOTHROW(mar.validate(3));
  CHECK_THROWS_AS(mar.validate(4), std::invalid_argument);  // wrong coefficient count

  MissingMechanism mcar;
  mcar.kind = MechanismKind::mcar;
  mcar.mcar_complete_rate = 1.0;
  CHECK_THROWS_AS(mcar.validate(3), std::invalid_argument);
}
