#include <doctest.h>

#include <cmath>
#include <vector>

#include "fragclass/quadrature.hpp"
#include "fragclass/rng.hpp"

using namespace fragclass;

namespace {

std::vector<double> sample(const TimeGrid& grid, double (*f)(double)) {
  std::vector<double> v(static_cast<std::size_t>(grid.points()));
  for (int i = 0; i < grid.points(); ++i) v[static_cast<std::size_t>(i)] = f(grid.node(i));
  return v;
}

// symbolic integral of c3 t^3 + c2 t^2 + c1 t + c0 over [lo, hi]
double cubic_integral(double c3, double c2, double c1, double c0, double lo, double hi) {
  auto F = [&](double t) {
    return c3 * t * t * t * t / 4.0 + c2 * t * t * t / 3.0 + c1 * t * t / 2.0 + c0 * t;
  };
  return F(hi) - F(lo);
}

}  // namespace

TEST_CASE("constant integrates to the pattern measure") {
  const TimeGrid grid(1001);
  const auto ones = sample(grid, [](double) { return 1.0; });
  CHECK(quad_integral(ones, grid, MissingPattern::full(grid)) == doctest::Approx(1.0).epsilon(1e-15));

  const MissingPattern frag({{0.0, 0.3}, {0.5, 1.0}}, grid);
  CHECK(quad_integral(ones, grid, frag) == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("simpson is exact for quadratics") {
  const TimeGrid grid(1001);
  const auto f = sample(grid, [](double t) { return (t - 0.5) * (t - 0.5); });
  CHECK(quad_integral(f, grid, MissingPattern::full(grid)) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-14));
}

TEST_CASE("cubics match the symbolic antiderivative to 1e-12 relative") {
  const TimeGrid grid(1001);
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const double c3 = rng.uniform(-4, 4), c2 = rng.uniform(-4, 4), c1 = rng.uniform(-4, 4),
                 c0 = rng.uniform(-4, 4);
    std::vector<double> v(static_cast<std::size_t>(grid.points()));
    for (int i = 0; i < grid.points(); ++i) {
      const double t = grid.node(i);
      v[static_cast<std::size_t>(i)] = c3 * t * t * t + c2 * t * t + c1 * t + c0;
    }
    SUBCASE("") {}
    const MissingPattern frag({{0.0, 0.1}, {0.2, 0.45}, {0.6, 0.85}, {0.9, 1.0}}, grid);
    for (const auto& pattern : {MissingPattern::full(grid), frag}) {
      double exact = 0.0;
      for (const Interval& iv : pattern.intervals())
        exact += cubic_integral(c3, c2, c1, c0, iv.lo, iv.hi);
      const double got = quad_integral(v, grid, pattern);
      CHECK(std::fabs(got - exact) <= 1e-12 * std::max(1.0, std::fabs(exact)));
    }
  }
}

TEST_CASE("quadrature is linear") {
  const TimeGrid grid(201);
  Rng rng(11);
  std::vector<double> f(static_cast<std::size_t>(grid.points())),
      g(static_cast<std::size_t>(grid.points()));
  for (auto& x : f) x = rng.uniform(-1, 1);
  for (auto& x : g) x = rng.uniform(-1, 1);
  const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
  std::vector<double> combo(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) combo[i] = a * f[i] + b * g[i];

  const MissingPattern pattern({{0.0, 0.3}, {0.5, 1.0}}, grid);
  const double lhs = quad_integral(combo, grid, pattern);
  const double rhs = a * quad_integral(f, grid, pattern) + b * quad_integral(g, grid, pattern);
  CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
}

TEST_CASE("misaligned or too-short intervals are rejected") {
  const TimeGrid grid(101);
  CHECK_THROWS_AS(MissingPattern({{0.0, 0.015}}, grid), std::invalid_argument);  // misaligned
  CHECK_THROWS_AS(MissingPattern({{0.0, 0.01}}, grid), std::invalid_argument);   // 2 nodes
  CHECK_THROWS_AS(MissingPattern({{0.0, 0.03}}, grid), std::invalid_argument);   // odd cells
  CHECK_NOTHROW(MissingPattern({{0.0, 0.02}}, grid));
}

TEST_CASE("value buffer must match the grid") {
  const TimeGrid grid(101);
  std::vector<double> wrong(50, 1.0);
  CHECK_THROWS_AS(quad_integral(wrong, grid, MissingPattern::full(grid)), std::invalid_argument);
}
