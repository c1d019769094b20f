#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "fragclass/curve.hpp"
#include "fragclass/pattern.hpp"
#include "fragclass/quadrature.hpp"
#include "fragclass/rng.hpp"

namespace fragclass {

/// Generative curve law: chi(t) = A (t - 0.5)^2 + B, with class-conditional
/// coefficient distributions and a Bernoulli class prior.
struct CurveModel {
  double prior_class1 = 0.5;
  // class 1: A ~ Normal, B ~ Normal
  double a1_mean = 5.0, a1_sd = 2.0;
  double b1_mean = 1.0, b1_sd = 0.5;
  // class 0: A ~ Uniform, B ~ Uniform
  double a0_lo = 0.0, a0_hi = 5.0;
  double b0_lo = 0.0, b0_hi = 1.0;
};

enum class MechanismKind { none, nmar, mar, mcar };

inline std::string to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::none: return "none";
    case MechanismKind::nmar: return "nmar";
    case MechanismKind::mar: return "mar";
    case MechanismKind::mcar: return "mcar";
  }
  return "?";
}

inline MechanismKind mechanism_from_string(const std::string& s) {
  if (s == "none") return MechanismKind::none;
  if (s == "nmar") return MechanismKind::nmar;
  if (s == "mar") return MechanismKind::mar;
  if (s == "mcar") return MechanismKind::mcar;
  throw std::invalid_argument("unknown missingness mechanism '" + s + "'");
}

/// Missingness law. For nmar/mar a candidate fragment window is drawn
/// uniformly among patterns 2..M and the curve stays complete with the
/// logistic probability below; mar restricts the coefficients so the
/// probability depends only on what would remain observed (all c = 0).
/// For mcar the curve is complete with a flat rate, else the candidate
/// window is kept.
struct MissingMechanism {
  struct Coef {
    double a = 0.0, b = 0.0, c = 0.0;
  };

  MechanismKind kind = MechanismKind::none;
  std::vector<Coef> coef;  // coef[k-2] belongs to pattern k, k = 2..M
  double mcar_complete_rate = 0.7;

  void validate(int n_patterns) const {
    switch (kind) {
      case MechanismKind::none:
        return;
      case MechanismKind::mcar:
        if (!(mcar_complete_rate > 0.0 && mcar_complete_rate < 1.0))
          throw std::invalid_argument("MissingMechanism: mcar rate must be in (0,1)");
        if (n_patterns < 2)
          throw std::invalid_argument("MissingMechanism: mcar needs at least 2 patterns");
        return;
      case MechanismKind::mar:
        for (const Coef& c : coef)
          if (c.c != 0.0)
            throw std::invalid_argument("MissingMechanism: mar requires all c coefficients zero");
        [[fallthrough]];
      case MechanismKind::nmar:
        if (n_patterns < 2)
          throw std::invalid_argument("MissingMechanism: need at least 2 patterns");
        if (static_cast<int>(coef.size()) != n_patterns - 1)
          throw std::invalid_argument("MissingMechanism: need coefficients for patterns 2.." +
                                      std::to_string(n_patterns));
        return;
    }
  }
};

/// One latent draw from the generator, before masking.
struct GeneratedDraw {
  double a = 0.0, b = 0.0;
  int label = 0;
  int delta = 1;  // realized pattern index
};

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<double> curve_values(const TimeGrid& grid, double a, double b) {
  std::vector<double> v(static_cast<std::size_t>(grid.points()));
  for (int i = 0; i < grid.points(); ++i) {
    const double t = grid.node(i);
    v[static_cast<std::size_t>(i)] = a * (t - 0.5) * (t - 0.5) + b;
  }
  return v;
}

}  // namespace detail

/// P(curve stays complete | Y = y, curve, candidate window k):
/// logistic of a_k (1-y) + b_k * integral of chi over s_k
///              + c_k * integral of t*chi(t) over the unobserved remainder.
inline double complete_probability(const MissingMechanism& mech, const PatternCatalog& catalog,
                                   const TimeGrid& grid, double a, double b, int y,
                                   int candidate_k) {
  if (mech.kind == MechanismKind::none) return 1.0;
  if (mech.kind == MechanismKind::mcar) return mech.mcar_complete_rate;
  if (candidate_k < 2 || candidate_k > catalog.size())
    throw std::invalid_argument("complete_probability: candidate pattern out of range");
  const MissingMechanism::Coef& co = mech.coef[static_cast<std::size_t>(candidate_k - 2)];
  const MissingPattern& s = catalog.at(candidate_k);
  auto chi = [&](double t) { return a * (t - 0.5) * (t - 0.5) + b; };
  const double obs = quad_integral_fn(chi, grid, s);
  double unobs = 0.0;
  if (auto comp = s.complement(grid))
    unobs = quad_integral_fn([&](double t) { return t * chi(t); }, grid, *comp);
  return detail::logistic(co.a * (1.0 - y) + co.b * obs + co.c * unobs);
}

inline GeneratedDraw gen_draw(const CurveModel& model, const MissingMechanism& mech,
                              const PatternCatalog& catalog, const TimeGrid& grid, Rng& rng) {
  mech.validate(catalog.size());
  GeneratedDraw d;
  d.label = rng.bernoulli(model.prior_class1) ? 1 : 0;
  if (d.label == 1) {
    d.a = rng.normal(model.a1_mean, model.a1_sd);
    d.b = rng.normal(model.b1_mean, model.b1_sd);
  } else {
    d.a = rng.uniform(model.a0_lo, model.a0_hi);
    d.b = rng.uniform(model.b0_lo, model.b0_hi);
  }
  switch (mech.kind) {
    case MechanismKind::none:
      d.delta = 1;
      break;
    case MechanismKind::mcar: {
      if (rng.bernoulli(mech.mcar_complete_rate))
        d.delta = 1;
      else
        d.delta = rng.uniform_int(2, catalog.size());
      break;
    }
    case MechanismKind::nmar:
    case MechanismKind::mar: {
      const int candidate = rng.uniform_int(2, catalog.size());
      const double p = complete_probability(mech, catalog, grid, d.a, d.b, d.label, candidate);
      d.delta = rng.bernoulli(p) ? 1 : candidate;
      break;
    }
  }
  return d;
}

/// Materialize a draw as an observed curve (values masked outside delta's
/// window), or as the unrestricted complete curve when as_complete is set.
inline ObservedCurve make_curve(const GeneratedDraw& d, const PatternCatalog& catalog,
                                const TimeGrid& grid, std::string id, bool as_complete = false) {
  const int k = as_complete ? 1 : d.delta;
  return restrict_to_pattern(grid, detail::curve_values(grid, d.a, d.b), catalog.at(k), k, d.label,
                             std::move(id));
}

inline ObservedCurve gen_example(const CurveModel& model, const MissingMechanism& mech,
                                 const PatternCatalog& catalog, const TimeGrid& grid, Rng& rng,
                                 std::string id = {}) {
  return make_curve(gen_draw(model, mech, catalog, grid, rng), catalog, grid, std::move(id));
}

inline Dataset gen_dataset(int n, const CurveModel& model, const MissingMechanism& mech,
                           const PatternCatalog& catalog, const TimeGrid& grid,
                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_dataset: need n >= 1");
  Rng rng(seed);
  Dataset out{grid, catalog, {}};
  out.curves.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.curves.push_back(gen_example(model, mech, catalog, grid, rng, std::to_string(i + 1)));
  return out;
}

namespace detail {

inline double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double uniform_pdf(double x, double lo, double hi) {
  return (x >= lo && x <= hi) ? 1.0 / (hi - lo) : 0.0;
}

/// Exact (A, B) recovery from a noise-free quadratic fragment, using the
/// first, middle, and last observed nodes. Nodes mirrored around t = 0.5
/// share the same (t-0.5)^2, so the pair with the widest spread in that
/// value is used.
inline std::pair<double, double> recover_coefficients(const ObservedCurve& curve) {
  std::vector<int> obs;
  for (int i = 0; i < curve.grid.points(); ++i)
    if (curve.observed_at(i)) obs.push_back(i);
  if (obs.size() < 3)
    throw std::invalid_argument("bayes_oracle_sim: fragment with fewer than 3 observed nodes");
  const int picks[3] = {obs.front(), obs[obs.size() / 2], obs.back()};
  int bi = 0, bj = 1;
  double best = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double ui = std::pow(curve.grid.node(picks[i]) - 0.5, 2);
      const double uj = std::pow(curve.grid.node(picks[j]) - 0.5, 2);
      if (std::fabs(ui - uj) > best) {
        best = std::fabs(ui - uj);
        bi = picks[i];
        bj = picks[j];
      }
    }
  const double ui = std::pow(curve.grid.node(bi) - 0.5, 2);
  const double uj = std::pow(curve.grid.node(bj) - 0.5, 2);
  if (best <= 0.0)
    throw std::invalid_argument("bayes_oracle_sim: degenerate node choice for recovery");
  const double vi = curve.values[static_cast<std::size_t>(bi)];
  const double vj = curve.values[static_cast<std::size_t>(bj)];
  const double a = (vi - vj) / (ui - uj);
  const double b = vi - a * ui;
  return {a, b};
}

/// P(delta = k | A, B, Y = y) under the mechanism.
inline double delta_probability(const MissingMechanism& mech, const PatternCatalog& catalog,
                                const TimeGrid& grid, double a, double b, int y, int k) {
  const int M = catalog.size();
  switch (mech.kind) {
    case MechanismKind::none:
      return k == 1 ? 1.0 : 0.0;
    case MechanismKind::mcar:
      return k == 1 ? mech.mcar_complete_rate : (1.0 - mech.mcar_complete_rate) / (M - 1);
    case MechanismKind::nmar:
    case MechanismKind::mar: {
      if (k == 1) {
        double p = 0.0;
        for (int j = 2; j <= M; ++j)
          p += complete_probability(mech, catalog, grid, a, b, y, j);
        return p / (M - 1);
      }
      return (1.0 - complete_probability(mech, catalog, grid, a, b, y, k)) / (M - 1);
    }
  }
  return 0.0;
}

}  // namespace detail

/// Optimal classification of a generated fragment. The quadratic curve law
/// makes the coefficient pair recoverable exactly, so the conditional vote
///
///   phi_k = sum over y of (2y-1) P(delta=k | A,B,y) f_y(A,B) P(Y=y)
///
/// reduces to comparing the two class-weighted terms at the recovered point;
/// the fragment is assigned class 1 only when the vote is strictly positive.
inline int bayes_oracle_sim(const CurveModel& model, const MissingMechanism& mech,
                            const PatternCatalog& catalog, const TimeGrid& grid,
                            const ObservedCurve& fragment) {
  mech.validate(catalog.size());
  const int k = fragment.pattern_index;
  if (k < 1 || k > catalog.size())
    throw std::invalid_argument("bayes_oracle_sim: fragment pattern not in catalog");
  const auto [a, b] = detail::recover_coefficients(fragment);
  const double f1 = detail::normal_pdf(a, model.a1_mean, model.a1_sd) *
                    detail::normal_pdf(b, model.b1_mean, model.b1_sd);
  const double f0 = detail::uniform_pdf(a, model.a0_lo, model.a0_hi) *
                    detail::uniform_pdf(b, model.b0_lo, model.b0_hi);
  const double w1 = detail::delta_probability(mech, catalog, grid, a, b, 1, k) * f1 *
                    model.prior_class1;
  const double w0 = detail::delta_probability(mech, catalog, grid, a, b, 0, k) * f0 *
                    (1.0 - model.prior_class1);
  return (w1 - w0) > 0.0 ? 1 : 0;
}

}  // namespace fragclass
