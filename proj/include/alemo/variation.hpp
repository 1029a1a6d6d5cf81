#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/pareto.hpp"
#include "alemo/rng.hpp"

namespace alemo {

/// Knobs for the differential-evolution style variation operators.
/// pm < 0 is a sentinel meaning "1/dimension", resolved at call time.
struct VariationParams {
  double mu = 0.5;     // DE scale factor
  double cr = 0.8;     // crossover rate
  double eta_m = 20.0; // polynomial mutation distribution index
  double pm = -1.0;    // per-gene mutation probability; <0 -> 1/d

  double resolved_pm(std::size_t d) const {
    if (pm >= 0.0) return pm;
    return 1.0 / static_cast<double>(d);
  }
};

/// v = x_rI + Mu * (x_rI - x_rII): pushes a promising point away from a less
/// promising one.
inline DecisionVector rank_based_mutation(const DecisionVector& x_r1, const DecisionVector& x_r2,
                                          double mu) {
  if (x_r1.size() != x_r2.size()) throw std::invalid_argument("rank_based_mutation: length mismatch");
  DecisionVector v(x_r1.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = x_r1[j] + mu * (x_r1[j] - x_r2[j]);
  return v;
}

/// v = x_best + Mu * (x_r1 - x_r2), classic DE/best/1 mutant.
inline DecisionVector de_best_mutation(const DecisionVector& x_best, const DecisionVector& x_r1,
                                       const DecisionVector& x_r2, double mu) {
  if (x_best.size() != x_r1.size() || x_r1.size() != x_r2.size())
    throw std::invalid_argument("de_best_mutation: length mismatch");
  DecisionVector v(x_best.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = x_best[j] + mu * (x_r1[j] - x_r2[j]);
  return v;
}

/// Binomial crossover of target x and mutant v. One gene index j_rand is drawn
/// first and always taken from the mutant; every other gene takes the mutant
/// value with probability cr. Draw order (j_rand, then per-gene uniforms in
/// index order) is part of the reproducibility contract.
inline DecisionVector binomial_crossover(const DecisionVector& x, const DecisionVector& v, double cr,
                                         RandomStream& rng) {
  if (x.size() != v.size()) throw std::invalid_argument("binomial_crossover: length mismatch");
  if (x.empty()) throw std::invalid_argument("binomial_crossover: empty vectors");
  const std::size_t j_rand = rng.uniform_index(x.size());
  DecisionVector u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = rng.uniform();
    u[j] = (r < cr || j == j_rand) ? v[j] : x[j];
  }
  return u;
}

/// Standard polynomial mutation with distribution index eta_m; the input must
/// already lie inside the bounds. Genes with a degenerate range are skipped.
inline DecisionVector polynomial_mutation(const DecisionVector& x, const BoxBounds& bounds,
                                          double pm, double eta_m, RandomStream& rng) {
  if (x.size() != bounds.dimension()) throw std::invalid_argument("polynomial_mutation: length mismatch");
  DecisionVector y = x;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double lo = bounds.lb[j];
    const double hi = bounds.ub[j];
    if (x[j] < lo || x[j] > hi) throw std::invalid_argument("polynomial_mutation: input out of bounds");
    if (rng.uniform() >= pm) continue;
    const double range = hi - lo;
    if (range <= 0.0) continue;
    const double u = rng.uniform();
    const double d1 = (x[j] - lo) / range;
    const double d2 = (hi - x[j]) / range;
    const double mpow = 1.0 / (eta_m + 1.0);
    double delta;
    if (u < 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta_m + 1.0);
      delta = std::pow(val, mpow) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
      delta = 1.0 - std::pow(val, mpow);
    }
    y[j] = std::min(hi, std::max(lo, x[j] + delta * range));
  }
  return y;
}

/// DE survivor selection for the single- or multi-objective trial/target pair:
/// the trial replaces the target only when strictly better (one objective) or
/// dominating (several). Ties keep the target.
inline bool de_selection(const ObjectiveVector& target_f, const ObjectiveVector& trial_f) {
  if (target_f.size() != trial_f.size()) throw std::invalid_argument("de_selection: length mismatch");
  if (target_f.size() == 1) return trial_f[0] < target_f[0];
  return dominates(trial_f, target_f);
}

}  // namespace alemo
