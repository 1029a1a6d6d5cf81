#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/metrics.hpp"
#include "alemo/pareto.hpp"
#include "alemo/rng.hpp"
#include "alemo/surrogate.hpp"
#include "alemo/variation.hpp"

namespace alemo {

struct AttentionSubspace {
  BoxBounds box;
  std::size_t tau = 0;
};

/// Bounding box of the tau most promising archive members (rank, then
/// crowding), clipped to the problem box. Collapsed dimensions are widened by
/// 1e-6 of the problem span so downstream normalization stays well defined.
inline AttentionSubspace identify_subspace(const std::vector<EvaluatedSample>& archive,
                                           std::size_t tau, const BoxBounds& problem_bounds) {
  if (archive.size() < tau) throw std::invalid_argument("identify_subspace: archive smaller than tau");
  if (tau == 0) throw std::invalid_argument("identify_subspace: tau must be positive");
  const std::vector<EvaluatedSample> promising = select_top(non_dominated_sort(archive), tau);
  const std::size_t d = problem_bounds.dimension();
  DecisionVector lo(d, std::numeric_limits<double>::infinity());
  DecisionVector hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& s : promising) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], s.x[j]);
      hi[j] = std::max(hi[j], s.x[j]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = std::max(lo[j], problem_bounds.lb[j]);
    hi[j] = std::min(hi[j], problem_bounds.ub[j]);
    if (hi[j] <= lo[j]) {
      const double eps = 1e-6 * (problem_bounds.ub[j] - problem_bounds.lb[j]);
      lo[j] = std::max(problem_bounds.lb[j], lo[j] - eps);
      hi[j] = std::min(problem_bounds.ub[j], hi[j] + eps);
    }
  }
  return AttentionSubspace{BoxBounds(lo, hi), tau};
}

/// Subspace box inflated by 5% of its span on each side (clipped to the
/// problem box); used to gather surrogate training samples so boundary points
/// just outside the tight box still contribute.
inline BoxBounds inflate_box(const BoxBounds& box, const BoxBounds& problem_bounds,
                             double fraction = 0.05) {
  const std::size_t d = box.dimension();
  DecisionVector lo(d), hi(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double pad = fraction * (box.ub[j] - box.lb[j]);
    lo[j] = std::max(problem_bounds.lb[j], box.lb[j] - pad);
    hi[j] = std::min(problem_bounds.ub[j], box.ub[j] + pad);
  }
  return BoxBounds(lo, hi);
}

/// One point of the surrogate-only Pareto search: decision vector plus its
/// predicted objective vector.
struct PredictedPoint {
  DecisionVector x;
  ObjectiveVector f;
};

/// NSGA-II-style search driven purely by the fitted surrogates — no true
/// evaluations. The initial population starts from `seeds` (clamped to the
/// box, truncated or padded with uniform draws to `pop_size`); offspring come
/// from DE/best/1 mutation, binomial crossover, and polynomial mutation inside
/// the box. Returns the final population's non-dominated subset with predicted
/// objectives.
inline std::vector<PredictedPoint> surrogate_pareto_search(
    const std::vector<RbfModel>& models, const BoxBounds& box,
    const std::vector<DecisionVector>& seeds, std::size_t pop_size, std::size_t generations,
    const VariationParams& params, RandomStream& rng) {
  if (models.empty()) throw std::invalid_argument("surrogate_pareto_search: no models");
  if (pop_size < 2) throw std::invalid_argument("surrogate_pareto_search: pop_size must be >= 2");
  const std::size_t d = box.dimension();
  const std::size_t m = models.size();
  const double pm = params.resolved_pm(d);

  std::vector<DecisionVector> pop_x;
  pop_x.reserve(pop_size);
  for (const auto& s : seeds) {
    if (pop_x.size() == pop_size) break;
    pop_x.push_back(clamp_to_bounds(s, box));
  }
  while (pop_x.size() < pop_size) {
    DecisionVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(box.lb[j], box.ub[j]);
    pop_x.push_back(std::move(x));
  }

  auto predict_all = [&](const std::vector<DecisionVector>& xs) {
    std::vector<ObjectiveVector> fs(xs.size(), ObjectiveVector(m));
    for (std::size_t k = 0; k < m; ++k) {
      const std::vector<double> yk = models[k].predict_batch(xs);
      for (std::size_t i = 0; i < xs.size(); ++i) fs[i][k] = yk[i];
    }
    return fs;
  };

  std::vector<EvaluatedSample> pop(pop_size);
  {
    const std::vector<ObjectiveVector> fs = predict_all(pop_x);
    for (std::size_t i = 0; i < pop_size; ++i)
      pop[i] = EvaluatedSample{pop_x[i], fs[i], static_cast<long>(i + 1)};
  }
  long inner_index = static_cast<long>(pop_size);

  for (std::size_t gen = 0; gen < generations; ++gen) {
    const RankedPopulation ranked = non_dominated_sort(pop);
    auto better = [&](std::size_t a, std::size_t b) {
      const RankedMember& ma = ranked.members[a];
      const RankedMember& mb = ranked.members[b];
      if (ma.rank != mb.rank) return ma.rank < mb.rank ? a : b;
      if (ma.crowding != mb.crowding) return ma.crowding > mb.crowding ? a : b;
      return a;
    };
    std::vector<DecisionVector> off_x;
    off_x.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) {
      const std::size_t best = better(rng.uniform_index(pop_size), rng.uniform_index(pop_size));
      const std::size_t r1 = rng.uniform_index(pop_size);
      std::size_t r2 = rng.uniform_index(pop_size);
      while (pop_size > 1 && r2 == r1) r2 = rng.uniform_index(pop_size);
      DecisionVector v = de_best_mutation(pop[best].x, pop[r1].x, pop[r2].x, params.mu);
      DecisionVector u = binomial_crossover(pop[i].x, v, params.cr, rng);
      u = clamp_to_bounds(u, box);
      u = polynomial_mutation(u, box, pm, params.eta_m, rng);
      off_x.push_back(std::move(u));
    }
    const std::vector<ObjectiveVector> off_f = predict_all(off_x);
    std::vector<EvaluatedSample> combined = pop;
    for (std::size_t i = 0; i < pop_size; ++i)
      combined.push_back(EvaluatedSample{off_x[i], off_f[i], ++inner_index});
    pop = select_top(non_dominated_sort(combined), pop_size);
  }

  std::vector<PredictedPoint> out;
  for (auto& s : pareto_front(pop)) out.push_back(PredictedPoint{std::move(s.x), std::move(s.f)});
  return out;
}

/// Pick the candidate whose PREDICTED objectives add the most hypervolume over
/// the archive's true front. Candidates that coincide with an archived point
/// (within 1e-9 in normalized coordinates) are excluded; if everything is a
/// duplicate, return the candidate farthest from the archive instead.
inline DecisionVector select_hv_infill(const std::vector<PredictedPoint>& candidates,
                                       const std::vector<ObjectiveVector>& archive_front,
                                       const ObjectiveVector& z,
                                       const std::vector<EvaluatedSample>& archive,
                                       const BoxBounds& problem_bounds) {
  if (candidates.empty()) throw std::invalid_argument("select_hv_infill: no candidates");

  std::vector<DecisionVector> archive_norm;
  archive_norm.reserve(archive.size());
  for (const auto& s : archive) archive_norm.push_back(problem_bounds.normalize(s.x));

  auto min_dist = [&](const DecisionVector& x) {
    const DecisionVector xn = problem_bounds.normalize(x);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& an : archive_norm) {
      double s = 0.0;
      for (std::size_t j = 0; j < xn.size(); ++j) {
        const double dv = xn[j] - an[j];
        s += dv * dv;
      }
      best = std::min(best, s);
    }
    return std::sqrt(best);
  };

  double best_hvi = -1.0;
  const PredictedPoint* best = nullptr;
  double best_dist = -1.0;
  const PredictedPoint* farthest = nullptr;
  for (const auto& c : candidates) {
    const double dist = min_dist(c.x);
    if (dist > best_dist) {
      best_dist = dist;
      farthest = &c;
    }
    if (dist <= 1e-9) continue;  // already archived
    const double hvi = hv_improvement(archive_front, c.f, z);
    if (hvi > best_hvi) {
      best_hvi = hvi;
      best = &c;
    }
  }
  if (best != nullptr) return best->x;
  return farthest->x;
}

}  // namespace alemo
