#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "alemo/classifier.hpp"
#include "alemo/core.hpp"
#include "alemo/metrics.hpp"
#include "alemo/pareto.hpp"
#include "alemo/rng.hpp"
#include "alemo/sampling.hpp"
#include "alemo/subspace.hpp"
#include "alemo/surrogate.hpp"
#include "alemo/variation.hpp"

namespace alemo {

enum class Phase { init, explore, exploit };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::init: return "init";
    case Phase::explore: return "explore";
    default: return "exploit";
  }
}

struct AlemoConfig {
  std::size_t np = 50;            // population size
  std::size_t budget = 300;       // max true evaluations
  std::size_t initial_size = 0;   // 0 -> default_initial_size(d)
  std::size_t tau = 0;            // subspace size; 0 -> np
  std::size_t offspring_pool = 0; // candidates per exploration phase; 0 -> np
  std::size_t inner_pop = 50;     // surrogate-search population
  std::size_t inner_generations = 50;
  VariationParams variation{};
  LabelMode label_mode = LabelMode::ranks;
  PnnConfig pnn{};
  // Mean-centred surrogates: far from the training data the prediction reverts
  // to the sample mean instead of zero, so the inner search cannot chase
  // phantom optima in unsampled corners of the subspace box.
  RbfConfig rbf{.center_mean = true};
  std::uint64_t seed = 1;

  std::size_t resolved_tau() const { return tau == 0 ? np : tau; }
  std::size_t resolved_pool() const { return offspring_pool == 0 ? np : offspring_pool; }
  std::size_t resolved_initial(std::size_t d) const {
    return initial_size == 0 ? default_initial_size(d) : initial_size;
  }
};

struct TraceRecord {
  long eval_index = 0;  // 1-based
  DecisionVector x;
  ObjectiveVector f;
  Phase phase = Phase::init;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<EvaluatedSample> final_front;  // rank-1 of the full archive
  // Filled by the harness when a reference point (and optionally a reference
  // front) is known; empty otherwise.
  std::vector<double> hv_history;
  std::vector<double> igd_history;
};

/// Most-uncertain offspring under the discriminator: among those predicted
/// C-I, the one with the largest minimum normalized distance to the archive.
/// If no offspring lands in C-I the chain falls back to C-II, then to the
/// globally most distant offspring. Returns an index into `offspring`.
inline std::size_t select_uncertain_offspring_index(const std::vector<DecisionVector>& offspring,
                                                    const PnnClassifier& pnn,
                                                    const std::vector<EvaluatedSample>& archive,
                                                    const BoxBounds& bounds) {
  if (offspring.empty()) throw std::invalid_argument("select_uncertain_offspring: empty offspring");

  std::vector<DecisionVector> archive_norm;
  archive_norm.reserve(archive.size());
  for (const auto& s : archive) archive_norm.push_back(bounds.normalize(s.x));

  std::vector<double> g(offspring.size());
  std::vector<ClassLabel> label(offspring.size());
  for (std::size_t i = 0; i < offspring.size(); ++i) {
    label[i] = pnn.predict(offspring[i]);
    const DecisionVector xn = bounds.normalize(offspring[i]);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& an : archive_norm) {
      double s = 0.0;
      for (std::size_t j = 0; j < xn.size(); ++j) {
        const double d = xn[j] - an[j];
        s += d * d;
      }
      best = std::min(best, s);
    }
    g[i] = std::sqrt(best);
  }

  auto argmax_in = [&](ClassLabel want, bool any) {
    std::size_t best = offspring.size();
    for (std::size_t i = 0; i < offspring.size(); ++i) {
      if (!any && label[i] != want) continue;
      if (best == offspring.size() || g[i] > g[best]) best = i;
    }
    return best;
  };
  std::size_t pick = argmax_in(ClassLabel::CI, false);
  if (pick == offspring.size()) pick = argmax_in(ClassLabel::CII, false);
  if (pick == offspring.size()) pick = argmax_in(ClassLabel::CI, true);
  return pick;
}

inline DecisionVector select_uncertain_offspring(const std::vector<DecisionVector>& offspring,
                                                 const PnnClassifier& pnn,
                                                 const std::vector<EvaluatedSample>& archive,
                                                 const BoxBounds& bounds) {
  return offspring[select_uncertain_offspring_index(offspring, pnn, archive, bounds)];
}

namespace detail {

inline void record_eval(Archive& archive, RunTrace& trace, const DecisionVector& x,
                        const ObjectiveVector& f, Phase phase) {
  archive.append(x, f);
  trace.records.push_back(TraceRecord{static_cast<long>(archive.size()), x, f, phase});
}

/// Uniform pick from the members carrying `want`; returns archive-population
/// index or npos when the label is absent.
inline std::size_t pick_labeled(const LabeledSet& labels, ClassLabel want, RandomStream& rng) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels.label[i] == want) idx.push_back(i);
  if (idx.empty()) return labels.size();
  return idx[rng.uniform_index(idx.size())];
}

}  // namespace detail

/// The ALEMO loop: LHS initialization, then strictly alternating exploration
/// (discriminator-screened, most-uncertain offspring) and exploitation
/// (attention-subspace surrogate search with a hypervolume-improvement
/// infill), one true evaluation per phase, until the budget is spent.
inline RunTrace alemo_run(const Problem& problem, const AlemoConfig& cfg) {
  const std::size_t d = problem.dimension();
  const BoxBounds bounds = problem.bounds();
  const std::size_t n0 = cfg.resolved_initial(d);
  if (cfg.np < 2) throw std::invalid_argument("alemo_run: population size must be >= 2");
  if (cfg.np > n0) throw std::invalid_argument("alemo_run: population size exceeds initial design");
  if (cfg.budget < n0) throw std::invalid_argument("alemo_run: budget below initial design size");

  RandomStream rng(cfg.seed);
  Archive archive;
  RunTrace trace;
  const double pm = cfg.variation.resolved_pm(d);

  for (const DecisionVector& x : latin_hypercube(n0, bounds, rng))
    detail::record_eval(archive, trace, x, problem.evaluate(x), Phase::init);

  Phase next = Phase::explore;
  while (archive.size() < cfg.budget) {
    if (next == Phase::explore) {
      const std::vector<EvaluatedSample> population =
          select_top(non_dominated_sort(archive.samples()), cfg.np);
      const LabeledSet labels = label_archive(population, cfg.label_mode);
      const PnnClassifier pnn = PnnClassifier::train(labels, bounds, cfg.pnn);

      const std::size_t pool = cfg.resolved_pool();
      std::vector<DecisionVector> offspring;
      offspring.reserve(pool);
      for (std::size_t i = 0; i < pool; ++i) {
        std::size_t ri = detail::pick_labeled(labels, ClassLabel::CI, rng);
        if (ri == labels.size()) ri = rng.uniform_index(labels.size());
        std::size_t rii = detail::pick_labeled(labels, ClassLabel::CII, rng);
        if (rii == labels.size()) {
          // No C-II members: fall back to the non-C-I remainder, then anywhere.
          std::vector<std::size_t> rest;
          for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels.label[k] != ClassLabel::CI) rest.push_back(k);
          rii = rest.empty() ? rng.uniform_index(labels.size()) : rest[rng.uniform_index(rest.size())];
        }
        DecisionVector v = rank_based_mutation(labels.x[ri], labels.x[rii], cfg.variation.mu);
        DecisionVector u = binomial_crossover(population[i % cfg.np].x, v, cfg.variation.cr, rng);
        u = clamp_to_bounds(u, bounds);
        u = polynomial_mutation(u, bounds, pm, cfg.variation.eta_m, rng);
        offspring.push_back(std::move(u));
      }
      const std::size_t pick =
          select_uncertain_offspring_index(offspring, pnn, archive.samples(), bounds);
      detail::record_eval(archive, trace, offspring[pick], problem.evaluate(offspring[pick]),
                          Phase::explore);
      next = Phase::exploit;
    } else {
      const AttentionSubspace sub = identify_subspace(archive.samples(), cfg.resolved_tau(), bounds);
      const BoxBounds training_box = inflate_box(sub.box, bounds);

      std::vector<DecisionVector> train_x;
      std::vector<ObjectiveVector> train_f;
      for (const auto& s : archive.samples()) {
        if (training_box.contains(s.x)) {
          train_x.push_back(s.x);
          train_f.push_back(s.f);
        }
      }
      std::vector<DecisionVector> seeds;
      if (train_x.size() < d + 1) {
        train_x.clear();
        train_f.clear();
        for (auto& s : select_top(non_dominated_sort(archive.samples()), cfg.resolved_tau())) {
          train_x.push_back(s.x);
          train_f.push_back(s.f);
        }
      }
      for (auto& s : select_top(non_dominated_sort(archive.samples()), cfg.resolved_tau()))
        seeds.push_back(std::move(s.x));

      const std::size_t m = problem.objective_count();
      std::vector<RbfModel> models;
      models.reserve(m);
      std::vector<double> yk(train_x.size());
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < train_x.size(); ++i) yk[i] = train_f[i][k];
        models.push_back(RbfModel::fit(train_x, yk, training_box, cfg.rbf));
      }

      const std::vector<PredictedPoint> candidates = surrogate_pareto_search(
          models, sub.box, seeds, cfg.inner_pop, cfg.inner_generations, cfg.variation, rng);

      std::vector<ObjectiveVector> front_f;
      for (const auto& s : pareto_front(archive.samples())) front_f.push_back(s.f);
      const ObjectiveVector z = default_reference_point(front_f);
      const DecisionVector x_new =
          select_hv_infill(candidates, front_f, z, archive.samples(), bounds);
      detail::record_eval(archive, trace, x_new, problem.evaluate(x_new), Phase::exploit);
      next = Phase::explore;
    }
  }

  trace.final_front = pareto_front(archive.samples());
  return trace;
}

/// Canonical generational NSGA-II under the same variation operator set:
/// binary tournament on (rank, crowding), binomial crossover of the two
/// parents, polynomial mutation, environmental selection from parents plus
/// offspring. Every offspring is truly evaluated; the last generation is
/// truncated if the budget is not a multiple of NP.
inline RunTrace nsga2_run(const Problem& problem, std::size_t np, std::size_t budget,
                          const VariationParams& params, std::uint64_t seed) {
  const std::size_t d = problem.dimension();
  const BoxBounds bounds = problem.bounds();
  if (np < 2) throw std::invalid_argument("nsga2_run: population size must be >= 2");
  if (budget < np) throw std::invalid_argument("nsga2_run: budget below population size");
  const double pm = params.resolved_pm(d);

  RandomStream rng(seed);
  Archive archive;
  RunTrace trace;

  std::vector<EvaluatedSample> parents;
  for (std::size_t i = 0; i < np; ++i) {
    DecisionVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.uniform(bounds.lb[j], bounds.ub[j]);
    detail::record_eval(archive, trace, x, problem.evaluate(x), Phase::init);
    parents.push_back(archive.samples().back());
  }

  while (archive.size() < budget) {
    const RankedPopulation ranked = non_dominated_sort(parents);
    auto tournament = [&]() -> const DecisionVector& {
      const std::size_t a = rng.uniform_index(np);
      const std::size_t b = rng.uniform_index(np);
      const RankedMember& ma = ranked.members[a];
      const RankedMember& mb = ranked.members[b];
      if (ma.rank != mb.rank) return (ma.rank < mb.rank ? ma : mb).sample.x;
      if (ma.crowding != mb.crowding) return (ma.crowding > mb.crowding ? ma : mb).sample.x;
      return ma.sample.x;
    };
    std::vector<EvaluatedSample> offspring;
    for (std::size_t i = 0; i < np && archive.size() < budget; ++i) {
      const DecisionVector& pa = tournament();
      const DecisionVector& pb = tournament();
      DecisionVector u = binomial_crossover(pa, pb, params.cr, rng);
      u = polynomial_mutation(u, bounds, pm, params.eta_m, rng);
      detail::record_eval(archive, trace, u, problem.evaluate(u), Phase::explore);
      offspring.push_back(archive.samples().back());
    }
    std::vector<EvaluatedSample> combined = parents;
    combined.insert(combined.end(), offspring.begin(), offspring.end());
    parents = select_top(non_dominated_sort(combined), np);
  }

  trace.final_front = pareto_front(archive.samples());
  return trace;
}

}  // namespace alemo
