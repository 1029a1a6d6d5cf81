#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"

namespace alemo {

/// Pareto dominance in minimization convention: a is nowhere worse than b and
/// strictly better somewhere. Equal vectors never dominate each other.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dominates: length mismatch");
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly_better = true;
  }
  return strictly_better;
}

struct RankedMember {
  EvaluatedSample sample;
  int rank = 0;         // 1 = non-dominated
  double crowding = 0;  // +inf at per-objective extremes of a front
};

struct RankedPopulation {
  std::vector<RankedMember> members;
};

/// Crowding distances for one mutually non-dominated front. Extremes per
/// objective get +inf; interior members sum normalized neighbor gaps. A zero
/// objective span contributes nothing (divisor treated as 1 over a 0 gap).
inline std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front) {
  const std::size_t n = front.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);
  if (n < 3) {
    std::fill(dist.begin(), dist.end(), inf);
    return dist;
  }
  const std::size_t m = front.front().size();
  std::vector<std::size_t> order(n);
  for (std::size_t obj = 0; obj < m; ++obj) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
    dist[order.front()] = inf;
    dist[order.back()] = inf;
    const double span = front[order.back()][obj] - front[order.front()][obj];
    const double div = span > 0.0 ? span : 1.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (dist[order[k]] == inf) continue;
      dist[order[k]] += (front[order[k + 1]][obj] - front[order[k - 1]][obj]) / div;
    }
  }
  return dist;
}

/// Fast non-dominated sorting; every member gets the smallest rank consistent
/// with dominance, plus a within-front crowding distance.
inline RankedPopulation non_dominated_sort(const std::vector<EvaluatedSample>& pop) {
  if (pop.empty()) throw std::invalid_argument("non_dominated_sort: empty population");
  const std::size_t n = pop.size();

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> dom_count(n, 0);
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(pop[i].f, pop[j].f))
        dominated[i].push_back(j);
      else if (dominates(pop[j].f, pop[i].f))
        ++dom_count[i];
    }
    if (dom_count[i] == 0) current.push_back(i);
  }

  RankedPopulation out;
  out.members.resize(n);
  int rank = 1;
  while (!current.empty()) {
    std::vector<ObjectiveVector> front_f;
    front_f.reserve(current.size());
    for (std::size_t idx : current) front_f.push_back(pop[idx].f);
    const std::vector<double> crowd = crowding_distance(front_f);
    for (std::size_t k = 0; k < current.size(); ++k) {
      out.members[current[k]] = RankedMember{pop[current[k]], rank, crowd[k]};
    }
    std::vector<std::size_t> next;
    for (std::size_t idx : current) {
      for (std::size_t j : dominated[idx]) {
        if (--dom_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    current = std::move(next);
    ++rank;
  }
  return out;
}

/// Top-n selection by (rank asc, crowding desc, eval_index asc).
inline std::vector<EvaluatedSample> select_top(const RankedPopulation& ranked, std::size_t n) {
  if (n > ranked.members.size()) throw std::invalid_argument("select_top: n exceeds population size");
  std::vector<std::size_t> order(ranked.members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const RankedMember& ma = ranked.members[a];
    const RankedMember& mb = ranked.members[b];
    if (ma.rank != mb.rank) return ma.rank < mb.rank;
    if (ma.crowding != mb.crowding) return ma.crowding > mb.crowding;
    return ma.sample.eval_index < mb.sample.eval_index;
  });
  std::vector<EvaluatedSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(ranked.members[order[k]].sample);
  return out;
}

/// Non-dominated subset of a sample set (rank-1 front), in input order.
inline std::vector<EvaluatedSample> pareto_front(const std::vector<EvaluatedSample>& pop) {
  std::vector<EvaluatedSample> out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dom = false;
    for (std::size_t j = 0; j < pop.size() && !dom; ++j)
      if (j != i && dominates(pop[j].f, pop[i].f)) dom = true;
    if (!dom) out.push_back(pop[i]);
  }
  return out;
}

}  // namespace alemo
