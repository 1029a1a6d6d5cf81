#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "alemo/pareto.hpp"
#include "alemo/rng.hpp"

using namespace alemo;

namespace {

std::vector<EvaluatedSample> make_pop(const std::vector<ObjectiveVector>& fs) {
  std::vector<EvaluatedSample> pop;
  for (std::size_t i = 0; i < fs.size(); ++i)
    pop.push_back(EvaluatedSample{DecisionVector{static_cast<double>(i)}, fs[i],
                                  static_cast<long>(i + 1)});
  return pop;
}

/// O(n^2) oracle: rank = 1 + max rank of any dominator, computed iteratively.
std::vector<int> brute_force_ranks(const std::vector<ObjectiveVector>& fs) {
  const std::size_t n = fs.size();
  std::vector<int> rank(n, 0);
  std::vector<bool> assigned(n, false);
  int current = 1;
  std::size_t remaining = n;
  while (remaining > 0) {
    std::vector<std::size_t> level;
    for (std::size_t i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < n && !dominated; ++j)
        if (j != i && !assigned[j] && dominates(fs[j], fs[i])) dominated = true;
      if (!dominated) level.push_back(i);
    }
    for (std::size_t i : level) {
      rank[i] = current;
      assigned[i] = true;
    }
    remaining -= level.size();
    ++current;
  }
  return rank;
}

}  // namespace

TEST_CASE("dominates follows the strict-componentwise definition", "[pareto]") {
  REQUIRE(dominates({1.0, 2.0}, {2.0, 3.0}));
  REQUIRE_FALSE(dominates({1.0, 2.0}, {2.0, 1.0}));
  REQUIRE_FALSE(dominates({2.0, 1.0}, {1.0, 2.0}));
  REQUIRE_FALSE(dominates({1.0, 2.0}, {1.0, 2.0}));
  REQUIRE(dominates({1.0, 2.0}, {1.0, 3.0}));
  REQUIRE_THROWS_AS(dominates({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("dominates is irreflexive and transitive", "[pareto]") {
  RandomStream rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    ObjectiveVector a(3), b(3), c(3);
    for (int k = 0; k < 3; ++k) {
      a[k] = rng.uniform_index(4);
      b[k] = rng.uniform_index(4);
      c[k] = rng.uniform_index(4);
    }
    REQUIRE_FALSE(dominates(a, a));
    if (dominates(a, b) && dominates(b, c)) REQUIRE(dominates(a, c));
  }
}

TEST_CASE("non_dominated_sort splits the five-point example into two fronts", "[pareto]") {
  const std::vector<ObjectiveVector> fs{{1, 4}, {2, 3}, {3, 2}, {4, 1}, {2, 2}};
  const RankedPopulation ranked = non_dominated_sort(make_pop(fs));
  std::map<int, std::vector<ObjectiveVector>> fronts;
  for (const RankedMember& m : ranked.members) fronts[m.rank].push_back(m.sample.f);
  REQUIRE(fronts.size() == 2);
  REQUIRE(fronts[1].size() == 3);
  REQUIRE(fronts[2].size() == 2);
  auto has = [](const std::vector<ObjectiveVector>& v, const ObjectiveVector& f) {
    return std::find(v.begin(), v.end(), f) != v.end();
  };
  REQUIRE(has(fronts[1], {1, 4}));
  REQUIRE(has(fronts[1], {2, 2}));
  REQUIRE(has(fronts[1], {4, 1}));
  REQUIRE(has(fronts[2], {2, 3}));
  REQUIRE(has(fronts[2], {3, 2}));
}

TEST_CASE("non_dominated_sort handles degenerate populations", "[pareto]") {
  const RankedPopulation single = non_dominated_sort(make_pop({{1, 2}}));
  REQUIRE(single.members.size() == 1);
  REQUIRE(single.members[0].rank == 1);

  // One point dominating everything sits alone in rank 1.
  const RankedPopulation ranked = non_dominated_sort(make_pop({{0, 0}, {1, 2}, {2, 1}, {3, 3}}));
  int rank1_count = 0;
  for (const RankedMember& m : ranked.members)
    if (m.rank == 1) {
      ++rank1_count;
      REQUIRE(m.sample.f == ObjectiveVector{0, 0});
    }
  REQUIRE(rank1_count == 1);

  REQUIRE_THROWS_AS(non_dominated_sort({}), std::invalid_argument);
}

TEST_CASE("non_dominated_sort matches the brute-force oracle on random sets", "[pareto]") {
  RandomStream rng(23);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 5 + rng.uniform_index(196);
    const std::size_t m = 2 + rng.uniform_index(2);
    std::vector<ObjectiveVector> fs(n, ObjectiveVector(m));
    for (auto& f : fs)
      for (double& v : f) v = static_cast<double>(rng.uniform_index(8));  // force duplicates/ties
    const std::vector<int> expected = brute_force_ranks(fs);
    const RankedPopulation ranked = non_dominated_sort(make_pop(fs));
    for (std::size_t i = 0; i < n; ++i) REQUIRE(ranked.members[i].rank == expected[i]);
  }
}

TEST_CASE("crowding_distance computes normalized neighbor gaps", "[pareto]") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> d = crowding_distance({{0, 1}, {0.5, 0.5}, {1, 0}});
  REQUIRE(d[0] == inf);
  REQUIRE(d[1] == Catch::Approx(2.0));
  REQUIRE(d[2] == inf);

  const std::vector<double> two = crowding_distance({{0, 1}, {1, 0}});
  REQUIRE(two[0] == inf);
  REQUIRE(two[1] == inf);
}

TEST_CASE("crowding_distance treats a zero-span objective as contributing nothing", "[pareto]") {
  // Third objective constant: only the first two contribute to the interior.
  const std::vector<double> d = crowding_distance({{0, 2, 7}, {1, 1, 7}, {2, 0, 7}});
  const double inf = std::numeric_limits<double>::infinity();
  REQUIRE(d[0] == inf);
  REQUIRE(d[2] == inf);
  REQUIRE(d[1] == Catch::Approx(2.0));
}

TEST_CASE("select_top honors rank, crowding, then eval_index", "[pareto]") {
  const std::vector<ObjectiveVector> fs{{1, 4}, {2, 3}, {3, 2}, {4, 1}, {2, 2}};
  const RankedPopulation ranked = non_dominated_sort(make_pop(fs));

  SECTION("n equal to population size returns everything") {
    REQUIRE(select_top(ranked, 5).size() == 5);
  }
  SECTION("n equal to the first front returns exactly rank 1") {
    const std::vector<EvaluatedSample> top = select_top(ranked, 3);
    for (const EvaluatedSample& s : top) {
      const bool in_rank1 = s.f == ObjectiveVector{1, 4} || s.f == ObjectiveVector{2, 2} ||
                            s.f == ObjectiveVector{4, 1};
      REQUIRE(in_rank1);
    }
  }
  SECTION("the fourth slot goes to the earlier-indexed rank-2 member") {
    // Both rank-2 members are extremes of a 2-point front (infinite crowding),
    // so the eval_index tie-break decides: (2,3) was appended before (3,2).
    const std::vector<EvaluatedSample> top = select_top(ranked, 4);
    REQUIRE(top[3].f == ObjectiveVector{2, 3});
  }
  SECTION("oversized requests are rejected") {
    REQUIRE_THROWS_AS(select_top(ranked, 6), std::invalid_argument);
  }
}

TEST_CASE("select_top never skips a strictly better rank", "[pareto]") {
  RandomStream rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 10 + rng.uniform_index(40);
    std::vector<ObjectiveVector> fs(n, ObjectiveVector(2));
    for (auto& f : fs)
      for (double& v : f) v = static_cast<double>(rng.uniform_index(10));
    const RankedPopulation ranked = non_dominated_sort(make_pop(fs));
    const std::size_t pick = 1 + rng.uniform_index(n);
    const std::vector<EvaluatedSample> chosen = select_top(ranked, pick);

    int worst_chosen = 0;
    std::vector<bool> taken(n + 1, false);
    for (const EvaluatedSample& s : chosen) taken[static_cast<std::size_t>(s.eval_index)] = true;
    for (const EvaluatedSample& s : chosen)
      for (const RankedMember& m : ranked.members)
        if (m.sample.eval_index == s.eval_index) worst_chosen = std::max(worst_chosen, m.rank);
    for (const RankedMember& m : ranked.members)
      if (!taken[static_cast<std::size_t>(m.sample.eval_index)])
        REQUIRE(m.rank + 1 > worst_chosen);  // excluded members are never strictly better ranked
  }
}

TEST_CASE("pareto_front keeps the non-dominated subset in input order", "[pareto]") {
  const std::vector<EvaluatedSample> pop =
      make_pop({{2, 3}, {1, 4}, {3, 2}, {2, 2}, {4, 1}});
  const std::vector<EvaluatedSample> front = pareto_front(pop);
  REQUIRE(front.size() == 3);
  REQUIRE(front[0].f == ObjectiveVector{1, 4});
  REQUIRE(front[1].f == ObjectiveVector{2, 2});
  REQUIRE(front[2].f == ObjectiveVector{4, 1});
  for (std::size_t i = 0; i < front.size(); ++i)
    for (std::size_t j = 0; j < front.size(); ++j)
      REQUIRE_FALSE(dominates(front[i].f, front[j].f));
}
