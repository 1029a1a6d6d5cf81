#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "alemo/subspace.hpp"

using namespace alemo;

namespace {

std::vector<EvaluatedSample> make_archive(const std::vector<DecisionVector>& xs,
                                          const std::vector<ObjectiveVector>& fs) {
  std::vector<EvaluatedSample> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back(EvaluatedSample{xs[i], fs[i], static_cast<long>(i + 1)});
  return out;
}

}  // namespace

TEST_CASE("identify_subspace boxes the most promising members", "[subspace]") {
  const BoxBounds bounds = BoxBounds::unit(2);
  const auto archive = make_archive({{0.0, 1.0}, {1.0, 0.0}, {0.9, 0.9}},
                                    {{0.0, 1.0}, {1.0, 0.0}, {5.0, 5.0}});

  const AttentionSubspace sub = identify_subspace(archive, 2, bounds);
  REQUIRE(sub.tau == 2);
  REQUIRE(sub.box.lb == DecisionVector{0.0, 0.0});
  REQUIRE(sub.box.ub == DecisionVector{1.0, 1.0});
}

TEST_CASE("identify_subspace widens collapsed dimensions", "[subspace]") {
  const BoxBounds bounds = BoxBounds::unit(2);
  const auto archive = make_archive({{0.0, 1.0}, {1.0, 0.0}}, {{0.0, 1.0}, {1.0, 0.0}});

  // tau = 1 keeps only the earliest rank-1 member, x = (0, 1); each dimension
  // collapses and is widened by 1e-6 of the problem span, clipped to bounds.
  const AttentionSubspace sub = identify_subspace(archive, 1, bounds);
  REQUIRE(sub.box.lb[0] == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(sub.box.ub[0] == Catch::Approx(1e-6));
  REQUIRE(sub.box.lb[1] == Catch::Approx(1.0 - 1e-6));
  REQUIRE(sub.box.ub[1] == Catch::Approx(1.0).margin(1e-15));
  REQUIRE_NOTHROW(sub.box.validate());
}

TEST_CASE("identify_subspace contains the selected members and grows with tau", "[subspace]") {
  RandomStream rng(11);
  const BoxBounds bounds(DecisionVector{-2.0, 0.0, 5.0}, DecisionVector{2.0, 1.0, 9.0});
  std::vector<DecisionVector> xs;
  std::vector<ObjectiveVector> fs;
  for (int i = 0; i < 30; ++i) {
    xs.push_back({rng.uniform(-2.0, 2.0), rng.uniform(0.0, 1.0), rng.uniform(5.0, 9.0)});
    fs.push_back({rng.uniform(), rng.uniform()});
  }
  const auto archive = make_archive(xs, fs);

  const AttentionSubspace small = identify_subspace(archive, 5, bounds);
  const AttentionSubspace large = identify_subspace(archive, 15, bounds);
  const auto top5 = select_top(non_dominated_sort(archive), 5);
  for (const auto& s : top5) REQUIRE(small.box.contains(s.x));
  for (std::size_t j = 0; j < 3; ++j) {
    REQUIRE(large.box.lb[j] <= small.box.lb[j]);
    REQUIRE(large.box.ub[j] >= small.box.ub[j]);
  }

  REQUIRE_THROWS_AS(identify_subspace(archive, 0, bounds), std::invalid_argument);
  REQUIRE_THROWS_AS(identify_subspace(archive, archive.size() + 1, bounds),
                    std::invalid_argument);
}

TEST_CASE("inflate_box pads each side and clips to the problem box", "[subspace]") {
  const BoxBounds bounds = BoxBounds::unit(1);

  const BoxBounds inner(DecisionVector{0.2}, DecisionVector{0.4});
  const BoxBounds padded = inflate_box(inner, bounds);
  REQUIRE(padded.lb[0] == Catch::Approx(0.19));
  REQUIRE(padded.ub[0] == Catch::Approx(0.41));

  const BoxBounds flush(DecisionVector{0.0}, DecisionVector{0.5});
  const BoxBounds clipped = inflate_box(flush, bounds);
  REQUIRE(clipped.lb[0] == 0.0);
  REQUIRE(clipped.ub[0] == Catch::Approx(0.525));
}

TEST_CASE("surrogate_pareto_search spans the modeled trade-off", "[subspace]") {
  const BoxBounds box = BoxBounds::unit(1);
  std::vector<DecisionVector> xs;
  std::vector<double> y1, y2;
  for (int i = 0; i <= 8; ++i) {
    const double t = i / 8.0;
    xs.push_back({t});
    y1.push_back(t);
    y2.push_back(1.0 - t);
  }
  const std::vector<RbfModel> models{RbfModel::fit(xs, y1, box), RbfModel::fit(xs, y2, box)};

  RandomStream rng(5);
  const auto front =
      surrogate_pareto_search(models, box, {}, 40, 20, VariationParams{}, rng);
  REQUIRE(front.size() >= 2);
  double min_f1 = 1e300, max_f1 = -1e300;
  for (const auto& p : front) {
    REQUIRE(box.contains(p.x));
    REQUIRE(p.f.size() == 2);
    min_f1 = std::min(min_f1, p.f[0]);
    max_f1 = std::max(max_f1, p.f[0]);
  }
  REQUIRE(min_f1 < 0.1);
  REQUIRE(max_f1 > 0.9);
}

TEST_CASE("surrogate_pareto_search with zero generations filters the seeds", "[subspace]") {
  const BoxBounds box = BoxBounds::unit(1);
  const std::vector<DecisionVector> xs{{0.0}, {0.5}, {1.0}};
  const std::vector<RbfModel> models{RbfModel::fit(xs, {0.0, 0.5, 1.0}, box),
                                     RbfModel::fit(xs, {1.0, 0.5, 0.0}, box)};
  RandomStream rng(9);
  const auto front = surrogate_pareto_search(models, box, {{0.2}, {0.8}}, 2, 0,
                                             VariationParams{}, rng);
  REQUIRE(front.size() == 2);
  REQUIRE(front[0].x[0] == Catch::Approx(0.2));
  REQUIRE(front[1].x[0] == Catch::Approx(0.8));

  // Seeds outside the box are clamped onto it.
  RandomStream rng2(9);
  const auto clamped = surrogate_pareto_search(models, box, {{1.5}, {0.3}}, 2, 0,
                                               VariationParams{}, rng2);
  bool found_edge = false;
  for (const auto& p : clamped) found_edge = found_edge || p.x[0] == 1.0;
  REQUIRE(found_edge);
}

TEST_CASE("surrogate_pareto_search is deterministic and validates input", "[subspace]") {
  const BoxBounds box = BoxBounds::unit(2);
  const std::vector<DecisionVector> xs{{0.1, 0.1}, {0.9, 0.2}, {0.4, 0.8}};
  const std::vector<RbfModel> models{RbfModel::fit(xs, {1.0, 2.0, 3.0}, box),
                                     RbfModel::fit(xs, {3.0, 1.0, 2.0}, box)};

  RandomStream a(123), b(123);
  const auto ra = surrogate_pareto_search(models, box, {}, 12, 5, VariationParams{}, a);
  const auto rb = surrogate_pareto_search(models, box, {}, 12, 5, VariationParams{}, b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    REQUIRE(ra[i].x == rb[i].x);
    REQUIRE(ra[i].f == rb[i].f);
  }

  RandomStream rng(1);
  REQUIRE_THROWS_AS(surrogate_pareto_search({}, box, {}, 10, 5, VariationParams{}, rng),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(surrogate_pareto_search(models, box, {}, 1, 5, VariationParams{}, rng),
                    std::invalid_argument);
}

TEST_CASE("select_hv_infill maximizes predicted hypervolume gain", "[subspace]") {
  const BoxBounds bounds = BoxBounds::unit(1);
  const std::vector<ObjectiveVector> front{{0.5, 0.5}};
  const ObjectiveVector z{1.0, 1.0};
  const auto archive = make_archive({{0.1}}, {{0.5, 0.5}});

  // Gains: (0.25, 0.75) adds 0.0625; (0.45, 0.45) adds 0.3025 - 0.25 = 0.0525.
  const std::vector<PredictedPoint> candidates{{{0.6}, {0.45, 0.45}},
                                               {{0.7}, {0.25, 0.75}}};
  REQUIRE(select_hv_infill(candidates, front, z, archive, bounds) == DecisionVector{0.7});

  // A dominated prediction loses to any improving one.
  const std::vector<PredictedPoint> mixed{{{0.6}, {0.6, 0.6}}, {{0.7}, {0.25, 0.75}}};
  REQUIRE(select_hv_infill(mixed, front, z, archive, bounds) == DecisionVector{0.7});

  REQUIRE_THROWS_AS(select_hv_infill({}, front, z, archive, bounds), std::invalid_argument);
}

TEST_CASE("select_hv_infill skips archived duplicates", "[subspace]") {
  const BoxBounds bounds = BoxBounds::unit(1);
  const std::vector<ObjectiveVector> front{{0.5, 0.5}};
  const ObjectiveVector z{1.0, 1.0};
  const auto archive = make_archive({{0.5}}, {{0.5, 0.5}});

  // The duplicate of the archived x = 0.5 is excluded even though its
  // predicted gain is much larger.
  const std::vector<PredictedPoint> candidates{{{0.5}, {0.0, 0.0}},
                                               {{0.9}, {0.4, 0.45}}};
  REQUIRE(select_hv_infill(candidates, front, z, archive, bounds) == DecisionVector{0.9});

  // When every candidate is a duplicate the farthest one is returned.
  const std::vector<PredictedPoint> dups{{{0.5}, {0.0, 0.0}},
                                         {{0.5 + 5e-10}, {0.9, 0.9}}};
  const DecisionVector pick = select_hv_infill(dups, front, z, archive, bounds);
  REQUIRE(pick[0] == Catch::Approx(0.5 + 5e-10));
}
