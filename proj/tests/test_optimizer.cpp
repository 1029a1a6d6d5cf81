#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "alemo/metrics.hpp"
#include "alemo/optimizer.hpp"

using namespace alemo;

namespace {

/// d variables in [0,1]; f1 = x1 and f2 = 1 - x1 + sum of squares of the
/// rest, so the Pareto set is x2 = ... = xd = 0 with f2 = 1 - f1.
class ToyBiObjective final : public Problem {
 public:
  explicit ToyBiObjective(std::size_t d) : d_(d) {}
  std::size_t dimension() const override { return d_; }
  std::size_t objective_count() const override { return 2; }
  BoxBounds bounds() const override { return BoxBounds::unit(d_); }
  ObjectiveVector evaluate(const DecisionVector& x) const override {
    double tail = 0.0;
    for (std::size_t j = 1; j < d_; ++j) tail += x[j] * x[j];
    return {x[0], 1.0 - x[0] + tail};
  }
  std::string name() const override { return "toy"; }

 private:
  std::size_t d_;
};

LabeledSet two_center_labels(double ci_x, double cii_x) {
  LabeledSet set;
  set.x = {{ci_x}, {cii_x}};
  set.label = {ClassLabel::CI, ClassLabel::CII};
  return set;
}

std::vector<EvaluatedSample> archive_at(std::initializer_list<double> xs) {
  std::vector<EvaluatedSample> out;
  long idx = 1;
  for (double v : xs) out.push_back(EvaluatedSample{{v}, {v, 1.0 - v}, idx++});
  return out;
}

std::vector<ObjectiveVector> nd_filter(const std::vector<ObjectiveVector>& fs) {
  std::vector<ObjectiveVector> out;
  for (const auto& f : fs) {
    bool dominated = false;
    for (const auto& g : fs)
      if (dominates(g, f)) dominated = true;
    if (!dominated) out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("select_uncertain_offspring prefers distant C-I candidates", "[optimizer]") {
  const BoxBounds bounds = BoxBounds::unit(1);
  const PnnClassifier pnn = PnnClassifier::train(two_center_labels(0.1, 0.9), bounds);
  const auto archive = archive_at({0.1});

  // Both offspring classify C-I (nearer the 0.1 center); the farther one from
  // the archive wins.
  REQUIRE(select_uncertain_offspring_index({{0.4}, {0.2}}, pnn, archive, bounds) == 0);
  // An exact archive duplicate has distance zero and is never preferred.
  REQUIRE(select_uncertain_offspring_index({{0.1}, {0.3}}, pnn, archive, bounds) == 1);
  REQUIRE_THROWS_AS(select_uncertain_offspring_index({}, pnn, archive, bounds),
                    std::invalid_argument);
}

TEST_CASE("select_uncertain_offspring falls back to C-II then to distance", "[optimizer]") {
  const BoxBounds bounds = BoxBounds::unit(1);

  // C-I center at 0.9, C-II at 0.1: offspring near 0.1 all classify C-II.
  const PnnClassifier pnn = PnnClassifier::train(two_center_labels(0.9, 0.1), bounds);
  const auto archive = archive_at({0.1});
  REQUIRE(select_uncertain_offspring_index({{0.05}, {0.2}}, pnn, archive, bounds) == 1);

  // Neither C-I nor C-II present: the globally most distant offspring wins.
  LabeledSet only_ciii;
  only_ciii.x = {{0.2}, {0.8}};
  only_ciii.label = {ClassLabel::CIII, ClassLabel::CIII};
  const PnnClassifier pnn3 = PnnClassifier::train(only_ciii, bounds);
  REQUIRE(select_uncertain_offspring_index({{0.3}, {0.6}}, pnn3, archive_at({0.5}), bounds) == 0);
}

TEST_CASE("alemo_run with budget equal to the design stops after initialization", "[optimizer]") {
  const ToyBiObjective problem(3);
  CountingProblem counted(problem);
  AlemoConfig cfg;
  cfg.np = 10;
  cfg.initial_size = 20;
  cfg.budget = 20;
  const RunTrace trace = alemo_run(counted, cfg);

  REQUIRE(counted.count() == 20);
  REQUIRE(trace.records.size() == 20);
  for (const auto& r : trace.records) REQUIRE(r.phase == Phase::init);

  std::vector<EvaluatedSample> all;
  for (const auto& r : trace.records)
    all.push_back(EvaluatedSample{r.x, r.f, r.eval_index});
  const auto front = pareto_front(all);
  REQUIRE(trace.final_front.size() == front.size());
  for (std::size_t i = 0; i < front.size(); ++i)
    REQUIRE(trace.final_front[i].eval_index == front[i].eval_index);
}

TEST_CASE("alemo_run alternates explore and exploit within the budget", "[optimizer]") {
  const ToyBiObjective problem(4);
  CountingProblem counted(problem);
  AlemoConfig cfg;
  cfg.np = 10;
  cfg.initial_size = 20;
  cfg.budget = 31;
  cfg.inner_pop = 16;
  cfg.inner_generations = 5;
  const RunTrace trace = alemo_run(counted, cfg);

  REQUIRE(counted.count() == 31);
  REQUIRE(trace.records.size() == 31);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    REQUIRE(trace.records[i].eval_index == static_cast<long>(i + 1));
    if (i < 20)
      REQUIRE(trace.records[i].phase == Phase::init);
    else if ((i - 20) % 2 == 0)
      REQUIRE(trace.records[i].phase == Phase::explore);
    else
      REQUIRE(trace.records[i].phase == Phase::exploit);
  }
}

TEST_CASE("alemo_run is deterministic for a fixed seed", "[optimizer]") {
  const ToyBiObjective problem(3);
  AlemoConfig cfg;
  cfg.np = 8;
  cfg.initial_size = 16;
  cfg.budget = 26;
  cfg.inner_pop = 12;
  cfg.inner_generations = 4;
  cfg.seed = 77;

  const RunTrace a = alemo_run(problem, cfg);
  const RunTrace b = alemo_run(problem, cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(a.records[i].x == b.records[i].x);
    REQUIRE(a.records[i].f == b.records[i].f);
    REQUIRE(a.records[i].phase == b.records[i].phase);
  }
}

TEST_CASE("alemo_run improves the front beyond the initial design", "[optimizer]") {
  const ToyBiObjective problem(4);
  AlemoConfig cfg;
  cfg.np = 10;
  cfg.initial_size = 20;
  cfg.budget = 60;
  cfg.inner_pop = 16;
  cfg.inner_generations = 8;
  cfg.seed = 3;
  const RunTrace trace = alemo_run(problem, cfg);

  const ObjectiveVector z{2.0, 6.0};
  std::vector<ObjectiveVector> init_f, final_f;
  for (std::size_t i = 0; i < 20; ++i) init_f.push_back(trace.records[i].f);
  for (const auto& s : trace.final_front) final_f.push_back(s.f);
  REQUIRE(hypervolume(final_f, z) >= hypervolume(nd_filter(init_f), z));
}

TEST_CASE("alemo_run validates its configuration", "[optimizer]") {
  const ToyBiObjective problem(3);
  AlemoConfig cfg;
  cfg.np = 1;
  cfg.initial_size = 20;
  cfg.budget = 40;
  REQUIRE_THROWS_AS(alemo_run(problem, cfg), std::invalid_argument);
  cfg.np = 30;  // larger than the initial design
  REQUIRE_THROWS_AS(alemo_run(problem, cfg), std::invalid_argument);
  cfg.np = 10;
  cfg.budget = 19;  // below the initial design
  REQUIRE_THROWS_AS(alemo_run(problem, cfg), std::invalid_argument);
}

TEST_CASE("nsga2_run spends exactly the budget and truncates the last generation",
          "[optimizer]") {
  const ToyBiObjective problem(4);
  CountingProblem counted(problem);
  const RunTrace trace = nsga2_run(counted, 20, 45, VariationParams{}, 11);

  REQUIRE(counted.count() == 45);
  REQUIRE(trace.records.size() == 45);
  for (std::size_t i = 0; i < 20; ++i) REQUIRE(trace.records[i].phase == Phase::init);
  for (std::size_t i = 20; i < 45; ++i) REQUIRE(trace.records[i].phase == Phase::explore);
  REQUIRE_FALSE(trace.final_front.empty());
}

TEST_CASE("nsga2_run makes progress and is deterministic", "[optimizer]") {
  const ToyBiObjective problem(4);
  const RunTrace a = nsga2_run(problem, 16, 160, VariationParams{}, 5);
  const RunTrace b = nsga2_run(problem, 16, 160, VariationParams{}, 5);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) REQUIRE(a.records[i].x == b.records[i].x);

  const ObjectiveVector z{2.0, 6.0};
  std::vector<ObjectiveVector> init_f, final_f;
  for (std::size_t i = 0; i < 16; ++i) init_f.push_back(a.records[i].f);
  for (const auto& s : a.final_front) final_f.push_back(s.f);
  REQUIRE(hypervolume(final_f, z) >= hypervolume(nd_filter(init_f), z));

  REQUIRE_THROWS_AS(nsga2_run(problem, 1, 45, VariationParams{}, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(nsga2_run(problem, 20, 19, VariationParams{}, 1), std::invalid_argument);
}
