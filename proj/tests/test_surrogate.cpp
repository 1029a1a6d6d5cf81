#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "alemo/rng.hpp"
#include "alemo/surrogate.hpp"

using namespace alemo;

TEST_CASE("rbf interpolates its training data", "[surrogate]") {
  RandomStream rng(21);
  // Interpolation to 1e-8 is only numerically reachable while the kernel
  // system stays well conditioned, so the sample count is capped per
  // dimension (dense low-dimensional designs push the Gram spectrum below
  // double precision no matter how the system is solved).
  const std::size_t cap[] = {0, 4, 12, 25, 40, 40};
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(5);
    const std::size_t n = 2 + rng.uniform_index(cap[d] - 1);
    std::vector<DecisionVector> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < n; ++i) {
      DecisionVector x(d);
      for (double& v : x) v = rng.uniform();
      xs.push_back(std::move(x));
      ys.push_back(rng.uniform(-5.0, 5.0));
    }
    const RbfModel model = RbfModel::fit(xs, ys, BoxBounds::unit(d));
    for (std::size_t i = 0; i < n; ++i)
      REQUIRE(std::abs(model.predict(xs[i]) - ys[i]) <= 1e-8);
  }
}

TEST_CASE("rbf single-sample fit degrades to a constant model", "[surrogate]") {
  const RbfModel model = RbfModel::fit({{0.3, 0.3}}, {2.5}, BoxBounds::unit(2));
  REQUIRE(model.center_count() == 1);
  REQUIRE(model.predict({0.3, 0.3}) == Catch::Approx(2.5));
  REQUIRE(model.predict({0.9, 0.1}) == Catch::Approx(2.5));
}

TEST_CASE("rbf approximates a smooth function between samples", "[surrogate]") {
  std::vector<DecisionVector> xs;
  std::vector<double> ys;
  for (int i = 0; i < 10; ++i) {
    const double t = i / 9.0;
    xs.push_back({t});
    ys.push_back(t * t);
  }
  const RbfModel model = RbfModel::fit(xs, ys, BoxBounds::unit(1));
  double max_err = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double mid = (i + 0.5) / 9.0;
    max_err = std::max(max_err, std::abs(model.predict({mid}) - mid * mid));
  }
  REQUIRE(max_err < 0.05);
}

TEST_CASE("rbf respects kernel symmetry and decay", "[surrogate]") {
  SECTION("antisymmetric targets cancel at the midpoint") {
    const RbfModel model = RbfModel::fit({{0.25}, {0.75}}, {1.0, -1.0}, BoxBounds::unit(1));
    REQUIRE(model.predict({0.5}) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("prediction decays far from all centers") {
    // Train inside a much larger box so a distant query is many sigmas away.
    const BoxBounds box({0.0}, {100.0});
    const RbfModel model = RbfModel::fit({{1.0}, {2.0}}, {3.0, 4.0}, box);
    REQUIRE(std::abs(model.predict({95.0})) < 1e-6);
  }
}

TEST_CASE("rbf mean centering shifts the far field, not the fit", "[surrogate]") {
  RbfConfig cfg;
  cfg.center_mean = true;
  const BoxBounds box({0.0}, {100.0});
  const std::vector<DecisionVector> xs{{1.0}, {2.0}};
  const std::vector<double> ys{3.0, 4.0};
  const RbfModel model = RbfModel::fit(xs, ys, box, cfg);
  SECTION("training points are still interpolated") {
    for (std::size_t i = 0; i < xs.size(); ++i)
      REQUIRE(std::abs(model.predict(xs[i]) - ys[i]) <= 1e-8);
  }
  SECTION("a distant query reverts to the sample mean instead of zero") {
    REQUIRE(model.predict({95.0}) == Catch::Approx(3.5).margin(1e-6));
  }
}

TEST_CASE("rbf deduplicates exact repeats keeping the first", "[surrogate]") {
  const std::vector<DecisionVector> with_dup{{0.1}, {0.5}, {0.1}, {0.9}};
  const std::vector<double> ys{1.0, 2.0, 99.0, 3.0};  // the 99 target is dropped
  const RbfModel a = RbfModel::fit(with_dup, ys, BoxBounds::unit(1));
  const RbfModel b = RbfModel::fit({{0.1}, {0.5}, {0.9}}, {1.0, 2.0, 3.0}, BoxBounds::unit(1));
  REQUIRE(a.center_count() == 3);
  for (int i = 0; i <= 20; ++i) {
    const DecisionVector q{i / 20.0};
    REQUIRE(a.predict(q) == Catch::Approx(b.predict(q)));
  }
}

TEST_CASE("rbf prediction is invariant under sample order", "[surrogate]") {
  RandomStream rng(87);
  std::vector<DecisionVector> xs;
  std::vector<double> ys;
  for (int i = 0; i < 15; ++i) {
    xs.push_back({rng.uniform(), rng.uniform()});
    ys.push_back(rng.uniform(-1.0, 1.0));
  }
  std::vector<DecisionVector> xs_rev(xs.rbegin(), xs.rend());
  std::vector<double> ys_rev(ys.rbegin(), ys.rend());
  const RbfModel a = RbfModel::fit(xs, ys, BoxBounds::unit(2));
  const RbfModel b = RbfModel::fit(xs_rev, ys_rev, BoxBounds::unit(2));
  for (int rep = 0; rep < 30; ++rep) {
    const DecisionVector q{rng.uniform(), rng.uniform()};
    REQUIRE(a.predict(q) == Catch::Approx(b.predict(q)).margin(1e-9));
  }
}

TEST_CASE("rbf fit and predict are deterministic", "[surrogate]") {
  const std::vector<DecisionVector> xs{{0.1, 0.2}, {0.7, 0.3}, {0.4, 0.9}};
  const std::vector<double> ys{1.0, -2.0, 0.5};
  const RbfModel a = RbfModel::fit(xs, ys, BoxBounds::unit(2));
  const RbfModel b = RbfModel::fit(xs, ys, BoxBounds::unit(2));
  REQUIRE(a.sigma() == b.sigma());
  REQUIRE(a.predict({0.33, 0.44}) == b.predict({0.33, 0.44}));
}

TEST_CASE("rbf batch prediction matches pointwise prediction", "[surrogate]") {
  RandomStream rng(121);
  std::vector<DecisionVector> xs;
  std::vector<double> ys;
  for (int i = 0; i < 12; ++i) {
    xs.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    ys.push_back(rng.uniform(-2.0, 2.0));
  }
  const RbfModel model = RbfModel::fit(xs, ys, BoxBounds::unit(3));
  std::vector<DecisionVector> queries;
  for (int i = 0; i < 25; ++i) queries.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  const std::vector<double> batch = model.predict_batch(queries);
  REQUIRE(batch.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    REQUIRE(batch[i] == Catch::Approx(model.predict(queries[i])).margin(1e-12));
}

TEST_CASE("rbf guards misuse", "[surrogate]") {
  REQUIRE_THROWS_AS(RbfModel::fit({}, {}, BoxBounds::unit(1)), std::invalid_argument);
  REQUIRE_THROWS_AS(RbfModel::fit({{0.1}}, {1.0, 2.0}, BoxBounds::unit(1)), std::invalid_argument);
  REQUIRE_THROWS_AS(RbfModel::fit({{0.1, 0.2}}, {1.0}, BoxBounds::unit(1)), std::invalid_argument);

  const RbfModel model = RbfModel::fit({{0.1}, {0.9}}, {1.0, 2.0}, BoxBounds::unit(1));
  REQUIRE_THROWS_AS(model.predict({0.1, 0.2}), std::invalid_argument);
  const RbfModel unfitted;
  REQUIRE_THROWS_AS(unfitted.predict({0.5}), std::logic_error);
}

TEST_CASE("rbf sigma rule can be overridden", "[surrogate]") {
  // Two centers one unit apart in normalized space: mean pairwise distance 1.
  const RbfModel auto_sigma = RbfModel::fit({{0.0}, {1.0}}, {0.0, 1.0}, BoxBounds::unit(1));
  REQUIRE(auto_sigma.sigma() == Catch::Approx(1.0));
  RbfConfig cfg;
  cfg.sigma_override = 0.25;
  const RbfModel forced = RbfModel::fit({{0.0}, {1.0}}, {0.0, 1.0}, BoxBounds::unit(1), cfg);
  REQUIRE(forced.sigma() == Catch::Approx(0.25));
}
