#pragma once

#include <numeric>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/rng.hpp"

namespace alemo {

/// Default initial design size used by the optimizer: 100 points below 100
/// dimensions, 200 at or above.
inline std::size_t default_initial_size(std::size_t dimension) {
  return dimension < 100 ? std::size_t{100} : std::size_t{200};
}

/// Latin hypercube sample of n points in the given box: each dimension is cut
/// into n equal strata, each stratum used exactly once, with a uniform jitter
/// inside the stratum. Per-dimension stratum orders are independent random
/// permutations.
inline std::vector<DecisionVector> latin_hypercube(std::size_t n, const BoxBounds& bounds,
                                                   RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("latin_hypercube: n must be positive");
  const std::size_t d = bounds.dimension();
  std::vector<DecisionVector> points(n, DecisionVector(d, 0.0));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Fisher–Yates using the shared stream so results are reproducible.
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t k = rng.uniform_index(i);
      std::swap(perm[i - 1], perm[k]);
    }
    const double width = (bounds.ub[j] - bounds.lb[j]) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      points[i][j] = bounds.lb[j] + (static_cast<double>(perm[i]) + u) * width;
    }
  }
  return points;
}

}  // namespace alemo
