#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/pareto.hpp"

namespace alemo {

namespace detail {

/// 2-D hypervolume of the non-dominated subset of pts against reference z by
/// a left-to-right sweep. Points not strictly below z in every coordinate are
/// ignored.
inline double hv2(std::vector<ObjectiveVector> pts, const ObjectiveVector& z) {
  std::vector<ObjectiveVector> kept;
  for (const auto& p : pts)
    if (p[0] < z[0] && p[1] < z[1]) kept.push_back(p);
  if (kept.empty()) return 0.0;
  std::sort(kept.begin(), kept.end(), [](const ObjectiveVector& a, const ObjectiveVector& b) {
    if (a[0] != b[0]) return a[0] < b[0];
    return a[1] < b[1];
  });
  double hv = 0.0;
  double prev_f2 = z[1];
  for (const auto& p : kept) {
    if (p[1] >= prev_f2) continue;  // dominated in the sweep
    hv += (z[0] - p[0]) * (prev_f2 - p[1]);
    prev_f2 = p[1];
  }
  return hv;
}

}  // namespace detail

/// Hypervolume dominated by `front` relative to reference point z
/// (minimization; larger is better). Supports m = 2 and m = 3.
/// m = 3 is computed by slicing along f3: between consecutive distinct f3
/// levels the dominated area in the (f1, f2) plane is a 2-D hypervolume of the
/// points at or below that level.
inline double hypervolume(const std::vector<ObjectiveVector>& front, const ObjectiveVector& z) {
  if (front.empty()) return 0.0;
  const std::size_t m = z.size();
  for (const auto& p : front) {
    if (p.size() != m) throw std::invalid_argument("hypervolume: objective count mismatch");
    if (!all_finite(p)) throw std::invalid_argument("hypervolume: non-finite objective");
  }
  if (!all_finite(z)) throw std::invalid_argument("hypervolume: non-finite reference point");

  if (m == 2) return detail::hv2(front, z);
  if (m == 3) {
    std::vector<ObjectiveVector> kept;
    for (const auto& p : front)
      if (p[0] < z[0] && p[1] < z[1] && p[2] < z[2]) kept.push_back(p);
    if (kept.empty()) return 0.0;
    std::set<double> levels;
    for (const auto& p : kept) levels.insert(p[2]);
    std::vector<double> f3(levels.begin(), levels.end());
    f3.push_back(z[2]);
    double hv = 0.0;
    ObjectiveVector z2{z[0], z[1]};
    for (std::size_t s = 0; s + 1 < f3.size(); ++s) {
      std::vector<ObjectiveVector> slice;
      for (const auto& p : kept)
        if (p[2] <= f3[s]) slice.push_back(ObjectiveVector{p[0], p[1]});
      hv += detail::hv2(std::move(slice), z2) * (f3[s + 1] - f3[s]);
    }
    return hv;
  }
  throw std::invalid_argument("hypervolume: only 2 or 3 objectives supported");
}

/// Hypervolume improvement of candidate q over an existing front, never
/// negative.
inline double hv_improvement(const std::vector<ObjectiveVector>& front, const ObjectiveVector& q,
                             const ObjectiveVector& z) {
  std::vector<ObjectiveVector> with = front;
  with.push_back(q);
  const double delta = hypervolume(with, z) - hypervolume(front, z);
  return std::max(0.0, delta);
}

/// Inverted generational distance: mean Euclidean distance from each reference
/// point to its nearest member of the approximation front.
inline double igd(const std::vector<ObjectiveVector>& reference,
                  const std::vector<ObjectiveVector>& approx) {
  if (reference.empty()) throw std::invalid_argument("igd: empty reference set");
  if (approx.empty()) throw std::invalid_argument("igd: empty approximation set");
  const std::size_t m = reference.front().size();
  double total = 0.0;
  for (const auto& r : reference) {
    if (r.size() != m) throw std::invalid_argument("igd: objective count mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : approx) {
      if (a.size() != m) throw std::invalid_argument("igd: objective count mismatch");
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double d = r[k] - a[k];
        s += d * d;
      }
      best = std::min(best, s);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(reference.size());
}

/// Reference point z_i = nadir_i + 0.1 * (nadir_i - ideal_i) over the given
/// point set; a degenerate span falls back to nadir_i + 1.
inline ObjectiveVector default_reference_point(const std::vector<ObjectiveVector>& points) {
  if (points.empty()) throw std::invalid_argument("default_reference_point: empty set");
  const std::size_t m = points.front().size();
  ObjectiveVector ideal(m, std::numeric_limits<double>::infinity());
  ObjectiveVector nadir(m, -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    if (p.size() != m) throw std::invalid_argument("default_reference_point: objective count mismatch");
    for (std::size_t k = 0; k < m; ++k) {
      ideal[k] = std::min(ideal[k], p[k]);
      nadir[k] = std::max(nadir[k], p[k]);
    }
  }
  ObjectiveVector z(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double span = nadir[k] - ideal[k];
    z[k] = span > 0.0 ? nadir[k] + 0.1 * span : nadir[k] + 1.0;
  }
  return z;
}

}  // namespace alemo
