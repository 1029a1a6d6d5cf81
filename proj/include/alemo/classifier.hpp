#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/pareto.hpp"

namespace alemo {

enum class ClassLabel { CI = 0, CII = 1, CIII = 2 };

inline const char* to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::CI: return "C-I";
    case ClassLabel::CII: return "C-II";
    default: return "C-III";
  }
}

struct LabeledSet {
  std::vector<DecisionVector> x;
  std::vector<ClassLabel> label;
  bool degenerate = false;  // set when fewer than two ranks forced a fallback

  std::size_t size() const { return x.size(); }
};

/// How archive members are assigned to the three categories. `ranks` maps
/// front 1 -> C-I, front 2 -> C-II, rest -> C-III. `dominance` keeps front 2
/// as the reference set and labels the others by whether they dominate at
/// least one reference point (C-I) or not (C-III).
enum class LabelMode { ranks, dominance };

inline LabeledSet label_archive(const std::vector<EvaluatedSample>& pop,
                                LabelMode mode = LabelMode::ranks) {
  if (pop.empty()) throw std::invalid_argument("label_archive: empty population");
  const RankedPopulation ranked = non_dominated_sort(pop);

  int max_rank = 0;
  for (const auto& m : ranked.members) max_rank = std::max(max_rank, m.rank);

  LabeledSet out;
  out.x.reserve(pop.size());
  out.label.reserve(pop.size());
  for (const auto& m : ranked.members) out.x.push_back(m.sample.x);

  if (max_rank < 2) {
    // Single-front archive: everything is C-I; callers may want to skip
    // classifier-guided screening in this state.
    out.label.assign(pop.size(), ClassLabel::CI);
    out.degenerate = true;
    return out;
  }

  if (mode == LabelMode::ranks) {
    for (const auto& m : ranked.members) {
      if (m.rank == 1)
        out.label.push_back(ClassLabel::CI);
      else if (m.rank == 2)
        out.label.push_back(ClassLabel::CII);
      else
        out.label.push_back(ClassLabel::CIII);
    }
    return out;
  }

  // dominance mode: reference = second front; a non-reference member is C-I
  // iff it dominates at least one reference point.
  std::vector<const ObjectiveVector*> reference;
  for (const auto& m : ranked.members)
    if (m.rank == 2) reference.push_back(&m.sample.f);
  for (const auto& m : ranked.members) {
    if (m.rank == 2) {
      out.label.push_back(ClassLabel::CII);
      continue;
    }
    bool dominates_ref = false;
    for (const auto* r : reference) {
      if (dominates(m.sample.f, *r)) {
        dominates_ref = true;
        break;
      }
    }
    out.label.push_back(dominates_ref ? ClassLabel::CI : ClassLabel::CIII);
  }
  return out;
}

struct PnnConfig {
  double sigma_scale = 0.1;   // sigma = scale * mean pairwise center distance
  double sigma_override = -1; // > 0 to force a fixed bandwidth
};

/// Parzen-window classifier over the three dominance categories. Centers are
/// stored normalized to the unit box; the class score is
/// prior * mean_c exp(-||x - c||^2 / (2 sigma^2)). Classes with no training
/// points are absent and never predicted.
class PnnClassifier {
 public:
  PnnClassifier() = default;

  static PnnClassifier train(const LabeledSet& data, const BoxBounds& bounds,
                             const PnnConfig& cfg = {}) {
    if (data.size() == 0) throw std::invalid_argument("pnn_train: empty training set");
    if (data.x.size() != data.label.size())
      throw std::invalid_argument("pnn_train: label/vector count mismatch");
    PnnClassifier model;
    model.bounds_ = bounds;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto idx = static_cast<std::size_t>(data.label[i]);
      model.centers_[idx].push_back(bounds.normalize(data.x[i]));
    }
    const double total = static_cast<double>(data.size());
    std::vector<const DecisionVector*> all;
    for (const auto& cls : model.centers_)
      for (const auto& c : cls) all.push_back(&c);
    for (std::size_t k = 0; k < 3; ++k)
      model.priors_[k] = static_cast<double>(model.centers_[k].size()) / total;

    if (cfg.sigma_override > 0.0) {
      model.sigma_ = cfg.sigma_override;
    } else {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
          double s = 0.0;
          for (std::size_t k = 0; k < all[i]->size(); ++k) {
            const double d = (*all[i])[k] - (*all[j])[k];
            s += d * d;
          }
          sum += std::sqrt(s);
          ++pairs;
        }
      }
      const double mean = pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
      model.sigma_ = mean > 0.0 ? cfg.sigma_scale * mean : 0.1;
    }
    model.trained_ = true;
    return model;
  }

  bool trained() const { return trained_; }
  double sigma() const { return sigma_; }
  const std::array<double, 3>& priors() const { return priors_; }
  bool class_present(ClassLabel c) const { return !centers_[static_cast<std::size_t>(c)].empty(); }

  /// Per-class scores prior * mean kernel; absent classes score 0.
  std::array<double, 3> scores(const DecisionVector& x) const {
    if (!trained_) throw std::logic_error("pnn_predict: model not trained");
    const DecisionVector xn = bounds_.normalize(x);
    std::array<double, 3> s{0.0, 0.0, 0.0};
    const double denom = 2.0 * sigma_ * sigma_;
    for (std::size_t k = 0; k < 3; ++k) {
      if (centers_[k].empty()) continue;
      double acc = 0.0;
      for (const auto& c : centers_[k]) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
          const double d = xn[j] - c[j];
          d2 += d * d;
        }
        acc += std::exp(-d2 / denom);
      }
      s[k] = priors_[k] * acc / static_cast<double>(centers_[k].size());
    }
    return s;
  }

  /// Argmax over present classes; exact ties go to the more promising class
  /// (C-I beats C-II beats C-III), which the iteration order provides.
  ClassLabel predict(const DecisionVector& x) const {
    const std::array<double, 3> s = scores(x);
    std::size_t best = 3;
    for (std::size_t k = 0; k < 3; ++k) {
      if (centers_[k].empty()) continue;
      if (best == 3 || s[k] > s[best]) best = k;
    }
    if (best == 3) throw std::logic_error("pnn_predict: no class present");
    return static_cast<ClassLabel>(best);
  }

 private:
  BoxBounds bounds_ = BoxBounds::unit(1);
  std::array<std::vector<DecisionVector>, 3> centers_{};
  std::array<double, 3> priors_{0.0, 0.0, 0.0};
  double sigma_ = 0.1;
  bool trained_ = false;
};

}  // namespace alemo
