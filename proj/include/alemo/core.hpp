#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alemo/rng.hpp"

namespace alemo {

using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Axis-aligned box constraint. lb[i] < ub[i] holds for every dimension.
struct BoxBounds {
  std::vector<double> lb;
  std::vector<double> ub;

  BoxBounds() = default;
  BoxBounds(std::vector<double> lo, std::vector<double> hi) : lb(std::move(lo)), ub(std::move(hi)) {
    validate();
  }

  static BoxBounds unit(std::size_t d) {
    return BoxBounds(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
  }

  [[nodiscard]] std::size_t dimension() const { return lb.size(); }

  void validate() const {
    if (lb.size() != ub.size()) throw std::invalid_argument("BoxBounds: lb/ub length mismatch");
    for (std::size_t i = 0; i < lb.size(); ++i)
      if (!(lb[i] < ub[i])) throw std::invalid_argument("BoxBounds: lb must be strictly below ub");
  }

  [[nodiscard]] bool contains(const DecisionVector& x) const {
    if (x.size() != lb.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lb[i] || x[i] > ub[i]) return false;
    return true;
  }

  /// Maps x into [0,1]^d coordinates of this box.
  [[nodiscard]] DecisionVector normalize(const DecisionVector& x) const {
    if (x.size() != lb.size()) throw std::invalid_argument("BoxBounds::normalize: length mismatch");
    DecisionVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - lb[i]) / (ub[i] - lb[i]);
    return out;
  }
};

/// Flips signs so maximization objectives can be stored in the library's
/// minimization convention. Applying twice is the identity.
inline ObjectiveVector negate_for_minimization(const ObjectiveVector& f) {
  if (!all_finite(f)) throw std::invalid_argument("negate_for_minimization: non-finite input");
  ObjectiveVector out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = -f[i];
  return out;
}

inline DecisionVector clamp_to_bounds(const DecisionVector& x, const BoxBounds& b) {
  if (x.size() != b.dimension()) throw std::invalid_argument("clamp_to_bounds: length mismatch");
  DecisionVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i];
    if (out[i] < b.lb[i]) out[i] = b.lb[i];
    if (out[i] > b.ub[i]) out[i] = b.ub[i];
  }
  return out;
}

/// One truly evaluated point. eval_index is 1-based and unique per archive.
struct EvaluatedSample {
  DecisionVector x;
  ObjectiveVector f;
  long eval_index = 0;
};

/// Append-only record of every true evaluation, in evaluation order.
class Archive {
 public:
  const EvaluatedSample& append(DecisionVector x, ObjectiveVector f) {
    EvaluatedSample s;
    s.x = std::move(x);
    s.f = std::move(f);
    s.eval_index = static_cast<long>(samples_.size()) + 1;
    samples_.push_back(std::move(s));
    return samples_.back();
  }

  [[nodiscard]] const std::vector<EvaluatedSample>& samples() const { return samples_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] bool empty() const { return samples_.empty(); }

 private:
  std::vector<EvaluatedSample> samples_;
};

/// Black-box problem: deterministic evaluation inside a box, minimization.
class Problem {
 public:
  virtual ~Problem() = default;
  [[nodiscard]] virtual std::size_t dimension() const = 0;
  [[nodiscard]] virtual std::size_t objective_count() const = 0;
  [[nodiscard]] virtual BoxBounds bounds() const = 0;
  [[nodiscard]] virtual ObjectiveVector evaluate(const DecisionVector& x) const = 0;
  [[nodiscard]] virtual std::string name() const { return "problem"; }
};

/// Wraps a problem and counts true evaluations. The optimizers are budgeted
/// at this boundary; tests use it to prove surrogate-only phases stay free.
class CountingProblem final : public Problem {
 public:
  explicit CountingProblem(const Problem& inner) : inner_(&inner) {}

  [[nodiscard]] std::size_t dimension() const override { return inner_->dimension(); }
  [[nodiscard]] std::size_t objective_count() const override { return inner_->objective_count(); }
  [[nodiscard]] BoxBounds bounds() const override { return inner_->bounds(); }
  [[nodiscard]] std::string name() const override { return inner_->name(); }

  [[nodiscard]] ObjectiveVector evaluate(const DecisionVector& x) const override {
    ++count_;
    return inner_->evaluate(x);
  }

  [[nodiscard]] long count() const { return count_; }

 private:
  const Problem* inner_;
  mutable long count_ = 0;
};

}  // namespace alemo
