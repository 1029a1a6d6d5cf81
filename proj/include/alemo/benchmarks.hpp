#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "alemo/core.hpp"
#include "alemo/pareto.hpp"

namespace alemo {

/// Analytic test problem description. All problems live on [0,1]^d; the
/// classical ZDT4 variant (x2..xd on [-5,5]) is selectable by flag.
struct BenchmarkSpec {
  std::string name;     // zdt1..zdt4, zdt6, dtlz1..dtlz7
  std::size_t d = 10;
  std::size_t m = 2;    // ZDT fixed at 2; DTLZ 2 or 3
  bool classical_zdt4 = false;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline bool is_zdt(const std::string& n) { return n.rfind("zdt", 0) == 0; }

constexpr double kPi = std::numbers::pi;

}  // namespace detail

inline void validate_spec(const BenchmarkSpec& spec) {
  static const std::vector<std::string> known{"zdt1",  "zdt2",  "zdt3",  "zdt4",  "zdt6",  "dtlz1",
                                             "dtlz2", "dtlz3", "dtlz4", "dtlz5", "dtlz6", "dtlz7"};
  const std::string n = detail::lower(spec.name);
  if (std::find(known.begin(), known.end(), n) == known.end())
    throw std::invalid_argument("unknown benchmark: " + spec.name);
  if (detail::is_zdt(n)) {
    if (spec.m != 2) throw std::invalid_argument(n + " is bi-objective only");
    if (spec.d < 2) throw std::invalid_argument(n + " needs d >= 2");
  } else {
    if (spec.m != 2 && spec.m != 3) throw std::invalid_argument(n + " supports m in {2,3} here");
    if (spec.d < spec.m) throw std::invalid_argument(n + " needs d >= m");
  }
}

inline BoxBounds benchmark_bounds(const BenchmarkSpec& spec) {
  const std::string n = detail::lower(spec.name);
  if (n == "zdt4" && spec.classical_zdt4) {
    DecisionVector lo(spec.d, -5.0), hi(spec.d, 5.0);
    lo[0] = 0.0;
    hi[0] = 1.0;
    return BoxBounds(lo, hi);
  }
  return BoxBounds::unit(spec.d);
}

inline ObjectiveVector evaluate_benchmark(const BenchmarkSpec& spec, const DecisionVector& x) {
  validate_spec(spec);
  const std::string name = detail::lower(spec.name);
  const std::size_t d = spec.d;
  const std::size_t m = spec.m;
  if (x.size() != d) throw std::invalid_argument("evaluate_benchmark: dimension mismatch");
  const BoxBounds bounds = benchmark_bounds(spec);
  if (!bounds.contains(x)) throw std::invalid_argument("evaluate_benchmark: x out of bounds");
  using detail::kPi;

  if (detail::is_zdt(name)) {
    const double f1 = name == "zdt6"
                          ? 1.0 - std::exp(-4.0 * x[0]) * std::pow(std::sin(6.0 * kPi * x[0]), 6)
                          : x[0];
    double g;
    if (name == "zdt4") {
      g = 1.0 + 10.0 * static_cast<double>(d - 1);
      for (std::size_t i = 1; i < d; ++i) g += x[i] * x[i] - 10.0 * std::cos(4.0 * kPi * x[i]);
    } else if (name == "zdt6") {
      double s = 0.0;
      for (std::size_t i = 1; i < d; ++i) s += x[i];
      g = 1.0 + 9.0 * std::pow(s / static_cast<double>(d - 1), 0.25);
    } else {
      double s = 0.0;
      for (std::size_t i = 1; i < d; ++i) s += x[i];
      g = 1.0 + 9.0 * s / static_cast<double>(d - 1);
    }
    const double ratio = f1 / g;
    double f2;
    if (name == "zdt2" || name == "zdt6")
      f2 = g * (1.0 - ratio * ratio);
    else if (name == "zdt3")
      f2 = g * (1.0 - std::sqrt(ratio) - ratio * std::sin(10.0 * kPi * f1));
    else
      f2 = g * (1.0 - std::sqrt(ratio));
    return ObjectiveVector{f1, f2};
  }

  // DTLZ family: position variables x_1..x_{m-1}, distance block x_M = x_m..x_d.
  const std::size_t k = d - m + 1;
  double g = 0.0;
  if (name == "dtlz1" || name == "dtlz3") {
    // Rastrigin-style g including the |x_M| cardinality term.
    double s = static_cast<double>(k);
    for (std::size_t i = m - 1; i < d; ++i)
      s += (x[i] - 0.5) * (x[i] - 0.5) - std::cos(20.0 * kPi * (x[i] - 0.5));
    g = 100.0 * s;
  } else if (name == "dtlz6") {
    for (std::size_t i = m - 1; i < d; ++i) g += std::pow(x[i], 0.1);
  } else if (name == "dtlz7") {
    double s = 0.0;
    for (std::size_t i = m - 1; i < d; ++i) s += x[i];
    g = 1.0 + 9.0 * s / static_cast<double>(k);
  } else {
    for (std::size_t i = m - 1; i < d; ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
  }

  ObjectiveVector f(m);
  if (name == "dtlz1") {
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.5 * (1.0 + g);
      for (std::size_t i = 0; i + j + 1 < m; ++i) v *= x[i];
      if (j > 0) v *= 1.0 - x[m - 1 - j];
      f[j] = v;
    }
    return f;
  }
  if (name == "dtlz7") {
    double h = static_cast<double>(m);
    for (std::size_t j = 0; j + 1 < m; ++j) {
      f[j] = x[j];
      h -= f[j] / (1.0 + g) * (1.0 + std::sin(3.0 * kPi * f[j]));
    }
    f[m - 1] = (1.0 + g) * h;
    return f;
  }

  // dtlz2..dtlz6: spherical objectives over angles derived from the position
  // variables. dtlz4 raises positions to alpha = 100; dtlz5/dtlz6 bend all
  // angles after the first toward pi/4 as g -> 0 (degenerate-curve coupling,
  // written here in absolute-angle form a_i = pi (1 + 2 g x_i) / (4 (1 + g))).
  std::vector<double> angle(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double pos = x[i];
    if (name == "dtlz4") pos = std::pow(pos, 100.0);
    if ((name == "dtlz5" || name == "dtlz6") && i > 0)
      angle[i] = kPi * (1.0 + 2.0 * g * pos) / (4.0 * (1.0 + g));
    else
      angle[i] = pos * kPi / 2.0;
  }
  for (std::size_t j = 0; j < m; ++j) {
    double v = 1.0 + g;
    for (std::size_t i = 0; i + j + 1 < m; ++i) v *= std::cos(angle[i]);
    if (j > 0) v *= std::sin(angle[m - 1 - j]);
    f[j] = v;
  }
  return f;
}

class BenchmarkProblem final : public Problem {
 public:
  explicit BenchmarkProblem(BenchmarkSpec spec) : spec_(std::move(spec)) {
    spec_.name = detail::lower(spec_.name);
    validate_spec(spec_);
    bounds_ = benchmark_bounds(spec_);
  }

  std::size_t dimension() const override { return spec_.d; }
  std::size_t objective_count() const override { return spec_.m; }
  BoxBounds bounds() const override { return bounds_; }
  std::string name() const override { return spec_.name; }
  ObjectiveVector evaluate(const DecisionVector& x) const override {
    return evaluate_benchmark(spec_, x);
  }
  const BenchmarkSpec& spec() const { return spec_; }

 private:
  BenchmarkSpec spec_;
  BoxBounds bounds_ = BoxBounds::unit(1);
};

/// Analytic Pareto-optimal reference front: position variables swept on a
/// grid, distance variables pinned at their g-minimizer (0.5 for dtlz1-5,
/// 0 otherwise), evaluated through evaluate_benchmark, and filtered to the
/// non-dominated subset (zdt3/dtlz7 fronts are disconnected). n_points = 0
/// picks 1000 (m=2) or 5000 (m=3).
inline std::vector<ObjectiveVector> true_front(const BenchmarkSpec& spec, std::size_t n_points = 0) {
  validate_spec(spec);
  const std::string name = detail::lower(spec.name);
  const std::size_t m = spec.m;
  if (n_points == 0) n_points = m == 2 ? 1000 : 5000;
  if (n_points < 2) throw std::invalid_argument("true_front: n_points must be >= 2");

  double rest = 0.0;
  if (name.rfind("dtlz", 0) == 0 && name != "dtlz6" && name != "dtlz7") rest = 0.5;

  // dtlz4's position variables enter as x^100, so sweep t and invert to keep
  // the induced angles uniformly spread.
  auto position = [&](double t) { return name == "dtlz4" ? std::pow(t, 0.01) : t; };

  std::vector<DecisionVector> xs;
  if (m == 2) {
    xs.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
      DecisionVector x(spec.d, rest);
      x[0] = position(t);
      xs.push_back(std::move(x));
    }
  } else {
    const auto side =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_points))));
    xs.reserve(side * side);
    for (std::size_t a = 0; a < side; ++a) {
      for (std::size_t b = 0; b < side; ++b) {
        const double ta = static_cast<double>(a) / static_cast<double>(side - 1);
        const double tb = static_cast<double>(b) / static_cast<double>(side - 1);
        DecisionVector x(spec.d, rest);
        x[0] = position(ta);
        x[1] = position(tb);
        xs.push_back(std::move(x));
      }
    }
  }

  std::vector<EvaluatedSample> evaluated;
  evaluated.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    evaluated.push_back(EvaluatedSample{xs[i], evaluate_benchmark(spec, xs[i]),
                                        static_cast<long>(i + 1)});
  std::vector<ObjectiveVector> front;
  for (auto& s : pareto_front(evaluated)) front.push_back(std::move(s.f));
  return front;
}

}  // namespace alemo
