#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "alemo/core.hpp"

namespace alemo {

struct RbfConfig {
  double sigma_scale = 1.0;    // sigma = scale * mean pairwise center distance
  double sigma_override = -1;  // > 0 to force a fixed width
  double ridge = 1e-10;        // diagonal regularization
  bool center_mean = false;    // interpolate residuals around the data mean
};

/// Gaussian-RBF interpolant f^(x) = sum_i lambda_i exp(-||x - c_i||^2 / s^2) in
/// coordinates normalized to the training box. A single-sample fit degrades to
/// a constant model.
class RbfModel {
 public:
  static RbfModel fit(const std::vector<DecisionVector>& xs, const std::vector<double>& ys,
                      const BoxBounds& box, const RbfConfig& cfg = {}) {
    if (xs.size() != ys.size()) throw std::invalid_argument("rbf_fit: xs/ys length mismatch");
    if (xs.empty()) throw std::invalid_argument("rbf_fit: empty training set");

    RbfModel model;
    model.box_ = box;
    const std::size_t d = box.dimension();

    // Deduplicate exact repeats, keeping the first occurrence.
    std::vector<DecisionVector> cx;
    std::vector<double> cy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i].size() != d) throw std::invalid_argument("rbf_fit: dimension mismatch");
      bool dup = false;
      for (const auto& seen : cx)
        if (seen == xs[i]) { dup = true; break; }
      if (!dup) {
        cx.push_back(xs[i]);
        cy.push_back(ys[i]);
      }
    }

    const std::size_t n = cx.size();
    if (n == 1) {
      model.constant_ = true;
      model.constant_value_ = cy[0];
      model.fitted_ = true;
      return model;
    }

    model.centers_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      const DecisionVector cn = box.normalize(cx[i]);
      for (std::size_t j = 0; j < d; ++j)
        model.centers_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cn[j];
    }

    Eigen::MatrixXd dist2(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      dist2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d2 = (model.centers_.row(static_cast<Eigen::Index>(i)) -
                           model.centers_.row(static_cast<Eigen::Index>(j)))
                              .squaredNorm();
        dist2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d2;
        dist2(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d2;
      }
    }

    if (cfg.sigma_override > 0.0) {
      model.sigma_ = cfg.sigma_override;
    } else {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          sum += std::sqrt(dist2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
          ++pairs;
        }
      const double mean = sum / static_cast<double>(pairs);
      model.sigma_ = mean > 0.0 ? cfg.sigma_scale * mean : 1.0;
    }

    const Eigen::MatrixXd phi = (-dist2 / (model.sigma_ * model.sigma_)).array().exp().matrix();
    Eigen::MatrixXd ridged = phi;
    ridged.diagonal().array() += cfg.ridge;

    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = cy[i];
    if (cfg.center_mean) {
      model.offset_ = y.mean();
      y.array() -= model.offset_;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(ridged);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("rbf_fit: kernel system singular after regularization");
    Eigen::VectorXd w = ldlt.solve(y);
    // The diagonal shift biases the solution away from exact interpolation; a
    // few refinement passes against the unshifted kernel remove the bias
    // wherever the spectrum allows it.
    for (int pass = 0; pass < 3; ++pass) w += ldlt.solve(y - phi * w);
    model.weights_ = std::move(w);
    if (!model.weights_.allFinite())
      throw std::runtime_error("rbf_fit: kernel solve produced non-finite weights");
    model.fitted_ = true;
    return model;
  }

  bool fitted() const { return fitted_; }
  double sigma() const { return sigma_; }
  std::size_t center_count() const {
    return constant_ ? 1 : static_cast<std::size_t>(centers_.rows());
  }

  double predict(const DecisionVector& x) const {
    std::vector<DecisionVector> one{x};
    return predict_batch(one)[0];
  }

  /// Batched prediction; the kernel matrix is formed with dense linear algebra
  /// because the inner optimizer calls this on whole populations.
  std::vector<double> predict_batch(const std::vector<DecisionVector>& xs) const {
    if (!fitted_) throw std::logic_error("rbf_predict: model not fitted");
    if (constant_) return std::vector<double>(xs.size(), constant_value_);
    const std::size_t d = box_.dimension();
    const Eigen::Index q = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd Q(q, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < q; ++i) {
      if (xs[static_cast<std::size_t>(i)].size() != d)
        throw std::invalid_argument("rbf_predict: dimension mismatch");
      const DecisionVector xn = box_.normalize(xs[static_cast<std::size_t>(i)]);
      for (std::size_t j = 0; j < d; ++j) Q(i, static_cast<Eigen::Index>(j)) = xn[j];
    }
    // ||q - c||^2 = |q|^2 + |c|^2 - 2 q.c, batched as one GEMM.
    const Eigen::VectorXd qn = Q.rowwise().squaredNorm();
    const Eigen::VectorXd cn = centers_.rowwise().squaredNorm();
    Eigen::MatrixXd dist2 = (-2.0 * Q * centers_.transpose());
    dist2.colwise() += qn;
    dist2.rowwise() += cn.transpose();
    dist2 = dist2.cwiseMax(0.0);
    const Eigen::VectorXd pred =
        ((-dist2 / (sigma_ * sigma_)).array().exp().matrix() * weights_).array() + offset_;
    return std::vector<double>(pred.data(), pred.data() + pred.size());
  }

 private:
  BoxBounds box_ = BoxBounds::unit(1);
  Eigen::MatrixXd centers_;
  Eigen::VectorXd weights_;
  double sigma_ = 1.0;
  double offset_ = 0.0;
  bool constant_ = false;
  double constant_value_ = 0.0;
  bool fitted_ = false;
};

}  // namespace alemo
