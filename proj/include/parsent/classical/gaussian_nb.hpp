#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "parsent/classical/common.hpp"

namespace parsent::classical {

/// Gaussian naive Bayes with maximum-likelihood means and variances.
struct GNBModel {
  std::vector<double> class_priors;  // P(A)
  Matrix<double> means;              // classes x V
  Matrix<double> variances;          // classes x V, smoothing already added
  double var_smoothing = 1e-9;
  double epsilon = 0.0;              // var_smoothing * max feature variance

  std::size_t num_classes() const noexcept { return class_priors.size(); }
  std::size_t num_features() const noexcept { return means.cols(); }

  bool operator==(const GNBModel&) const = default;
};

inline GNBModel gnb_fit(const FeatureMatrix& x, const Labels& y, std::size_t num_classes,
                        double var_smoothing = 1e-9) {
  check_fit_inputs(x, y, num_classes);
  if (!(var_smoothing > 0.0)) throw ConfigError("var_smoothing must be positive");
  const std::size_t n = x.rows(), v = x.cols();

  std::vector<std::size_t> counts(num_classes, 0);
  for (auto c : y) ++counts[c];
  for (std::size_t c = 0; c < num_classes; ++c)
    if (counts[c] == 0) throw DegenerateClass("class " + std::to_string(c) + " has no samples");

  GNBModel m;
  m.var_smoothing = var_smoothing;
  m.means = Matrix<double>(num_classes, v);
  m.variances = Matrix<double>(num_classes, v);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < v; ++f) m.means(y[i], f) += x(i, f);
  for (std::size_t c = 0; c < num_classes; ++c)
    for (std::size_t f = 0; f < v; ++f) m.means(c, f) /= static_cast<double>(counts[c]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < v; ++f) {
      const double d = x(i, f) - m.means(y[i], f);
      m.variances(y[i], f) += d * d;
    }
  for (std::size_t c = 0; c < num_classes; ++c)
    for (std::size_t f = 0; f < v; ++f) m.variances(c, f) /= static_cast<double>(counts[c]);

  // Smoothing scale: largest per-feature variance over the whole training set.
  double max_var = 0.0;
  for (std::size_t f = 0; f < v; ++f) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, f);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) sq += (x(i, f) - mean) * (x(i, f) - mean);
    max_var = std::max(max_var, sq / static_cast<double>(n));
  }
  m.epsilon = var_smoothing * (max_var > 0.0 ? max_var : 1.0);
  for (auto& s : m.variances.data()) s += m.epsilon;

  m.class_priors.resize(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c)
    m.class_priors[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
  return m;
}

namespace detail {

inline Prediction normalize_log_posterior(std::vector<double> log_post) {
  Prediction p;
  p.label = argmax(log_post);
  p.distribution = softmax(log_post);
  return p;
}

}  // namespace detail

/// Posterior via Bayes' rule in log space, normalized to sum to one.
inline Prediction gnb_predict(const GNBModel& m, std::span<const double> x) {
  check_features(x, m.num_features());
  std::vector<double> lp(m.num_classes());
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    double s = std::log(m.class_priors[c]);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double var = m.variances(c, f);
      const double d = x[f] - m.means(c, f);
      s += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
    lp[c] = s;
  }
  return detail::normalize_log_posterior(std::move(lp));
}

/// Same posterior computed from a sparse count vector: the all-zero
/// log-likelihood is corrected only at nonzero features.
inline Prediction gnb_predict(const GNBModel& m, const SparseVector& x) {
  std::vector<double> lp(m.num_classes());
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    double s = std::log(m.class_priors[c]);
    for (std::size_t f = 0; f < m.num_features(); ++f) {
      const double var = m.variances(c, f);
      const double mu = m.means(c, f);
      s += -0.5 * std::log(2.0 * std::numbers::pi * var) - mu * mu / (2.0 * var);
    }
    for (auto [f, count] : x) {
      if (f >= m.num_features()) throw DimensionMismatch("sparse index out of range");
      const double var = m.variances(c, f);
      const double mu = m.means(c, f);
      const double d = static_cast<double>(count) - mu;
      s += mu * mu / (2.0 * var) - d * d / (2.0 * var);
    }
    lp[c] = s;
  }
  return detail::normalize_log_posterior(std::move(lp));
}

}  // namespace parsent::classical
