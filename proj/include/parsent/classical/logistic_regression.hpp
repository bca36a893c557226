#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "parsent/classical/common.hpp"

namespace parsent::classical {

struct LogRegParams {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  double l2 = 0.0;

  bool operator==(const LogRegParams&) const = default;
};

/// Multinomial (softmax) logistic regression. With two classes and the
/// second row fixed at zero this is the binary sigmoid model.
struct LogRegModel {
  Matrix<double> weights;      // classes x V
  std::vector<double> biases;  // classes
  LogRegParams hyper;

  std::size_t num_classes() const noexcept { return biases.size(); }
  std::size_t num_features() const noexcept { return weights.cols(); }

  bool operator==(const LogRegModel&) const = default;
};

inline std::vector<double> logreg_scores(const LogRegModel& m, std::span<const double> x) {
  std::vector<double> s(m.biases);
  for (std::size_t c = 0; c < s.size(); ++c) {
    const auto w = m.weights.row(c);
    for (std::size_t f = 0; f < x.size(); ++f) s[c] += w[f] * x[f];
  }
  return s;
}

/// Full-batch gradient descent on mean cross-entropy plus (l2/2)|W|^2,
/// starting from all-zero parameters.
inline LogRegModel logreg_fit(const FeatureMatrix& x, const Labels& y, std::size_t num_classes,
                              LogRegParams hyper = {}) {
  check_fit_inputs(x, y, num_classes);
  if (num_classes < 2) throw ConfigError("logistic regression needs at least 2 classes");
  if (!(hyper.learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  const std::size_t n = x.rows(), v = x.cols();
  LogRegModel m{Matrix<double>(num_classes, v), std::vector<double>(num_classes, 0.0), hyper};

  // Sparse view of each row; BOW rows are mostly zeros.
  std::vector<std::vector<std::pair<std::size_t, double>>> nz(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < v; ++f)
      if (x(i, f) != 0.0) nz[i].emplace_back(f, x(i, f));

  Matrix<double> gw(num_classes, v);
  std::vector<double> gb(num_classes);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::fill(gw.data().begin(), gw.data().end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> s(m.biases);
      for (std::size_t c = 0; c < num_classes; ++c)
        for (auto [f, val] : nz[i]) s[c] += m.weights(c, f) * val;
      auto p = softmax(s);
      p[y[i]] -= 1.0;
      for (std::size_t c = 0; c < num_classes; ++c) {
        gb[c] += p[c];
        for (auto [f, val] : nz[i]) gw(c, f) += p[c] * val;
      }
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      m.biases[c] -= hyper.learning_rate * gb[c] * inv_n;
      for (std::size_t f = 0; f < v; ++f)
        m.weights(c, f) -= hyper.learning_rate * (gw(c, f) * inv_n + hyper.l2 * m.weights(c, f));
    }
  }
  return m;
}

inline Prediction logreg_predict(const LogRegModel& m, std::span<const double> x) {
  check_features(x, m.num_features());
  Prediction p;
  p.distribution = softmax(logreg_scores(m, x));
  p.label = argmax(p.distribution);
  return p;
}

}  // namespace parsent::classical
