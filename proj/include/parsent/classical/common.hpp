#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parsent/error.hpp"
#include "parsent/matrix.hpp"
#include "parsent/vectorize.hpp"

namespace parsent::classical {

using FeatureMatrix = Matrix<double>;
using Labels = std::vector<std::size_t>;

/// Predicted class plus the per-class distribution it was taken from
/// (posterior, probability, leaf frequencies or vote shares).
struct Prediction {
  std::size_t label = 0;
  std::vector<double> distribution;
};

inline void check_fit_inputs(const FeatureMatrix& x, const Labels& y, std::size_t num_classes) {
  if (x.rows() != y.size())
    throw LengthMismatch("feature rows (" + std::to_string(x.rows()) + ") != labels (" +
                         std::to_string(y.size()) + ")");
  if (x.rows() == 0) throw EmptyDataset("no training samples");
  if (num_classes == 0) throw ConfigError("num_classes must be positive");
  for (auto label : y)
    if (label >= num_classes) throw ConfigError("label index out of range");
}

inline void check_features(std::span<const double> x, std::size_t num_features) {
  if (x.size() != num_features)
    throw DimensionMismatch("expected " + std::to_string(num_features) + " features, got " +
                            std::to_string(x.size()));
}

/// Numerically stable softmax (max subtracted first).
inline std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  double mx = p[0];
  for (double s : p) mx = std::max(mx, s);
  double z = 0.0;
  for (auto& v : p) z += (v = std::exp(v - mx));
  for (auto& v : p) v /= z;
  return p;
}

/// Softmax cross-entropy averaged over rows of `scores` (n x C).
inline double mean_cross_entropy(const Matrix<double>& scores, const Labels& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto p = softmax(scores.row(i));
    total -= std::log(std::max(p[y[i]], 1e-12));
  }
  return total / static_cast<double>(scores.rows());
}

inline Matrix<double> transpose(const FeatureMatrix& x) {
  Matrix<double> t(x.cols(), x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) t(c, r) = x(r, c);
  return t;
}

}  // namespace parsent::classical
