#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "parsent/classical/cart.hpp"
#include "parsent/classical/common.hpp"

namespace parsent::classical {

struct TreeParams {
  std::size_t max_depth = std::numeric_limits<std::size_t>::max();
  std::size_t min_samples_split = 2;

  bool operator==(const TreeParams&) const = default;
};

/// CART classification tree. Every node keeps the class counts of the
/// training samples that reached it; leaves predict their majority class.
struct TreeModel {
  BinaryTree<std::vector<std::size_t>> tree;
  std::size_t num_classes = 0;
  std::size_t num_features = 0;
  TreeParams params;

  bool operator==(const TreeModel&) const = default;
};

inline Prediction leaf_prediction(const std::vector<std::size_t>& counts) {
  Prediction p;
  p.distribution.resize(counts.size());
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  for (std::size_t c = 0; c < counts.size(); ++c)
    p.distribution[c] = total > 0 ? static_cast<double>(counts[c]) / total : 0.0;
  p.label = argmax(counts);
  return p;
}

/// Grows on the rows in `samples` using a precomputed feature-major matrix.
inline TreeModel tree_fit_transposed(const Matrix<double>& xt, const Labels& y,
                                     std::size_t num_classes, std::vector<std::size_t> samples,
                                     TreeParams params, std::size_t max_features = 0,
                                     Rng* rng = nullptr) {
  GiniCriterion crit{y, num_classes};
  GrowParams grow{params.max_depth, params.min_samples_split, max_features};
  return {grow_tree(xt, crit, std::move(samples), grow, rng), num_classes, xt.rows(), params};
}

inline TreeModel tree_fit(const FeatureMatrix& x, const Labels& y, std::size_t num_classes,
                          TreeParams params = {}) {
  check_fit_inputs(x, y, num_classes);
  std::vector<std::size_t> samples(x.rows());
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  return tree_fit_transposed(transpose(x), y, num_classes, std::move(samples), params);
}

inline Prediction tree_predict(const TreeModel& model, std::span<const double> x) {
  check_features(x, model.num_features);
  return leaf_prediction(model.tree.leaf_for(x).payload);
}

}  // namespace parsent::classical
