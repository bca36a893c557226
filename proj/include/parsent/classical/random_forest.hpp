#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "parsent/classical/tree.hpp"
#include "parsent/rng.hpp"

namespace parsent::classical {

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t features_per_split = 0;  // 0 selects ceil(sqrt(V))
  bool bootstrap = true;
  std::uint64_t seed = 0;
  TreeParams tree;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::size_t features_per_split = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t num_classes = 0;
  std::size_t num_features = 0;

  bool operator==(const ForestModel&) const = default;
};

/// Bagged CART trees. Tree t draws its bootstrap rows and per-node feature
/// subsets from substream (seed, t), so results do not depend on build order.
inline ForestModel forest_fit(const FeatureMatrix& x, const Labels& y, std::size_t num_classes,
                              ForestParams params = {}) {
  check_fit_inputs(x, y, num_classes);
  if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  const std::size_t v = x.cols();
  std::size_t fps = params.features_per_split;
  if (fps == 0) fps = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(v))));
  fps = std::min(std::max<std::size_t>(fps, 1), std::max<std::size_t>(v, 1));

  ForestModel model;
  model.features_per_split = fps;
  model.bootstrap = params.bootstrap;
  model.seed = params.seed;
  model.num_classes = num_classes;
  model.num_features = v;

  const auto xt = transpose(x);
  const std::size_t n = x.rows();
  model.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(substream_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees.push_back(
        tree_fit_transposed(xt, y, num_classes, std::move(rows), params.tree, fps, &rng));
  }
  return model;
}

/// Hard majority vote; distribution holds each class's vote share.
inline Prediction forest_predict(const ForestModel& model, std::span<const double> x) {
  check_features(x, model.num_features);
  std::vector<std::size_t> votes(model.num_classes, 0);
  for (const auto& tree : model.trees) ++votes[tree_predict(tree, x).label];
  Prediction p;
  p.label = argmax(votes);
  p.distribution.resize(votes.size());
  for (std::size_t c = 0; c < votes.size(); ++c)
    p.distribution[c] = static_cast<double>(votes[c]) / static_cast<double>(model.trees.size());
  return p;
}

}  // namespace parsent::classical
