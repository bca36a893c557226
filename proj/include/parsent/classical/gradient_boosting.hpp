#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "parsent/classical/cart.hpp"
#include "parsent/classical/common.hpp"

namespace parsent::classical {

struct BoostParams {
  std::size_t n_stages = 100;
  double learning_rate = 0.1;  // shrinkage
  std::size_t max_depth = 3;
  std::size_t min_samples_split = 2;

  bool operator==(const BoostParams&) const = default;
};

using RegressionTree = BinaryTree<double>;

/// Multinomial gradient boosting: per-class additive scores, softmax output.
struct BoostModel {
  std::vector<double> initial_scores;              // log class priors
  std::vector<std::vector<RegressionTree>> stages;  // stage x class
  BoostParams hyper;
  std::size_t num_features = 0;
  // Mean training cross-entropy before any stage, then after each stage.
  std::vector<double> train_loss;

  std::size_t num_classes() const noexcept { return initial_scores.size(); }

  bool operator==(const BoostModel&) const = default;
};

// Floor for classes absent from the training data.
inline constexpr double kMinPrior = 1e-12;

inline BoostModel gboost_fit(const FeatureMatrix& x, const Labels& y, std::size_t num_classes,
                             BoostParams hyper = {}) {
  check_fit_inputs(x, y, num_classes);
  if (hyper.n_stages < 1) throw ConfigError("n_stages must be >= 1");
  const std::size_t n = x.rows();

  BoostModel m;
  m.hyper = hyper;
  m.num_features = x.cols();
  std::vector<std::size_t> counts(num_classes, 0);
  for (auto c : y) ++counts[c];
  for (std::size_t c = 0; c < num_classes; ++c)
    m.initial_scores.push_back(
        std::log(std::max(static_cast<double>(counts[c]) / static_cast<double>(n), kMinPrior)));

  Matrix<double> scores(n, num_classes);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < num_classes; ++c) scores(i, c) = m.initial_scores[c];
  m.train_loss.push_back(mean_cross_entropy(scores, y));

  const auto xt = transpose(x);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const GrowParams grow{hyper.max_depth, hyper.min_samples_split, 0};
  std::vector<double> residual(n);
  Matrix<double> probs(n, num_classes);

  for (std::size_t stage = 0; stage < hyper.n_stages; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = softmax(scores.row(i));
      std::copy(p.begin(), p.end(), probs.row(i).begin());
    }
    std::vector<RegressionTree> trees;
    trees.reserve(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c) {
      for (std::size_t i = 0; i < n; ++i) residual[i] = (y[i] == c ? 1.0 : 0.0) - probs(i, c);
      VarianceCriterion crit{residual};
      trees.push_back(grow_tree(xt, crit, rows, grow));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto xi = x.row(i);
      for (std::size_t c = 0; c < num_classes; ++c)
        scores(i, c) += hyper.learning_rate * trees[c].leaf_for(xi).payload;
    }
    m.stages.push_back(std::move(trees));
    m.train_loss.push_back(mean_cross_entropy(scores, y));
  }
  return m;
}

inline std::vector<double> gboost_scores(const BoostModel& m, std::span<const double> x) {
  std::vector<double> s(m.initial_scores);
  for (const auto& stage : m.stages)
    for (std::size_t c = 0; c < s.size(); ++c)
      s[c] += m.hyper.learning_rate * stage[c].leaf_for(x).payload;
  return s;
}

inline Prediction gboost_predict(const BoostModel& m, std::span<const double> x) {
  check_features(x, m.num_features);
  Prediction p;
  p.distribution = softmax(gboost_scores(m, x));
  p.label = argmax(p.distribution);
  return p;
}

}  // namespace parsent::classical
