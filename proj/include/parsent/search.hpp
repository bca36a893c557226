#pragma once

// Seeded train/test splitting and greedy (coordinate-wise) hyperparameter
// search over a discrete grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "parsent/error.hpp"
#include "parsent/neural/train.hpp"
#include "parsent/rng.hpp"

namespace parsent {

// ---------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_fraction = 0.7;
  bool stratified = true;
  std::uint64_t seed = 0;
};

/// Row indices of each side, ascending.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

namespace detail {

inline std::size_t floor_share(std::size_t n, double fraction) {
  // The nudge keeps e.g. 10 * 0.7 from landing just under 7.
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 1e-9));
}

}  // namespace detail

/// Seeded shuffle split with |train| = floor(n * train_fraction). Stratified
/// mode gives each class its floor share and hands the remaining slots to
/// the classes with the largest fractional remainders (lowest index on ties).
inline SplitIndices split(const std::vector<std::size_t>& labels, std::size_t num_classes,
                          const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0, 1)");
  const std::size_t n = labels.size();
  const std::size_t n_train = detail::floor_share(n, spec.train_fraction);
  Rng rng(spec.seed);
  std::vector<char> in_train(n, 0);

  if (!spec.stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t k = 0; k < n_train; ++k) in_train[order[k]] = 1;
  } else {
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] >= num_classes) throw ConfigError("label index out of range");
      by_class[labels[i]].push_back(i);
    }
    for (std::size_t c = 0; c < num_classes; ++c)
      if (by_class[c].empty()) throw EmptyClass("class " + std::to_string(c) + " has no samples");
    std::vector<std::size_t> quota(num_classes);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      const double exact = static_cast<double>(by_class[c].size()) * spec.train_fraction;
      quota[c] = detail::floor_share(by_class[c].size(), spec.train_fraction);
      assigned += quota[c];
      remainders.push_back({exact - static_cast<double>(quota[c]), c});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
    for (std::size_t k = 0; assigned < n_train && k < remainders.size(); ++k) {
      const auto c = remainders[k].second;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
      rng.shuffle(by_class[c]);
      for (std::size_t k = 0; k < quota[c]; ++k) in_train[by_class[c][k]] = 1;
    }
  }

  SplitIndices out;
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? out.train : out.test).push_back(i);
  return out;
}

/// Holds out `fraction` of `rows` for validation using the split rules above.
/// Returns (fit rows, validation rows) as subsets of `rows`.
inline SplitIndices carve_validation(const std::vector<std::size_t>& rows,
                                     const std::vector<std::size_t>& labels,
                                     std::size_t num_classes, double fraction, std::uint64_t seed,
                                     bool stratified = true) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must be in (0, 1)");
  std::vector<std::size_t> sub_labels;
  sub_labels.reserve(rows.size());
  for (auto r : rows) sub_labels.push_back(labels[r]);
  const auto s = split(sub_labels, num_classes, {1.0 - fraction, stratified, seed});
  SplitIndices out;
  for (auto i : s.train) out.train.push_back(rows[i]);
  for (auto i : s.test) out.test.push_back(rows[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Greedy search

/// A point of a discrete grid: one value index per axis.
using GridPoint = std::vector<std::size_t>;

struct SearchStep {
  GridPoint point;
  double score = 0.0;
  std::size_t pass = 0;  // 1-based
  std::size_t axis = 0;
};

struct SearchOutcome {
  GridPoint best;
  double best_score = 0.0;
  std::vector<SearchStep> trace;  // one entry per distinct evaluation
  std::size_t passes = 0;
  bool converged = false;  // the last pass changed nothing
};

inline constexpr std::size_t kMaxSearchPasses = 3;

/// Coordinate ascent over a grid with `axis_sizes[a]` values on axis a.
/// Starts at the first value of every axis and sweeps axes in `axis_order`;
/// each sweep tries every value of the axis with the others fixed and keeps
/// the best (earliest value on ties). Stops after a pass with no change or
/// after `max_passes`. Each distinct point is evaluated once.
inline SearchOutcome greedy_search_indices(const std::vector<std::size_t>& axis_sizes,
                                           const std::function<double(const GridPoint&)>& evaluate,
                                           std::vector<std::size_t> axis_order = {},
                                           std::size_t max_passes = kMaxSearchPasses) {
  for (auto n : axis_sizes)
    if (n == 0) throw ConfigError("search grid has an empty axis");
  if (axis_order.empty()) {
    axis_order.resize(axis_sizes.size());
    std::iota(axis_order.begin(), axis_order.end(), std::size_t{0});
  }
  for (auto a : axis_order)
    if (a >= axis_sizes.size()) throw ConfigError("axis order names an unknown axis");

  SearchOutcome out;
  std::map<GridPoint, double> seen;
  GridPoint current(axis_sizes.size(), 0);
  auto score_of = [&](const GridPoint& p, std::size_t pass, std::size_t axis) {
    if (auto it = seen.find(p); it != seen.end()) return it->second;
    const double s = evaluate(p);
    seen.emplace(p, s);
    out.trace.push_back({p, s, pass, axis});
    return s;
  };

  for (std::size_t pass = 1; pass <= max_passes; ++pass) {
    out.passes = pass;
    bool changed = false;
    for (auto axis : axis_order) {
      std::size_t best_value = 0;
      double best = 0.0;
      for (std::size_t v = 0; v < axis_sizes[axis]; ++v) {
        GridPoint p = current;
        p[axis] = v;
        const double s = score_of(p, pass, axis);
        if (v == 0 || s > best) {
          best = s;
          best_value = v;
        }
      }
      if (best_value != current[axis]) {
        current[axis] = best_value;
        changed = true;
      }
    }
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  out.best = current;
  out.best_score = seen.at(current);
  return out;
}

/// Hyperparameter grid for the neural classifier. Axis order: epochs,
/// batch size, learning rate, loss, optimizer.
struct SearchGrid {
  std::vector<std::size_t> epochs{5, 10, 20, 30, 50, 100};
  std::vector<std::size_t> batch_size{2, 4, 8, 16, 32, 64};
  std::vector<double> learning_rate{0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001};
  std::vector<neural::Loss> loss{neural::Loss::CategoricalCrossEntropy};
  std::vector<neural::Optimizer> optimizer{neural::Optimizer::Adam, neural::Optimizer::SGD};

  static constexpr std::size_t kAxes = 5;
  static constexpr std::array<const char*, kAxes> kAxisNames = {"epochs", "batch_size",
                                                                "learning_rate", "loss", "optimizer"};

  std::vector<std::size_t> axis_sizes() const {
    return {epochs.size(), batch_size.size(), learning_rate.size(), loss.size(), optimizer.size()};
  }

  void validate() const {
    for (auto n : axis_sizes())
      if (n == 0) throw ConfigError("search grid axis is empty");
  }

  neural::TrainConfig at(const GridPoint& p, std::uint64_t seed = 0) const {
    neural::TrainConfig cfg;
    cfg.epochs = epochs.at(p.at(0));
    cfg.batch_size = batch_size.at(p.at(1));
    cfg.learning_rate = learning_rate.at(p.at(2));
    cfg.loss = loss.at(p.at(3));
    cfg.optimizer = optimizer.at(p.at(4));
    cfg.seed = seed;
    return cfg;
  }
};

struct GreedyResult {
  neural::TrainConfig best;
  double best_score = 0.0;
  std::vector<std::pair<neural::TrainConfig, SearchStep>> trace;
  std::size_t passes = 0;
  bool converged = false;
};

/// Greedy search where each grid point is trained with `train_fn` and the
/// trained model scored with `score_fn` (higher is better).
template <typename Model>
GreedyResult greedy_search(const SearchGrid& grid,
                                  const std::function<Model(const neural::TrainConfig&)>& train_fn,
                                  const std::function<double(const Model&)>& score_fn,
                                  std::vector<std::size_t> axis_order = {},
                                  std::uint64_t seed = 0) {
  grid.validate();
  const auto outcome = greedy_search_indices(
      grid.axis_sizes(),
      [&](const GridPoint& p) { return score_fn(train_fn(grid.at(p, seed))); },
      std::move(axis_order));
  GreedyResult r;
  r.best = grid.at(outcome.best, seed);
  r.best_score = outcome.best_score;
  r.passes = outcome.passes;
  r.converged = outcome.converged;
  for (const auto& step : outcome.trace) r.trace.push_back({grid.at(step.point, seed), step});
  return r;
}

inline nlohmann::json train_config_to_json(const neural::TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"loss", neural::to_string(c.loss)},
          {"optimizer", neural::to_string(c.optimizer)}};
}

/// [{config, score, pass, axis}, ...]
inline nlohmann::json trace_to_json(const GreedyResult& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [cfg, step] : r.trace)
    out.push_back({{"config", train_config_to_json(cfg)},
                   {"score", step.score},
                   {"pass", step.pass},
                   {"axis", SearchGrid::kAxisNames[step.axis]}});
  return out;
}

}  // namespace parsent
