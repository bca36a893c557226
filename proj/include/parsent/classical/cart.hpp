#pragma once

// Greedy CART growth shared by the classification tree, the random forest
// and the boosting stages. A criterion supplies per-node statistics, a split
// score (lower is better) and the leaf payload.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "parsent/classical/common.hpp"
#include "parsent/rng.hpp"

namespace parsent::classical {

template <typename Payload>
struct TreeNode {
  // feature < 0 marks a leaf
  long feature = -1;
  double threshold = 0.0;
  long left = -1;
  long right = -1;
  Payload payload{};

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

template <typename Payload>
struct BinaryTree {
  std::vector<TreeNode<Payload>> nodes;  // nodes[0] is the root

  const TreeNode<Payload>& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                        : n.right);
    }
    return nodes[i];
  }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].is_leaf()) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  bool operator==(const BinaryTree&) const = default;
};

struct GrowParams {
  std::size_t max_depth = std::numeric_limits<std::size_t>::max();
  std::size_t min_samples_split = 2;
  // Non-constant features examined per node; 0 means all of them.
  std::size_t max_features = 0;
};

/// Weighted Gini impurity over class counts.
struct GiniCriterion {
  using Stats = std::vector<double>;  // per-class counts
  using Payload = std::vector<std::size_t>;

  const Labels& y;
  std::size_t num_classes;

  Stats empty() const { return Stats(num_classes, 0.0); }
  void add(Stats& s, std::size_t sample) const { s[y[sample]] += 1.0; }
  static void add(Stats& s, const Stats& o) {
    for (std::size_t c = 0; c < s.size(); ++c) s[c] += o[c];
  }
  static Stats minus(const Stats& a, const Stats& b) {
    Stats r(a);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] -= b[c];
    return r;
  }
  static double count(const Stats& s) {
    double n = 0.0;
    for (double v : s) n += v;
    return n;
  }
  static double side_impurity(const Stats& s, double n) {
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double v : s) sq += v * v;
    return n - sq / n;  // n * gini
  }
  static double score(const Stats& left, const Stats& right) {
    const double nl = count(left), nr = count(right);
    return (side_impurity(left, nl) + side_impurity(right, nr)) / (nl + nr);
  }
  static bool pure(const Stats& s) {
    return std::count_if(s.begin(), s.end(), [](double v) { return v > 0.0; }) <= 1;
  }
  static Payload payload(const Stats& s) {
    Payload p(s.size());
    for (std::size_t c = 0; c < s.size(); ++c) p[c] = static_cast<std::size_t>(s[c]);
    return p;
  }
};

/// Variance reduction for real-valued targets; leaf payload is the mean.
struct VarianceCriterion {
  struct Stats {
    double sum = 0.0;
    double sum_sq = 0.0;
    double n = 0.0;
  };
  using Payload = double;

  const std::vector<double>& target;

  Stats empty() const { return {}; }
  void add(Stats& s, std::size_t sample) const {
    const double v = target[sample];
    s.sum += v;
    s.sum_sq += v * v;
    s.n += 1.0;
  }
  static void add(Stats& s, const Stats& o) {
    s.sum += o.sum;
    s.sum_sq += o.sum_sq;
    s.n += o.n;
  }
  static Stats minus(const Stats& a, const Stats& b) {
    return {a.sum - b.sum, a.sum_sq - b.sum_sq, a.n - b.n};
  }
  static double score(const Stats& left, const Stats& right) {
    // Total SSE minus a constant: -(sum_l^2/n_l + sum_r^2/n_r).
    return -(left.sum * left.sum / left.n + right.sum * right.sum / right.n);
  }
  static bool pure(const Stats& s) {
    if (s.n <= 1.0) return true;
    const double mean = s.sum / s.n;
    return s.sum_sq / s.n - mean * mean <= 1e-15 * std::max(1.0, s.sum_sq / s.n);
  }
  static Payload payload(const Stats& s) { return s.n > 0.0 ? s.sum / s.n : 0.0; }
};

namespace detail {

struct SplitCandidate {
  double score = std::numeric_limits<double>::infinity();
  std::size_t feature = 0;
  double threshold = 0.0;
  bool valid = false;
};

// Accepts `cand` when its score is lower than `best` beyond rounding noise,
// or equal within noise and earlier in (feature, threshold) order.
inline bool better(const SplitCandidate& cand, const SplitCandidate& best) {
  if (!best.valid) return true;
  const double tol = 1e-12 * std::max(1.0, std::abs(best.score));
  if (cand.score < best.score - tol) return true;
  if (cand.score > best.score + tol) return false;
  if (cand.feature != best.feature) return cand.feature < best.feature;
  return cand.threshold < best.threshold;
}

template <typename Criterion>
class CartBuilder {
 public:
  using Stats = typename Criterion::Stats;
  using Payload = typename Criterion::Payload;

  CartBuilder(const Matrix<double>& xt, const Criterion& crit, GrowParams params, Rng* rng)
      : xt_(xt), crit_(crit), params_(params), rng_(rng) {}

  BinaryTree<Payload> grow(std::vector<std::size_t> samples) {
    tree_.nodes.clear();
    grow_node(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  long grow_node(std::vector<std::size_t> samples, std::size_t depth) {
    Stats stats = crit_.empty();
    for (auto s : samples) crit_.add(stats, s);
    const long id = static_cast<long>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes[id].payload = Criterion::payload(stats);

    if (depth >= params_.max_depth || samples.size() < params_.min_samples_split ||
        samples.size() < 2 || Criterion::pure(stats))
      return id;

    const auto split = best_split(samples, stats);
    if (!split.valid) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples) (xt_(split.feature, s) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    tree_.nodes[id].feature = static_cast<long>(split.feature);
    tree_.nodes[id].threshold = split.threshold;
    const long l = grow_node(std::move(left), depth + 1);
    const long r = grow_node(std::move(right), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  SplitCandidate best_split(const std::vector<std::size_t>& samples, const Stats& total) {
    const std::size_t num_features = xt_.rows();
    const bool sampled = rng_ != nullptr && params_.max_features > 0 &&
                         params_.max_features < num_features;
    SplitCandidate best;
    if (!sampled) {
      for (std::size_t f = 0; f < num_features; ++f) evaluate(f, samples, total, best);
      return best;
    }
    // Draw features without replacement until max_features non-constant ones
    // have been examined (or the pool runs out).
    if (pool_.size() != num_features) {
      pool_.resize(num_features);
    }
    for (std::size_t f = 0; f < num_features; ++f) pool_[f] = f;
    std::size_t examined = 0;
    for (std::size_t drawn = 0; drawn < num_features && examined < params_.max_features; ++drawn) {
      const auto j = drawn + static_cast<std::size_t>(rng_->below(num_features - drawn));
      std::swap(pool_[drawn], pool_[j]);
      if (evaluate(pool_[drawn], samples, total, best)) ++examined;
    }
    return best;
  }

  // Scans every midpoint threshold of feature `f`. Returns false when the
  // feature is constant on this node.
  bool evaluate(std::size_t f, const std::vector<std::size_t>& samples, const Stats& total,
                SplitCandidate& best) {
    const auto col = xt_.row(f);
    neg_.clear();
    pos_.clear();
    Stats nonzero = crit_.empty();
    std::size_t zeros = 0;
    for (auto s : samples) {
      const double v = col[s];
      if (v == 0.0) {
        ++zeros;
        continue;
      }
      (v < 0.0 ? neg_ : pos_).push_back({v, s});
      crit_.add(nonzero, s);
    }
    const std::size_t distinct_hint = (zeros > 0) + neg_.size() + pos_.size();
    if (distinct_hint < 2) return false;
    std::sort(neg_.begin(), neg_.end());
    std::sort(pos_.begin(), pos_.end());

    // Ordered groups of equal values: negatives, the zero block, positives.
    Stats left = crit_.empty();
    std::size_t left_n = 0;
    bool have_prev = false;
    double prev = 0.0;
    bool any_boundary = false;

    auto boundary = [&](double next_value) {
      if (have_prev && left_n > 0 && left_n < samples.size()) {
        any_boundary = true;
        SplitCandidate cand;
        cand.valid = true;
        cand.feature = f;
        cand.threshold = (prev + next_value) / 2.0;
        if (cand.threshold >= next_value) cand.threshold = prev;
        cand.score = Criterion::score(left, Criterion::minus(total, left));
        if (better(cand, best)) best = cand;
      }
    };
    auto consume = [&](const std::vector<std::pair<double, std::size_t>>& run) {
      std::size_t i = 0;
      while (i < run.size()) {
        const double v = run[i].first;
        boundary(v);
        while (i < run.size() && run[i].first == v) {
          crit_.add(left, run[i].second);
          ++left_n;
          ++i;
        }
        have_prev = true;
        prev = v;
      }
    };
    consume(neg_);
    if (zeros > 0) {
      boundary(0.0);
      Criterion::add(left, Criterion::minus(total, nonzero));
      left_n += zeros;
      have_prev = true;
      prev = 0.0;
    }
    consume(pos_);
    return any_boundary;
  }

  const Matrix<double>& xt_;
  const Criterion& crit_;
  GrowParams params_;
  Rng* rng_;
  BinaryTree<Payload> tree_;
  std::vector<std::size_t> pool_;
  std::vector<std::pair<double, std::size_t>> neg_, pos_;
};

}  // namespace detail

/// Grows a tree over `samples` (row indices of the untransposed data, may
/// repeat). `xt` is the feature-major (transposed) design matrix.
template <typename Criterion>
BinaryTree<typename Criterion::Payload> grow_tree(const Matrix<double>& xt, const Criterion& crit,
                                                  std::vector<std::size_t> samples,
                                                  GrowParams params, Rng* rng = nullptr) {
  detail::CartBuilder<Criterion> builder(xt, crit, params, rng);
  return builder.grow(std::move(samples));
}

}  // namespace parsent::classical
