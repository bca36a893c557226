#pragma once

// Synthetic score tables for exercising the greedy search.

#include <cmath>
#include <vector>

#include "parsent/rng.hpp"
#include "parsent/search.hpp"

namespace fixtures {

/// Peaks at epochs 10, batch 64, lr 1e-4, cross-entropy, Adam; the epochs
/// and batch axes interact so the table is not separable.
inline double reference_score(const parsent::neural::TrainConfig& c) {
  double s = 0;
  s -= std::abs(std::log10(static_cast<double>(c.epochs) / 10.0));
  s -= std::abs(std::log2(static_cast<double>(c.batch_size) / 64.0)) * 0.1;
  s -= std::abs(std::log10(c.learning_rate / 1e-4));
  s += c.optimizer == parsent::neural::Optimizer::Adam ? 0.5 : 0.0;
  if (c.epochs == 10 && c.batch_size == 64) s += 0.25;
  return s;
}

/// Bowl-shaped table with random centre, random per-axis curvature,
/// pairwise couplings and a little deterministic noise.
class SmoothTable {
 public:
  SmoothTable(std::uint64_t seed, std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    parsent::Rng rng(seed);
    for (auto n : sizes_) {
      centre_.push_back(rng.uniform() * static_cast<double>(n - 1));
      weight_.push_back(0.2 + rng.uniform());
    }
    coupling_ = 0.15 * (rng.uniform() - 0.5);
    salt_ = rng.below(1u << 30);
  }

  double operator()(const parsent::GridPoint& p) const {
    double s = 0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      const double d = static_cast<double>(p[a]) - centre_[a];
      s -= weight_[a] * d * d;
    }
    if (p.size() >= 2)
      s += coupling_ * (static_cast<double>(p[0]) - centre_[0]) * (static_cast<double>(p[1]) - centre_[1]);
    std::uint64_t h = salt_;
    for (auto v : p) h = h * 1315423911u + v + 1;
    return s + 1e-3 * static_cast<double>(h % 1000) / 1000.0;
  }

  const std::vector<std::size_t>& sizes() const { return sizes_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> centre_, weight_;
  double coupling_ = 0;
  std::uint64_t salt_ = 0;
};

}  // namespace fixtures
