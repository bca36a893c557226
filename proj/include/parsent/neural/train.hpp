#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "parsent/neural/cnn_lstm.hpp"
#include "parsent/neural/optimizer.hpp"

namespace parsent::neural {

enum class Optimizer { Adam, SGD };
enum class Loss { CategoricalCrossEntropy };

inline std::string to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }
inline std::string to_string(Loss) { return "categorical_crossentropy"; }

inline Optimizer parse_optimizer(const std::string& s) {
  if (s == "adam" || s == "Adam") return Optimizer::Adam;
  if (s == "sgd" || s == "SGD") return Optimizer::SGD;
  throw ConfigError("unknown optimizer '" + s + "'");
}

inline Loss parse_loss(const std::string& s) {
  if (s == "categorical_crossentropy" || s == "categorical cross-entropy" || s == "cross_entropy")
    return Loss::CategoricalCrossEntropy;
  throw ConfigError("unsupported loss '" + s + "'");
}

/// Defaults are the selected configuration: 10 epochs, batch 64,
/// learning rate 1e-4, cross-entropy, Adam.
struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  Loss loss = Loss::CategoricalCrossEntropy;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
      throw ConfigError("learning_rate must be finite and >= 0");
  }

  bool operator==(const TrainConfig&) const = default;
};

template <typename Real>
struct TrainResult {
  CnnLstmModel<Real> model;
  std::vector<double> epoch_loss;  // mean training loss per epoch (dropout on)
};

/// Seeded shuffled-minibatch training. One RNG stream (cfg.seed) drives both
/// the per-epoch shuffles and the dropout masks, in a fixed order.
template <typename Real>
TrainResult<Real> train(CnnLstmModel<Real> model, const SequenceBatch<Real>& data,
                        const TrainConfig& cfg) {
  cfg.validate();
  if (data.labels.size() != data.size()) throw LengthMismatch("training data needs labels");
  if (data.size() == 0) throw EmptyDataset("no training sequences");
  detail::check_batch(model, data);
  for (auto y : data.labels)
    if (y >= model.shape().classes) throw ConfigError("label index out of range for model");

  Rng rng(cfg.seed);
  AdamState<Real> adam(model.params().size());
  TrainResult<Real> result{std::move(model), {}};
  auto& m = result.model;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
      const auto batch = data.subset(idx);
      const auto fwd = forward(m, batch, true, &rng);
      loss_sum += static_cast<double>(mean_loss(fwd, batch.labels)) * static_cast<double>(idx.size());
      const auto grad = backward(m, batch, fwd);
      if (cfg.optimizer == Optimizer::Adam)
        adam_step<Real>(m.params(), grad, adam, cfg.learning_rate);
      else
        sgd_step<Real>(m.params(), grad, cfg.learning_rate);
    }
    const double epoch_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss))
      throw Error(ErrorKind::Numeric, "training diverged: non-finite loss at epoch " +
                                          std::to_string(epoch + 1));
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

}  // namespace parsent::neural
