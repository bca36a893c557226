#pragma once

// Forward building blocks of the CNN-LSTM: valid Conv1D + ReLU, max pooling,
// LSTM, spatial dropout, dense softmax and cross-entropy. Layer parameters
// are non-owning views into a model's flat parameter vector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parsent/error.hpp"
#include "parsent/matrix.hpp"
#include "parsent/rng.hpp"

namespace parsent::neural {

/// Conv1D parameters. weights are [filters][width][in_dim], row-major.
template <typename Real>
struct Conv1DLayer {
  std::size_t filters = 0;
  std::size_t width = 0;
  std::size_t in_dim = 0;
  std::span<const Real> weights;
  std::span<const Real> biases;

  Real weight(std::size_t f, std::size_t j, std::size_t i) const {
    return weights[(f * width + j) * in_dim + i];
  }
};

/// Gate blocks in storage order.
enum Gate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };
inline constexpr std::size_t kNumGates = 4;

/// LSTM parameters. Each gate has a [hidden][hidden + in_dim] weight block
/// acting on the concatenation [hs_{t-1}, x_t], plus a [hidden] bias.
template <typename Real>
struct LSTMCell {
  std::size_t hidden = 0;
  std::size_t in_dim = 0;
  std::span<const Real> weights;  // kNumGates * hidden * (hidden + in_dim)
  std::span<const Real> biases;   // kNumGates * hidden

  std::size_t concat_dim() const noexcept { return hidden + in_dim; }
  Real weight(std::size_t gate, std::size_t h, std::size_t col) const {
    return weights[(gate * hidden + h) * concat_dim() + col];
  }
  Real bias(std::size_t gate, std::size_t h) const { return biases[gate * hidden + h]; }
};

/// Dense output layer, weights [classes][in_dim].
template <typename Real>
struct DenseLayer {
  std::size_t classes = 0;
  std::size_t in_dim = 0;
  std::span<const Real> weights;
  std::span<const Real> biases;
};

template <typename Real>
Real sigmoid(Real x) {
  using std::exp;
  if (x >= Real(0)) return Real(1) / (Real(1) + exp(-x));
  const Real e = exp(x);
  return e / (Real(1) + e);
}

/// Valid convolution followed by ReLU; output is [T - width + 1][filters].
template <typename Real>
Matrix<Real> conv1d_forward(const Matrix<Real>& seq, const Conv1DLayer<Real>& layer) {
  if (seq.cols() != layer.in_dim)
    throw DimensionMismatch("conv input has " + std::to_string(seq.cols()) + " channels, expected " +
                            std::to_string(layer.in_dim));
  if (seq.rows() < layer.width)
    throw SequenceTooShort("sequence length " + std::to_string(seq.rows()) +
                           " is shorter than kernel width " + std::to_string(layer.width));
  const std::size_t out_len = seq.rows() - layer.width + 1;
  Matrix<Real> out(out_len, layer.filters);
  for (std::size_t t = 0; t < out_len; ++t)
    for (std::size_t f = 0; f < layer.filters; ++f) {
      Real acc = layer.biases[f];
      for (std::size_t j = 0; j < layer.width; ++j) {
        const auto x = seq.row(t + j);
        const Real* w = layer.weights.data() + (f * layer.width + j) * layer.in_dim;
        for (std::size_t i = 0; i < layer.in_dim; ++i) acc += w[i] * x[i];
      }
      out(t, f) = acc > Real(0) ? acc : Real(0);
    }
  return out;
}

/// Result of max pooling plus the source row of every pooled value.
template <typename Real>
struct PoolResult {
  Matrix<Real> values;
  std::vector<std::size_t> source;  // [rows * channels], row index in the input
};

/// Non-overlapping max pooling; a trailing partial window is dropped and the
/// first maximum in a window wins.
template <typename Real>
PoolResult<Real> maxpool1d_indexed(const Matrix<Real>& x, std::size_t pool_size) {
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  if (x.rows() < pool_size)
    throw SequenceTooShort("pooling input length " + std::to_string(x.rows()) +
                           " is shorter than pool size " + std::to_string(pool_size));
  const std::size_t out_len = x.rows() / pool_size;
  PoolResult<Real> r{Matrix<Real>(out_len, x.cols()), std::vector<std::size_t>(out_len * x.cols())};
  for (std::size_t t = 0; t < out_len; ++t)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      std::size_t best = t * pool_size;
      for (std::size_t k = 1; k < pool_size; ++k)
        if (x(t * pool_size + k, c) > x(best, c)) best = t * pool_size + k;
      r.values(t, c) = x(best, c);
      r.source[t * x.cols() + c] = best;
    }
  return r;
}

template <typename Real>
Matrix<Real> maxpool1d(const Matrix<Real>& x, std::size_t pool_size = 2) {
  return maxpool1d_indexed(x, pool_size).values;
}

/// Per-step LSTM activations kept for backpropagation.
template <typename Real>
struct LstmTrace {
  Matrix<Real> gates;   // [T][4 * hidden], post-activation, gate-major
  Matrix<Real> cells;   // [T][hidden]
  Matrix<Real> hidden;  // [T][hidden]
};

/// Runs the cell from zero state over every row of `seq`.
template <typename Real>
LstmTrace<Real> lstm_forward_trace(const Matrix<Real>& seq, const LSTMCell<Real>& cell) {
  using std::tanh;
  if (seq.cols() != cell.in_dim)
    throw DimensionMismatch("lstm input has " + std::to_string(seq.cols()) + " channels, expected " +
                            std::to_string(cell.in_dim));
  const std::size_t T = seq.rows(), H = cell.hidden, D = cell.concat_dim();
  LstmTrace<Real> tr{Matrix<Real>(T, kNumGates * H), Matrix<Real>(T, H), Matrix<Real>(T, H)};
  std::vector<Real> z(D, Real(0));
  std::vector<Real> c_prev(H, Real(0));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t h = 0; h < H; ++h) z[h] = t == 0 ? Real(0) : tr.hidden(t - 1, h);
    for (std::size_t i = 0; i < cell.in_dim; ++i) z[H + i] = seq(t, i);
    auto g = tr.gates.row(t);
    for (std::size_t gate = 0; gate < kNumGates; ++gate)
      for (std::size_t h = 0; h < H; ++h) {
        Real a = cell.bias(gate, h);
        const Real* w = cell.weights.data() + (gate * H + h) * D;
        for (std::size_t k = 0; k < D; ++k) a += w[k] * z[k];
        g[gate * H + h] = gate == kCandidate ? tanh(a) : sigmoid(a);
      }
    for (std::size_t h = 0; h < H; ++h) {
      const Real c = g[kForget * H + h] * c_prev[h] + g[kInput * H + h] * g[kCandidate * H + h];
      tr.cells(t, h) = c;
      tr.hidden(t, h) = g[kOutput * H + h] * tanh(c);
      c_prev[h] = c;
    }
  }
  return tr;
}

/// All hidden states [T][hidden], zero initial state.
template <typename Real>
Matrix<Real> lstm_forward(const Matrix<Real>& seq, const LSTMCell<Real>& cell) {
  return lstm_forward_trace(seq, cell).hidden;
}

/// Draws the keep/drop decision of each channel: one uniform draw per
/// channel in order, dropped when the draw is below `rate`.
inline std::vector<bool> draw_channel_mask(std::size_t channels, double rate, Rng& rng) {
  std::vector<bool> keep(channels, true);
  if (rate <= 0.0) return keep;
  for (std::size_t c = 0; c < channels; ++c) keep[c] = rng.uniform() >= rate;
  return keep;
}

template <typename Real>
Matrix<Real> apply_channel_mask(const Matrix<Real>& x, const std::vector<bool>& keep, double rate) {
  Matrix<Real> out(x.rows(), x.cols());
  const Real scale = Real(1) / (Real(1) - static_cast<Real>(rate));
  for (std::size_t t = 0; t < x.rows(); ++t)
    for (std::size_t c = 0; c < x.cols(); ++c) out(t, c) = keep[c] ? x(t, c) * scale : Real(0);
  return out;
}

/// Spatial dropout: zeroes whole channels across all time steps and scales
/// survivors by 1/(1-rate). Identity when not training.
template <typename Real>
Matrix<Real> spatial_dropout(const Matrix<Real>& x, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  return apply_channel_mask(x, draw_channel_mask(x.cols(), rate, rng), rate);
}

/// softmax(W h + b) with the maximum logit subtracted first.
template <typename Real>
std::vector<Real> dense_softmax(std::span<const Real> h, const DenseLayer<Real>& dense) {
  using std::exp;
  if (h.size() != dense.in_dim)
    throw DimensionMismatch("dense input has " + std::to_string(h.size()) + " values, expected " +
                            std::to_string(dense.in_dim));
  std::vector<Real> logits(dense.classes);
  for (std::size_t c = 0; c < dense.classes; ++c) {
    Real a = dense.biases[c];
    for (std::size_t k = 0; k < dense.in_dim; ++k) a += dense.weights[c * dense.in_dim + k] * h[k];
    logits[c] = a;
  }
  const Real mx = *std::max_element(logits.begin(), logits.end());
  Real z(0);
  for (auto& l : logits) z += (l = exp(l - mx));
  for (auto& l : logits) l /= z;
  return logits;
}

inline constexpr double kProbFloor = 1e-12;

/// -log p[label], with p clamped to at least 1e-12.
template <typename Real>
Real cross_entropy(std::span<const Real> probs, std::size_t label) {
  using std::log;
  return -log(std::max(probs[label], static_cast<Real>(kProbFloor)));
}

}  // namespace parsent::neural
