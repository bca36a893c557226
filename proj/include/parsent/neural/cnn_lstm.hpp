#pragma once

// CNN-LSTM text classifier: Conv1D(ReLU) -> MaxPool1D -> LSTM -> spatial
// dropout -> dense softmax, with exact backpropagation through every layer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parsent/neural/layers.hpp"
#include "parsent/vectorize.hpp"

namespace parsent::neural {

/// Layer sizes. Defaults: 32 filters of width 3, pool 2, 64 hidden units,
/// spatial dropout 0.1.
struct ModelShape {
  std::size_t input_dim = 0;
  std::size_t kernel_width = 3;
  std::size_t filters = 32;
  std::size_t pool_size = 2;
  std::size_t hidden = 64;
  std::size_t classes = 0;
  double dropout_rate = 0.1;

  void validate() const {
    if (input_dim < 1) throw ConfigError("input_dim must be >= 1");
    if (kernel_width < 1) throw ConfigError("kernel_width must be >= 1");
    if (filters < 1) throw ConfigError("filters must be >= 1");
    if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
    if (hidden < 1) throw ConfigError("hidden must be >= 1");
    if (classes < 1) throw ConfigError("classes must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw ConfigError("dropout_rate must be in [0, 1)");
  }

  /// Shortest padded sequence the layer chain accepts.
  std::size_t min_sequence_length() const { return kernel_width + pool_size - 1; }

  bool operator==(const ModelShape&) const = default;
};

/// Offsets of each parameter block inside the flat parameter vector.
struct ParamLayout {
  std::size_t conv_w = 0, conv_b = 0, lstm_w = 0, lstm_b = 0, dense_w = 0, dense_b = 0, total = 0;

  explicit ParamLayout(const ModelShape& s) {
    std::size_t off = 0;
    conv_w = off, off += s.filters * s.kernel_width * s.input_dim;
    conv_b = off, off += s.filters;
    lstm_w = off, off += kNumGates * s.hidden * (s.hidden + s.filters);
    lstm_b = off, off += kNumGates * s.hidden;
    dense_w = off, off += s.classes * s.hidden;
    dense_b = off, off += s.classes;
    total = off;
  }
};

template <typename Real = double>
class CnnLstmModel {
 public:
  CnnLstmModel() : layout_(shape_) {}

  /// Zero-initialized parameters.
  explicit CnnLstmModel(ModelShape shape) : shape_(shape), layout_((shape.validate(), shape)) {
    params_.assign(layout_.total, Real(0));
  }

  /// Glorot-uniform weights from a seeded stream, zero biases except the
  /// forget gate (1.0).
  static CnnLstmModel initialized(ModelShape shape, std::uint64_t seed) {
    CnnLstmModel m(shape);
    Rng rng(seed);
    auto fill = [&](std::size_t off, std::size_t count, double fan_in, double fan_out) {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (std::size_t k = 0; k < count; ++k)
        m.params_[off + k] = static_cast<Real>((2.0 * rng.uniform() - 1.0) * limit);
    };
    const auto& s = m.shape_;
    const auto& l = m.layout_;
    fill(l.conv_w, l.conv_b - l.conv_w, double(s.kernel_width * s.input_dim),
         double(s.kernel_width * s.filters));
    fill(l.lstm_w, l.lstm_b - l.lstm_w, double(s.hidden + s.filters), double(s.hidden));
    fill(l.dense_w, l.dense_b - l.dense_w, double(s.hidden), double(s.classes));
    for (std::size_t h = 0; h < s.hidden; ++h) m.params_[l.lstm_b + kForget * s.hidden + h] = Real(1);
    return m;
  }

  const ModelShape& shape() const noexcept { return shape_; }
  const ParamLayout& layout() const noexcept { return layout_; }
  std::vector<Real>& params() noexcept { return params_; }
  const std::vector<Real>& params() const noexcept { return params_; }

  Conv1DLayer<Real> conv() const {
    return {shape_.filters, shape_.kernel_width, shape_.input_dim, block(layout_.conv_w, layout_.conv_b),
            block(layout_.conv_b, layout_.lstm_w)};
  }
  LSTMCell<Real> lstm() const {
    return {shape_.hidden, shape_.filters, block(layout_.lstm_w, layout_.lstm_b),
            block(layout_.lstm_b, layout_.dense_w)};
  }
  DenseLayer<Real> dense() const {
    return {shape_.classes, shape_.hidden, block(layout_.dense_w, layout_.dense_b),
            block(layout_.dense_b, layout_.total)};
  }

  bool operator==(const CnnLstmModel& o) const {
    return shape_ == o.shape_ && params_ == o.params_;
  }

 private:
  std::span<const Real> block(std::size_t begin, std::size_t end) const {
    return std::span<const Real>(params_).subspan(begin, end - begin);
  }

  ModelShape shape_;
  ParamLayout layout_;
  std::vector<Real> params_;
};

/// Number of LSTM steps whose windows cover real (non-pad) tokens; the
/// classifier reads the hidden state of the last one. At least 1.
inline std::size_t readout_steps(const ModelShape& s, std::size_t length, std::size_t padded_len) {
  const std::size_t pooled_total = (padded_len - s.kernel_width + 1) / s.pool_size;
  const std::size_t conv_valid = length >= s.kernel_width ? length - s.kernel_width + 1 : 0;
  return std::clamp<std::size_t>(conv_valid / s.pool_size, 1, pooled_total);
}

/// Everything one item's forward pass leaves behind for backward().
template <typename Real>
struct ItemCache {
  Matrix<Real> conv_out;  // post-ReLU
  PoolResult<Real> pooled;
  LstmTrace<Real> lstm;   // over the first `steps` pooled rows
  std::size_t steps = 0;
  std::vector<bool> keep;  // dropout channel mask (all true at inference)
  Real mask_scale = Real(1);
  std::vector<Real> readout;
  std::vector<Real> probs;
};

template <typename Real>
struct ForwardResult {
  std::vector<std::vector<Real>> probs;
  std::vector<ItemCache<Real>> caches;
};

namespace detail {

template <typename Real>
void check_batch(const CnnLstmModel<Real>& model, const SequenceBatch<Real>& batch) {
  const auto& s = model.shape();
  if (batch.dim != s.input_dim)
    throw DimensionMismatch("batch embedding dim " + std::to_string(batch.dim) +
                            " != model input dim " + std::to_string(s.input_dim));
  if (batch.max_len < s.min_sequence_length())
    throw SequenceTooShort("max_len " + std::to_string(batch.max_len) + " < " +
                           std::to_string(s.min_sequence_length()) +
                           " required by kernel width and pool size");
}

}  // namespace detail

template <typename Real>
ItemCache<Real> forward_item(const CnnLstmModel<Real>& model, const Matrix<Real>& seq,
                             std::size_t length, bool training, Rng* rng) {
  const auto& s = model.shape();
  ItemCache<Real> c;
  c.conv_out = conv1d_forward(seq, model.conv());
  c.pooled = maxpool1d_indexed(c.conv_out, s.pool_size);
  c.steps = readout_steps(s, length, seq.rows());
  // The LSTM is causal, so steps past the readout never influence the output.
  Matrix<Real> lstm_in(c.steps, s.filters);
  for (std::size_t t = 0; t < c.steps; ++t)
    for (std::size_t f = 0; f < s.filters; ++f) lstm_in(t, f) = c.pooled.values(t, f);
  c.lstm = lstm_forward_trace(lstm_in, model.lstm());

  c.keep.assign(s.hidden, true);
  Matrix<Real> hidden_seq = c.lstm.hidden;
  if (training && s.dropout_rate > 0.0) {
    c.keep = draw_channel_mask(s.hidden, s.dropout_rate, *rng);
    hidden_seq = apply_channel_mask(hidden_seq, c.keep, s.dropout_rate);
    c.mask_scale = Real(1) / (Real(1) - static_cast<Real>(s.dropout_rate));
  }
  const auto last = hidden_seq.row(c.steps - 1);
  c.readout.assign(last.begin(), last.end());
  c.probs = dense_softmax<Real>(c.readout, model.dense());
  return c;
}

/// Batch forward pass. `rng` supplies dropout masks and is only touched when
/// training (it may be null otherwise).
template <typename Real>
ForwardResult<Real> forward(const CnnLstmModel<Real>& model, const SequenceBatch<Real>& batch,
                            bool training, Rng* rng) {
  detail::check_batch(model, batch);
  if (training && model.shape().dropout_rate > 0.0 && rng == nullptr)
    throw ConfigError("training forward pass needs an RNG for dropout");
  ForwardResult<Real> out;
  out.caches.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    out.caches.push_back(forward_item(model, batch.items[b], batch.lengths[b], training, rng));
    out.probs.push_back(out.caches.back().probs);
  }
  return out;
}

/// Accumulates d(loss)/d(params) for one item into `grad`, with the loss
/// scaled by `weight`.
template <typename Real>
void backward_item(const CnnLstmModel<Real>& model, const Matrix<Real>& seq, std::size_t label,
                   const ItemCache<Real>& c, Real weight, std::vector<Real>& grad) {
  using std::tanh;
  const auto& s = model.shape();
  const auto& L = model.layout();
  const std::size_t H = s.hidden, F = s.filters, C = s.classes, D = H + F;
  const auto dense = model.dense();
  const auto cell = model.lstm();
  const auto conv = model.conv();

  // Dense + softmax cross-entropy.
  std::vector<Real> dlogits(C);
  for (std::size_t k = 0; k < C; ++k) dlogits[k] = weight * (c.probs[k] - (k == label ? Real(1) : Real(0)));
  std::vector<Real> dread(H, Real(0));
  for (std::size_t k = 0; k < C; ++k) {
    grad[L.dense_b + k] += dlogits[k];
    for (std::size_t h = 0; h < H; ++h) {
      grad[L.dense_w + k * H + h] += dlogits[k] * c.readout[h];
      dread[h] += dense.weights[k * H + h] * dlogits[k];
    }
  }

  // Spatial dropout on the readout row.
  std::vector<Real> dh(H), dc(H, Real(0));
  for (std::size_t h = 0; h < H; ++h) dh[h] = c.keep[h] ? dread[h] * c.mask_scale : Real(0);

  // Backpropagation through time over the steps that were run.
  const std::size_t T = c.steps;
  Matrix<Real> dpooled(c.pooled.values.rows(), F);
  std::vector<Real> da(kNumGates * H), z(D), dz(D);
  for (std::size_t t = T; t-- > 0;) {
    const auto g = c.lstm.gates.row(t);
    for (std::size_t h = 0; h < H; ++h) {
      const Real ct = c.lstm.cells(t, h);
      const Real tc = tanh(ct);
      const Real i = g[kInput * H + h], f = g[kForget * H + h], o = g[kOutput * H + h],
                 cand = g[kCandidate * H + h];
      const Real c_prev = t == 0 ? Real(0) : c.lstm.cells(t - 1, h);
      const Real d_o = dh[h] * tc;
      dc[h] += dh[h] * o * (Real(1) - tc * tc);
      da[kInput * H + h] = dc[h] * cand * i * (Real(1) - i);
      da[kForget * H + h] = dc[h] * c_prev * f * (Real(1) - f);
      da[kOutput * H + h] = d_o * o * (Real(1) - o);
      da[kCandidate * H + h] = dc[h] * i * (Real(1) - cand * cand);
      dc[h] *= f;  // carry to t-1
    }
    for (std::size_t h = 0; h < H; ++h) z[h] = t == 0 ? Real(0) : c.lstm.hidden(t - 1, h);
    for (std::size_t k = 0; k < F; ++k) z[H + k] = c.pooled.values(t, k);
    std::fill(dz.begin(), dz.end(), Real(0));
    for (std::size_t gate = 0; gate < kNumGates; ++gate)
      for (std::size_t h = 0; h < H; ++h) {
        const Real a = da[gate * H + h];
        if (a == Real(0)) continue;
        grad[L.lstm_b + gate * H + h] += a;
        Real* gw = grad.data() + L.lstm_w + (gate * H + h) * D;
        const Real* w = cell.weights.data() + (gate * H + h) * D;
        for (std::size_t k = 0; k < D; ++k) {
          gw[k] += a * z[k];
          dz[k] += w[k] * a;
        }
      }
    for (std::size_t h = 0; h < H; ++h) dh[h] = dz[h];
    for (std::size_t k = 0; k < F; ++k) dpooled(t, k) = dz[H + k];
  }

  // Max pooling routes each gradient to the winning row; ReLU gates it.
  Matrix<Real> dconv(c.conv_out.rows(), F);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < F; ++k) {
      const std::size_t src = c.pooled.source[t * F + k];
      if (c.conv_out(src, k) > Real(0)) dconv(src, k) += dpooled(t, k);
    }
  for (std::size_t t = 0; t < dconv.rows(); ++t)
    for (std::size_t f = 0; f < F; ++f) {
      const Real d = dconv(t, f);
      if (d == Real(0)) continue;
      grad[L.conv_b + f] += d;
      for (std::size_t j = 0; j < conv.width; ++j) {
        const auto x = seq.row(t + j);
        Real* gw = grad.data() + L.conv_w + (f * conv.width + j) * conv.in_dim;
        for (std::size_t i = 0; i < conv.in_dim; ++i) gw[i] += d * x[i];
      }
    }
}

/// Gradient of the mean batch cross-entropy with respect to every parameter,
/// in the model's flat layout.
template <typename Real>
std::vector<Real> backward(const CnnLstmModel<Real>& model, const SequenceBatch<Real>& batch,
                           const ForwardResult<Real>& fwd) {
  if (batch.labels.size() != batch.size()) throw LengthMismatch("batch has no labels");
  if (fwd.caches.size() != batch.size()) throw LengthMismatch("forward cache does not match batch");
  std::vector<Real> grad(model.params().size(), Real(0));
  const Real weight = Real(1) / static_cast<Real>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b)
    backward_item(model, batch.items[b], batch.labels[b], fwd.caches[b], weight, grad);
  return grad;
}

template <typename Real>
Real mean_loss(const ForwardResult<Real>& fwd, const std::vector<std::size_t>& labels) {
  Real total(0);
  for (std::size_t b = 0; b < fwd.probs.size(); ++b)
    total += cross_entropy<Real>(fwd.probs[b], labels[b]);
  return total / static_cast<Real>(fwd.probs.size());
}

template <typename Real>
struct Predictions {
  std::vector<std::size_t> classes;
  std::vector<std::vector<Real>> probs;
};

/// Inference pass (no dropout); argmax with the lowest index on ties.
template <typename Real>
Predictions<Real> predict(const CnnLstmModel<Real>& model, const SequenceBatch<Real>& batch) {
  auto fwd = forward(model, batch, false, nullptr);
  Predictions<Real> out;
  for (auto& p : fwd.probs) out.classes.push_back(argmax(p));
  out.probs = std::move(fwd.probs);
  return out;
}

}  // namespace parsent::neural
