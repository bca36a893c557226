#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "parsent/error.hpp"

namespace parsent::neural {

/// p <- p - lr * g
template <typename Real>
void sgd_step(std::span<Real> params, std::span<const Real> grads, double lr) {
  if (params.size() != grads.size()) throw DimensionMismatch("sgd: parameter/gradient size mismatch");
  const Real rate = static_cast<Real>(lr);
  for (std::size_t k = 0; k < params.size(); ++k) params[k] -= rate * grads[k];
}

template <typename Real>
struct AdamState {
  std::vector<Real> m;  // first moment
  std::vector<Real> v;  // second moment
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t size) : m(size, Real(0)), v(size, Real(0)) {}
};

/// Bias-corrected Adam update; increments state.step.
template <typename Real>
void adam_step(std::span<Real> params, std::span<const Real> grads, AdamState<Real>& state, double lr) {
  using std::sqrt;
  using std::pow;
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw DimensionMismatch("adam: parameter/gradient/state size mismatch");
  ++state.step;
  const Real b1 = static_cast<Real>(state.beta1), b2 = static_cast<Real>(state.beta2);
  const Real c1 = Real(1) - pow(b1, static_cast<Real>(state.step));
  const Real c2 = Real(1) - pow(b2, static_cast<Real>(state.step));
  const Real rate = static_cast<Real>(lr), eps = static_cast<Real>(state.epsilon);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Real g = grads[k];
    state.m[k] = b1 * state.m[k] + (Real(1) - b1) * g;
    state.v[k] = b2 * state.v[k] + (Real(1) - b2) * g * g;
    const Real m_hat = state.m[k] / c1;
    const Real v_hat = state.v[k] / c2;
    params[k] -= rate * m_hat / (sqrt(v_hat) + eps);
  }
}

}  // namespace parsent::neural
