#include "trivol/optim.hpp"

#include <cmath>

#include "trivol/errors.hpp"

namespace trivol {

void sgd_step(std::span<float> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) throw ShapeError("sgd: parameter/gradient size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = static_cast<float>(double(params[i]) - lr * grads[i]);
  }
}

void sgd_step_consume(std::span<float> params, std::span<double> grads, double lr) {
  if (params.size() != grads.size()) throw ShapeError("sgd: parameter/gradient size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = static_cast<float>(double(params[i]) - lr * grads[i]);
    grads[i] = 0.0;
  }
}

AdamState make_adam(std::size_t n_params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.m.assign(n_params, 0.0);
  state.v.assign(n_params, 0.0);
  return state;
}

void adam_step_consume(AdamState& state, std::span<double> params, std::span<double> grads) {
  if (params.size() != state.m.size() || grads.size() != state.m.size()) {
    throw ShapeError("adam: parameter/gradient size mismatch");
  }
  const AdamConfig& c = state.config;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, double(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, double(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    grads[i] = 0.0;
  }
}

}  // namespace trivol
