#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trivol {

// Plain SGD: params -= lr * grads. Parameters are stored float32, gradients
// are accumulated in double; the update is computed in double then rounded
// once on store.
void sgd_step(std::span<float> params, std::span<const double> grads, double lr);

// As sgd_step, but zeroes the gradient buffer afterwards so it can be reused
// as an accumulator for the next step.
void sgd_step_consume(std::span<float> params, std::span<double> grads, double lr);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment estimates plus the step counter. The bias
// correction uses the convention where eps is added after the square root of
// the corrected second moment:
//   m_t = b1*m + (1-b1)*g,  v_t = b2*v + (1-b2)*g^2
//   step = lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps)
// so the very first step with gradient g moves by lr * g / (|g| + eps).
struct AdamState {
  AdamConfig config;
  std::uint64_t t = 0;
  std::vector<double> m;
  std::vector<double> v;
};

AdamState make_adam(std::size_t n_params, const AdamConfig& config = {});

// One Adam update over double-precision parameters (used for pose refinement,
// where parameters are angles/offsets rather than stored tensors). Zeroes the
// gradient buffer afterwards.
void adam_step_consume(AdamState& state, std::span<double> params, std::span<double> grads);

}  // namespace trivol
