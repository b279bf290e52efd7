#include "trivol/decoder.hpp"

#include <cmath>
#include <string>

#include "trivol/errors.hpp"
#include "trivol/rng.hpp"

namespace trivol {

void validate_decoder_config(const MlpConfig& cfg) {
  if (cfg.n_layers < 2 || cfg.n_layers > 4) {
    throw ConfigError("decoder n_layers must be in [2, 4], got " + std::to_string(cfg.n_layers));
  }
  if (cfg.hidden_width != 32 && cfg.hidden_width != 64 && cfg.hidden_width != 128) {
    throw ConfigError("decoder hidden_width must be one of {32, 64, 128}, got " +
                      std::to_string(cfg.hidden_width));
  }
  if (cfg.input_width < 1) throw ConfigError("decoder input_width must be >= 1");
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

Mlp make_mlp(const MlpConfig& cfg, std::uint64_t seed) {
  if (cfg.n_layers < 1 || cfg.n_layers > 8) throw ConfigError("mlp n_layers must be in [1, 8]");
  if (cfg.n_layers > 1 && (cfg.hidden_width < 1 || cfg.hidden_width > 4096)) {
    throw ConfigError("mlp hidden_width must be in [1, 4096]");
  }
  if (cfg.input_width < 1) throw ConfigError("mlp input_width must be >= 1");
  Mlp mlp;
  mlp.cfg = cfg;
  mlp.weights.resize(cfg.n_layers);
  mlp.biases.resize(cfg.n_layers);
  Rng rng(derive_seed(seed, 0xDEC0DULL));
  for (std::uint32_t l = 0; l < cfg.n_layers; ++l) {
    const std::uint32_t in = mlp.in_dim(l), out = mlp.out_dim(l);
    const double bound = std::sqrt(6.0 / double(in));
    mlp.weights[l].resize(std::size_t(out) * in);
    for (float& w : mlp.weights[l]) w = static_cast<float>(rng.uniform(-bound, bound));
    mlp.biases[l].assign(out, 0.0f);
  }
  return mlp;
}

void MlpGrads::zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

MlpGrads make_grads(const Mlp& mlp) {
  MlpGrads g;
  g.weights.resize(mlp.weights.size());
  g.biases.resize(mlp.biases.size());
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    g.weights[l].assign(mlp.weights[l].size(), 0.0);
    g.biases[l].assign(mlp.biases[l].size(), 0.0);
  }
  return g;
}

void mlp_forward(const Mlp& mlp, const double* input, std::size_t n, MlpBatch& scratch,
                 double* out) {
  const std::uint32_t L = mlp.cfg.n_layers;
  scratch.n = n;
  scratch.acts.resize(L);
  const double* in = input;
  std::size_t in_w = mlp.cfg.input_width;
  for (std::uint32_t l = 0; l < L; ++l) {
    const std::uint32_t out_w = mlp.out_dim(l);
    const bool last = l + 1 == L;
    scratch.acts[l].resize(n * out_w);
    const float* W = mlp.weights[l].data();
    const float* b = mlp.biases[l].data();
    double* act = scratch.acts[l].data();
    for (std::size_t s = 0; s < n; ++s) {
      const double* x = in + s * in_w;
      double* y = act + s * out_w;
      for (std::uint32_t o = 0; o < out_w; ++o) {
        const float* wrow = W + std::size_t(o) * in_w;
        double acc = b[o];
        for (std::size_t i = 0; i < in_w; ++i) acc += x[i] * wrow[i];
        if (last) {
          y[o] = 1.0 / (1.0 + std::exp(-acc));
        } else {
          y[o] = acc > 0.0 ? acc : 0.0;  // ReLU'(0) = 0 downstream
        }
      }
    }
    in = act;
    in_w = out_w;
  }
  const double* final_act = scratch.acts[L - 1].data();
  for (std::size_t s = 0; s < n; ++s) out[s] = final_act[s];
}

void mlp_backward(const Mlp& mlp, const double* input, std::size_t n, const MlpBatch& scratch,
                  const double* upstream, MlpGrads& grads, double* input_grad) {
  const std::uint32_t L = mlp.cfg.n_layers;
  if (grads.weights.size() != L) throw ShapeError("mlp gradient buffers do not match layers");
  const std::size_t max_w = std::max<std::size_t>(mlp.cfg.hidden_width, 1);
  std::vector<double> delta(n * max_w), delta_prev(n * std::max<std::size_t>(max_w, mlp.cfg.input_width));
  // Top layer: sigmoid' = y (1 - y).
  {
    const double* y = scratch.acts[L - 1].data();
    for (std::size_t s = 0; s < n; ++s) delta[s] = upstream[s] * y[s] * (1.0 - y[s]);
  }
  for (std::int32_t l = static_cast<std::int32_t>(L) - 1; l >= 0; --l) {
    const std::uint32_t out_w = mlp.out_dim(l);
    const std::uint32_t in_w = mlp.in_dim(l);
    const double* layer_in = l == 0 ? input : scratch.acts[l - 1].data();
    const float* W = mlp.weights[l].data();
    double* gW = grads.weights[l].data();
    double* gb = grads.biases[l].data();
    const bool want_down = l > 0 || input_grad != nullptr;
    double* down = l == 0 ? input_grad : delta_prev.data();
    if (want_down) std::fill(down, down + n * in_w, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const double* x = layer_in + s * in_w;
      const double* d = delta.data() + s * out_w;
      double* dn = want_down ? down + s * in_w : nullptr;
      for (std::uint32_t o = 0; o < out_w; ++o) {
        const double dv = d[o];
        if (dv == 0.0) continue;
        gb[o] += dv;
        double* gwrow = gW + std::size_t(o) * in_w;
        const float* wrow = W + std::size_t(o) * in_w;
        if (dn) {
          for (std::uint32_t i = 0; i < in_w; ++i) {
            gwrow[i] += dv * x[i];
            dn[i] += dv * wrow[i];
          }
        } else {
          for (std::uint32_t i = 0; i < in_w; ++i) gwrow[i] += dv * x[i];
        }
      }
    }
    if (l > 0) {
      // ReLU gate: the stored post-activation is positive iff the unit fired.
      const double* act = scratch.acts[l - 1].data();
      for (std::size_t i = 0; i < n * in_w; ++i) {
        delta_prev[i] = act[i] > 0.0 ? delta_prev[i] : 0.0;
      }
      std::swap(delta, delta_prev);
    }
  }
}

double mlp_forward_one(const Mlp& mlp, std::span<const double> input) {
  if (input.size() != mlp.cfg.input_width) throw ShapeError("mlp input width mismatch");
  MlpBatch scratch;
  double out;
  mlp_forward(mlp, input.data(), 1, scratch, &out);
  return out;
}

double mlp_backward_one(const Mlp& mlp, std::span<const double> input, double upstream,
                        MlpGrads& grads, std::span<double> input_grad) {
  if (input.size() != mlp.cfg.input_width) throw ShapeError("mlp input width mismatch");
  if (!input_grad.empty() && input_grad.size() != mlp.cfg.input_width) {
    throw ShapeError("mlp input gradient width mismatch");
  }
  MlpBatch scratch;
  double out;
  mlp_forward(mlp, input.data(), 1, scratch, &out);
  mlp_backward(mlp, input.data(), 1, scratch, &upstream, grads,
               input_grad.empty() ? nullptr : input_grad.data());
  return out;
}

}  // namespace trivol
