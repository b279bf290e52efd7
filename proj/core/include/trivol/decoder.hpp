#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trivol {

// Fully connected intensity decoder: n_layers affine layers, ReLU between
// them, sigmoid on the single output, so intensities are strictly in (0, 1).
// "MLP n-w" means n affine layers with hidden width w.
struct MlpConfig {
  std::uint32_t n_layers = 2;
  std::uint32_t hidden_width = 64;
  std::uint32_t input_width = 50;
};

// The decoder role constrains the grid further: 2-4 layers, width in
// {32, 64, 128}. (The dense baseline reuses the machinery outside this
// envelope, which make_mlp itself permits.)
void validate_decoder_config(const MlpConfig& cfg);

struct Mlp {
  MlpConfig cfg;
  std::vector<std::vector<float>> weights;  // [l]: out x in, row-major
  std::vector<std::vector<float>> biases;   // [l]: out

  std::uint32_t in_dim(std::uint32_t l) const { return l == 0 ? cfg.input_width : cfg.hidden_width; }
  std::uint32_t out_dim(std::uint32_t l) const {
    return l + 1 == cfg.n_layers ? 1 : cfg.hidden_width;
  }
  std::size_t parameter_count() const;
};

// He-style init: weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), all biases zero
// (the output layer's in particular), so initial outputs sit near 0.5.
Mlp make_mlp(const MlpConfig& cfg, std::uint64_t seed);

struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  void zero();
};
MlpGrads make_grads(const Mlp& mlp);

// Post-activation values per layer for a batch, kept for the backward pass.
struct MlpBatch {
  std::size_t n = 0;
  std::vector<std::vector<double>> acts;  // [l]: n x out_dim(l)
};

// input: n x input_width row-major. out: n intensities in (0, 1).
void mlp_forward(const Mlp& mlp, const double* input, std::size_t n, MlpBatch& scratch,
                 double* out);

// upstream: n x dL/dintensity. Accumulates parameter grads; writes
// dL/dinput to input_grad (n x input_width) unless null.
void mlp_backward(const Mlp& mlp, const double* input, std::size_t n, const MlpBatch& scratch,
                  const double* upstream, MlpGrads& grads, double* input_grad);

// Single-sample conveniences.
double mlp_forward_one(const Mlp& mlp, std::span<const double> input);
double mlp_backward_one(const Mlp& mlp, std::span<const double> input, double upstream,
                        MlpGrads& grads, std::span<double> input_grad);

}  // namespace trivol
