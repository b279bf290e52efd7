#pragma once

#include <cstdint>
#include <span>

namespace trivol {

// Sinusoidal feature lift applied independently to each scalar p:
//   [p]? , sin(2^0 pi p), cos(2^0 pi p), ..., sin(2^(L-1) pi p), cos(2^(L-1) pi p)
// The raw value leads its block when include_raw is set. degree = 0 with
// include_raw passes features through untouched; degree = 0 without it is
// rejected (empty encoding).
struct EncodingConfig {
  std::uint32_t degree = 2;  // L
  bool include_raw = true;
};

// Throws ConfigError if the config encodes to width zero.
void validate(const EncodingConfig& cfg);

// Encoded width of one scalar: 2*degree + include_raw.
std::uint32_t encoded_scalar_width(const EncodingConfig& cfg);

// out.size() must be features.size() * encoded_scalar_width(); blocks are
// feature-major (all terms of feature 0, then feature 1, ...).
void encode(const EncodingConfig& cfg, std::span<const double> features, std::span<double> out);

// dL/dfeatures from dL/dencoded. upstream is laid out like encode()'s output.
void encode_backward(const EncodingConfig& cfg, std::span<const double> features,
                     std::span<const double> upstream, std::span<double> out_dfeatures);

namespace detail {
// Batch forms used by the training engine. feats: [n_features][n] planes;
// out/upstream: [n][n_features * width] row-major per sample.
void encode_batch(const EncodingConfig& cfg, const double* feats, std::size_t n_features,
                  std::size_t n, double* out);
void encode_backward_batch(const EncodingConfig& cfg, const double* feats, std::size_t n_features,
                           std::size_t n, const double* upstream, double* out_dfeats);
}  // namespace detail

}  // namespace trivol
