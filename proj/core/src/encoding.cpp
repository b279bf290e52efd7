#include "trivol/encoding.hpp"

#include <cmath>

#include "trivol/errors.hpp"

namespace trivol {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void validate(const EncodingConfig& cfg) {
  if (cfg.degree == 0 && !cfg.include_raw) {
    throw ConfigError("encoding with degree 0 and no raw passthrough is empty");
  }
}

std::uint32_t encoded_scalar_width(const EncodingConfig& cfg) {
  return 2 * cfg.degree + (cfg.include_raw ? 1 : 0);
}

void encode(const EncodingConfig& cfg, std::span<const double> features, std::span<double> out) {
  validate(cfg);
  const std::uint32_t w = encoded_scalar_width(cfg);
  if (out.size() != features.size() * w) throw ShapeError("encode output buffer size mismatch");
  std::size_t o = 0;
  for (const double p : features) {
    if (cfg.include_raw) out[o++] = p;
    if (cfg.degree > 0) {
      // Angle doubling: sin/cos at level l+1 from level l. A few ulp per
      // level, well below every consumer's tolerance, and 2 trig calls
      // instead of 2L.
      double s = std::sin(kPi * p);
      double c = std::cos(kPi * p);
      for (std::uint32_t l = 0;;) {
        out[o++] = s;
        out[o++] = c;
        if (++l == cfg.degree) break;
        const double s2 = 2.0 * s * c;
        const double c2 = (c - s) * (c + s);
        s = s2;
        c = c2;
      }
    }
  }
}

void encode_backward(const EncodingConfig& cfg, std::span<const double> features,
                     std::span<const double> upstream, std::span<double> out_dfeatures) {
  validate(cfg);
  const std::uint32_t w = encoded_scalar_width(cfg);
  if (upstream.size() != features.size() * w) throw ShapeError("encode upstream size mismatch");
  if (out_dfeatures.size() != features.size()) throw ShapeError("encode dfeatures size mismatch");
  std::size_t o = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    double acc = 0.0;
    if (cfg.include_raw) acc += upstream[o++];
    if (cfg.degree > 0) {
      double s = std::sin(kPi * features[i]);
      double c = std::cos(kPi * features[i]);
      double freq = kPi;  // d/dp of 2^l pi p
      for (std::uint32_t l = 0;;) {
        acc += upstream[o] * freq * c - upstream[o + 1] * freq * s;
        o += 2;
        if (++l == cfg.degree) break;
        const double s2 = 2.0 * s * c;
        const double c2 = (c - s) * (c + s);
        s = s2;
        c = c2;
        freq *= 2.0;
      }
    }
    out_dfeatures[i] = acc;
  }
}

namespace detail {

void encode_batch(const EncodingConfig& cfg, const double* feats, std::size_t n_features,
                  std::size_t n, double* out) {
  validate(cfg);
  const std::uint32_t w = encoded_scalar_width(cfg);
  const std::size_t row = n_features * w;
  for (std::size_t f = 0; f < n_features; ++f) {
    const double* plane = feats + f * n;
    double* base = out + f * w;
    for (std::size_t px = 0; px < n; ++px) {
      double* dst = base + px * row;
      const double p = plane[px];
      if (cfg.include_raw) *dst++ = p;
      if (cfg.degree > 0) {
        double s = std::sin(kPi * p);
        double c = std::cos(kPi * p);
        for (std::uint32_t l = 0;;) {
          dst[0] = s;
          dst[1] = c;
          dst += 2;
          if (++l == cfg.degree) break;
          const double s2 = 2.0 * s * c;
          const double c2 = (c - s) * (c + s);
          s = s2;
          c = c2;
        }
      }
    }
  }
}

void encode_backward_batch(const EncodingConfig& cfg, const double* feats, std::size_t n_features,
                           std::size_t n, const double* upstream, double* out_dfeats) {
  validate(cfg);
  const std::uint32_t w = encoded_scalar_width(cfg);
  const std::size_t row = n_features * w;
  for (std::size_t f = 0; f < n_features; ++f) {
    const double* plane = feats + f * n;
    const double* base = upstream + f * w;
    double* dplane = out_dfeats + f * n;
    for (std::size_t px = 0; px < n; ++px) {
      const double* up = base + px * row;
      double acc = 0.0;
      if (cfg.include_raw) acc += *up++;
      if (cfg.degree > 0) {
        double s = std::sin(kPi * plane[px]);
        double c = std::cos(kPi * plane[px]);
        double freq = kPi;
        for (std::uint32_t l = 0;;) {
          acc += up[0] * freq * c - up[1] * freq * s;
          up += 2;
          if (++l == cfg.degree) break;
          const double s2 = 2.0 * s * c;
          const double c2 = (c - s) * (c + s);
          s = s2;
          c = c2;
          freq *= 2.0;
        }
      }
      dplane[px] = acc;
    }
  }
}

}  // namespace detail

}  // namespace trivol
