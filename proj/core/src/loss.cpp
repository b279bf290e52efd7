#include "trivol/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trivol/errors.hpp"

namespace trivol {

namespace {

struct SsimPlan {
  std::uint32_t rows, cols, win, pad;
  std::uint32_t prows, pcols;          // padded sizes
  std::vector<double> kernel;          // 1D Gaussian, sums to 1
  std::vector<std::uint32_t> row_map;  // padded row -> source row (reflect-101)
  std::vector<std::uint32_t> col_map;
  double c1, c2;
};

std::uint32_t reflect101(std::int64_t p, std::int64_t n) {
  if (p < 0) p = -p;
  if (p >= n) p = 2 * n - 2 - p;
  return static_cast<std::uint32_t>(p);
}

SsimPlan make_plan(const Image2D& a, const Image2D& b, const SsimConfig& cfg) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ShapeError("ssim operands differ: " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols));
  }
  if (cfg.window < 3 || cfg.window % 2 == 0) throw ConfigError("ssim window must be odd and >= 3");
  if (a.rows < cfg.window || a.cols < cfg.window) {
    throw ShapeError("ssim images must be at least window-sized (" + std::to_string(cfg.window) +
                     "), got " + std::to_string(a.rows) + "x" + std::to_string(a.cols));
  }
  SsimPlan plan;
  plan.rows = a.rows;
  plan.cols = a.cols;
  plan.win = cfg.window;
  plan.pad = cfg.window / 2;
  plan.prows = plan.rows + 2 * plan.pad;
  plan.pcols = plan.cols + 2 * plan.pad;
  plan.kernel.resize(plan.win);
  double sum = 0.0;
  const double half = double(plan.win - 1) / 2.0;
  for (std::uint32_t i = 0; i < plan.win; ++i) {
    const double d = double(i) - half;
    plan.kernel[i] = std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma));
    sum += plan.kernel[i];
  }
  for (double& k : plan.kernel) k /= sum;
  plan.row_map.resize(plan.prows);
  plan.col_map.resize(plan.pcols);
  for (std::uint32_t r = 0; r < plan.prows; ++r) {
    plan.row_map[r] = reflect101(std::int64_t(r) - plan.pad, plan.rows);
  }
  for (std::uint32_t c = 0; c < plan.pcols; ++c) {
    plan.col_map[c] = reflect101(std::int64_t(c) - plan.pad, plan.cols);
  }
  const double l = cfg.dynamic_range;
  plan.c1 = (cfg.k1 * l) * (cfg.k1 * l);
  plan.c2 = (cfg.k2 * l) * (cfg.k2 * l);
  return plan;
}

std::vector<double> pad_image(const SsimPlan& p, const Image2D& img) {
  std::vector<double> out(std::size_t(p.prows) * p.pcols);
  for (std::uint32_t r = 0; r < p.prows; ++r) {
    const float* src = img.pixels.data() + std::size_t(p.row_map[r]) * p.cols;
    double* dst = out.data() + std::size_t(r) * p.pcols;
    for (std::uint32_t c = 0; c < p.pcols; ++c) dst[c] = src[p.col_map[c]];
  }
  return out;
}

// Valid separable convolution: padded (prows x pcols) -> (rows x cols).
std::vector<double> conv_valid(const SsimPlan& p, const std::vector<double>& padded) {
  std::vector<double> tmp(std::size_t(p.prows) * p.cols);
  for (std::uint32_t r = 0; r < p.prows; ++r) {
    const double* src = padded.data() + std::size_t(r) * p.pcols;
    double* dst = tmp.data() + std::size_t(r) * p.cols;
    for (std::uint32_t c = 0; c < p.cols; ++c) {
      double acc = 0.0;
      for (std::uint32_t k = 0; k < p.win; ++k) acc += p.kernel[k] * src[c + k];
      dst[c] = acc;
    }
  }
  std::vector<double> out(std::size_t(p.rows) * p.cols);
  for (std::uint32_t r = 0; r < p.rows; ++r) {
    double* dst = out.data() + std::size_t(r) * p.cols;
    for (std::uint32_t c = 0; c < p.cols; ++c) {
      double acc = 0.0;
      for (std::uint32_t k = 0; k < p.win; ++k) acc += p.kernel[k] * tmp[std::size_t(r + k) * p.cols + c];
      dst[c] = acc;
    }
  }
  return out;
}

// Adjoint of conv_valid: coefficient map (rows x cols) -> padded grid.
std::vector<double> conv_adjoint(const SsimPlan& p, const std::vector<double>& coef) {
  std::vector<double> tmp(std::size_t(p.prows) * p.cols, 0.0);
  for (std::uint32_t r = 0; r < p.rows; ++r) {
    const double* src = coef.data() + std::size_t(r) * p.cols;
    for (std::uint32_t k = 0; k < p.win; ++k) {
      double* dst = tmp.data() + std::size_t(r + k) * p.cols;
      const double w = p.kernel[k];
      for (std::uint32_t c = 0; c < p.cols; ++c) dst[c] += w * src[c];
    }
  }
  std::vector<double> out(std::size_t(p.prows) * p.pcols, 0.0);
  for (std::uint32_t r = 0; r < p.prows; ++r) {
    const double* src = tmp.data() + std::size_t(r) * p.cols;
    double* dst = out.data() + std::size_t(r) * p.pcols;
    for (std::uint32_t c = 0; c < p.cols; ++c) {
      const double v = src[c];
      if (v == 0.0) continue;
      for (std::uint32_t k = 0; k < p.win; ++k) dst[c + k] += p.kernel[k] * v;
    }
  }
  return out;
}

struct SsimMaps {
  std::vector<double> pa, pb;          // padded images
  std::vector<double> mu_a, mu_b;      // means
  std::vector<double> m_aa, m_bb, m_ab;  // raw second moments
};

SsimMaps forward_maps(const SsimPlan& p, const Image2D& a, const Image2D& b) {
  SsimMaps m;
  m.pa = pad_image(p, a);
  m.pb = pad_image(p, b);
  const std::size_t pn = m.pa.size();
  std::vector<double> prod(pn);
  m.mu_a = conv_valid(p, m.pa);
  m.mu_b = conv_valid(p, m.pb);
  for (std::size_t i = 0; i < pn; ++i) prod[i] = m.pa[i] * m.pa[i];
  m.m_aa = conv_valid(p, prod);
  for (std::size_t i = 0; i < pn; ++i) prod[i] = m.pb[i] * m.pb[i];
  m.m_bb = conv_valid(p, prod);
  for (std::size_t i = 0; i < pn; ++i) prod[i] = m.pa[i] * m.pb[i];
  m.m_ab = conv_valid(p, prod);
  return m;
}

}  // namespace

double ssim(const Image2D& a, const Image2D& b, const SsimConfig& cfg) {
  const SsimPlan plan = make_plan(a, b, cfg);
  const SsimMaps m = forward_maps(plan, a, b);
  const std::size_t n = std::size_t(plan.rows) * plan.cols;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mu_a = m.mu_a[i], mu_b = m.mu_b[i];
    const double va = m.m_aa[i] - mu_a * mu_a;
    const double vb = m.m_bb[i] - mu_b * mu_b;
    const double cab = m.m_ab[i] - mu_a * mu_b;
    const double a1 = 2.0 * mu_a * mu_b + plan.c1;
    const double a2 = 2.0 * cab + plan.c2;
    const double b1 = mu_a * mu_a + mu_b * mu_b + plan.c1;
    const double b2 = va + vb + plan.c2;
    total += (a1 * a2) / (b1 * b2);
  }
  return total / double(n);
}

void ssim_backward(const Image2D& a, const Image2D& b, double upstream,
                   std::vector<double>& grad_a, const SsimConfig& cfg) {
  const SsimPlan plan = make_plan(a, b, cfg);
  const SsimMaps m = forward_maps(plan, a, b);
  const std::size_t n = std::size_t(plan.rows) * plan.cols;
  const double scale = upstream / double(n);
  // Coefficient maps for the three statistics that depend on image a:
  // mu_a, m_aa, m_ab. S is a function of (mu_a, mu_b, sigma_a2, sigma_b2,
  // sigma_ab) with sigma_a2 = m_aa - mu_a^2, sigma_ab = m_ab - mu_a*mu_b.
  std::vector<double> w_mu(n), w_maa(n), w_mab(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu_a = m.mu_a[i], mu_b = m.mu_b[i];
    const double va = m.m_aa[i] - mu_a * mu_a;
    const double vb = m.m_bb[i] - mu_b * mu_b;
    const double cab = m.m_ab[i] - mu_a * mu_b;
    const double a1 = 2.0 * mu_a * mu_b + plan.c1;
    const double a2 = 2.0 * cab + plan.c2;
    const double b1 = mu_a * mu_a + mu_b * mu_b + plan.c1;
    const double b2 = va + vb + plan.c2;
    const double inv = 1.0 / (b1 * b2);
    const double s = a1 * a2 * inv;
    const double f_mu_a = 2.0 * mu_b * a2 * inv - s * 2.0 * mu_a / b1;
    const double f_va = -s / b2;        // d S / d sigma_a2
    const double f_cab = 2.0 * a1 * inv;  // d S / d sigma_ab
    w_mu[i] = scale * (f_mu_a - 2.0 * mu_a * f_va - mu_b * f_cab);
    w_maa[i] = scale * f_va;
    w_mab[i] = scale * f_cab;
  }
  const std::vector<double> g_mu = conv_adjoint(plan, w_mu);
  const std::vector<double> g_maa = conv_adjoint(plan, w_maa);
  const std::vector<double> g_mab = conv_adjoint(plan, w_mab);
  grad_a.assign(n, 0.0);
  // Fold the padded-domain gradient back through the reflection map.
  for (std::uint32_t r = 0; r < plan.prows; ++r) {
    double* grow = grad_a.data() + std::size_t(plan.row_map[r]) * plan.cols;
    const std::size_t prow = std::size_t(r) * plan.pcols;
    for (std::uint32_t c = 0; c < plan.pcols; ++c) {
      const std::size_t pi = prow + c;
      grow[plan.col_map[c]] +=
          g_mu[pi] + 2.0 * m.pa[pi] * g_maa[pi] + m.pb[pi] * g_mab[pi];
    }
  }
}

double training_loss(const Image2D& rendered, const Image2D& target) {
  return -ssim(rendered, target);
}

void training_loss_backward(const Image2D& rendered, const Image2D& target,
                            std::vector<double>& grad_rendered) {
  ssim_backward(rendered, target, -1.0, grad_rendered);
}

}  // namespace trivol
