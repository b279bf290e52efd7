#pragma once

#include <vector>

#include "trivol/volume.hpp"

namespace trivol {

// Structural similarity over a Gaussian-weighted sliding window, computed on
// reflection-padded images (mirror, edge not repeated) so the map has one
// entry per pixel; the score is the map's mean. Window weights sum to 1.
struct SsimConfig {
  std::uint32_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Symmetric, 1 for identical images, range [-1, 1]. Both images must share
// dims and be at least window x window.
double ssim(const Image2D& a, const Image2D& b, const SsimConfig& cfg = {});

// d(upstream * ssim)/da, accumulated into grad_a (resized to a's pixel
// count, overwritten).
void ssim_backward(const Image2D& a, const Image2D& b, double upstream,
                   std::vector<double>& grad_a, const SsimConfig& cfg = {});

// Training objective: maximizing similarity by gradient descent, so the loss
// is the negated score.
double training_loss(const Image2D& rendered, const Image2D& target);
void training_loss_backward(const Image2D& rendered, const Image2D& target,
                            std::vector<double>& grad_rendered);

}  // namespace trivol
