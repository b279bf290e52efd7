#pragma once

#include <cstdint>

#include "trivol/checkpoint.hpp"
#include "trivol/run_config.hpp"
#include "trivol/volume.hpp"

namespace trivol {

// Pre-trains a model of cfg's architecture on a dense axial stack extracted
// from the atlas volume, returning it once a held-out slice set reaches
// ssim_target. If the cap is hit while the held-out score is still below
// ssim_floor the atlas is unusable and AtlasFitError is thrown; between
// floor and target the best-effort model is returned.
Model fit_atlas(const DenseVolume& atlas, const TrainConfig& cfg, double ssim_target = 0.95,
                double ssim_floor = 0.80, std::uint32_t max_epochs = 4000);

// Loads the fitted atlas checkpoint at cfg.atlas_path as a warm start for a
// reconstruction; backs init = atlas. Tri-planar only, and the checkpoint
// must match the run config's architecture exactly.
Model init_from_atlas(const TrainConfig& cfg);

}  // namespace trivol
