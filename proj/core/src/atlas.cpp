#include "trivol/atlas.hpp"

#include <cmath>
#include <string>

#include "trivol/errors.hpp"
#include "trivol/eval.hpp"
#include "trivol/trainer.hpp"

namespace trivol {

Model fit_atlas(const DenseVolume& atlas, const TrainConfig& cfg, double ssim_target,
                double ssim_floor, std::uint32_t max_epochs) {
  if (!(ssim_target > 0.0 && ssim_target <= 1.0)) {
    throw ConfigError("atlas ssim_target must lie in (0, 1]");
  }
  if (!(ssim_floor > 0.0 && ssim_floor <= ssim_target)) {
    throw ConfigError("atlas ssim_floor must lie in (0, ssim_target]");
  }
  if (max_epochs < 1) throw ConfigError("atlas fit needs at least one epoch");
  if (atlas.dims[0] < 2 || atlas.dims[1] < 2 || atlas.dims[2] < 2) {
    throw ShapeError("atlas volume must be at least 2 voxels per axis");
  }

  // Dense axial coverage of the atlas at its own resolution.
  const std::vector<Pose> poses = axial_stack_poses(atlas.dims[2]);
  std::vector<Image2D> stack;
  stack.reserve(poses.size());
  for (const Pose& pose : poses) {
    stack.push_back(extract_slice(atlas, pose_to_grid(pose, atlas.dims[1], atlas.dims[0])));
  }

  TrainConfig fit_cfg = cfg;
  fit_cfg.epochs = max_epochs;
  fit_cfg.eval_every = 25;
  fit_cfg.stop_ssim = ssim_target;
  fit_cfg.learn_poses = false;
  fit_cfg.init = InitKind::Random;
  fit_cfg.atlas_path.clear();

  // Held-out quality is scored on coronal views the axial fit never saw.
  EvalSpec spec;
  spec.families = {{TestFamily::Coronal, 8}};
  TrainHooks hooks;
  hooks.evaluate = [&](const Model& model, const std::vector<Pose>& current) {
    return eval_scores(model, atlas, spec, current);
  };

  const TrainResult run = reconstruct(stack, poses, fit_cfg, hooks);
  double held_out = std::numeric_limits<double>::quiet_NaN();
  for (auto it = run.report.rows.rbegin(); it != run.report.rows.rend(); ++it) {
    if (std::isfinite(it->test.coronal)) {
      held_out = -it->test.coronal;
      break;
    }
  }
  if (!std::isfinite(held_out) || held_out < ssim_floor) {
    throw AtlasFitError("atlas fit stalled: held-out SSIM " + std::to_string(held_out) +
                        " is below the acceptable floor " + std::to_string(ssim_floor) +
                        " after " + std::to_string(max_epochs) + " epochs");
  }
  return run.model;
}

Model init_from_atlas(const TrainConfig& cfg) {
  if (cfg.atlas_path.empty()) throw ConfigError("atlas initialization needs atlas_path");
  if (cfg.representation != Representation::TriPlanar) {
    throw ConfigError("atlas initialization supports the tri-planar representation only");
  }
  Model model = load_model(cfg.atlas_path);
  const auto* field = std::get_if<TriPlanarField>(&model.field);
  if (field == nullptr) {
    throw ConfigError(cfg.atlas_path + ": atlas checkpoint does not hold a tri-planar field");
  }
  // The warm start must be architecture-identical to what the run would have
  // built, otherwise the optimizer state laws (widths, ranks) silently shift.
  const std::array<std::uint32_t, 3> want_res{cfg.field_res, cfg.field_res, cfg.field_res};
  if (field->res != want_res || field->rank != cfg.rank || field->channels != cfg.channels ||
      field->combiner != cfg.combiner) {
    throw ConfigError(cfg.atlas_path + ": atlas checkpoint shape differs from the run config");
  }
  if (model.encoding.degree != cfg.encoding.degree ||
      model.encoding.include_raw != cfg.encoding.include_raw ||
      model.decoder.cfg.n_layers != cfg.mlp_layers ||
      model.decoder.cfg.hidden_width != cfg.mlp_width) {
    throw ConfigError(cfg.atlas_path +
                      ": atlas checkpoint decoder/encoding differs from the run config");
  }
  return model;
}

}  // namespace trivol
