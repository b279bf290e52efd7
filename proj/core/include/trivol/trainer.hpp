#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "trivol/checkpoint.hpp"
#include "trivol/geometry.hpp"
#include "trivol/run_config.hpp"
#include "trivol/volume.hpp"

namespace trivol {

// Per-family mean test loss (negative SSIM, lower is better). Families the
// caller does not evaluate stay NaN and are skipped by early stopping.
struct EvalScores {
  double axial = std::numeric_limits<double>::quiet_NaN();
  double coronal = std::numeric_limits<double>::quiet_NaN();
  double sagittal = std::numeric_limits<double>::quiet_NaN();
};

struct ReportRow {
  std::uint32_t epoch = 0;   // 0 = state before any parameter update
  double seconds = 0.0;      // wall clock since training start
  double train_loss = 0.0;   // mean -SSIM over the training stack
  EvalScores test;
};

// Metric/timing trace of one run. notes become '#' lines above the CSV
// header (epoch,seconds,train_loss,test_axial,test_coronal,test_sagittal).
struct RunReport {
  std::vector<std::string> notes;
  std::vector<ReportRow> rows;
};

std::string format_report(const RunReport& report);
void write_report(const RunReport& report, const std::string& path);
RunReport read_report(const std::string& path);

// Build an untrained model for a config (random init; atlas init is applied
// by reconstruct itself). Decoder input width is derived from the
// representation's channel count and the encoding.
Model make_model(const TrainConfig& cfg);

// Render one cross-section: per pixel, sample the field at the grid coord
// (or take the raw coordinate for the implicit representation), encode,
// decode. Output pixels lie in (0, 1); any grid resolution is accepted.
Image2D render_slice(const Model& model, const SliceGrid& grid);

struct TrainHooks {
  // Per-family test loss, called at recorded epochs with the live model and
  // the current (possibly refined) training poses.
  std::function<EvalScores(const Model&, const std::vector<Pose>&)> evaluate;
  // Observer for every recorded row, e.g. to checkpoint or trace pose error.
  std::function<void(const ReportRow&, const Model&, const std::vector<Pose>&)> on_row;
  // Extra stop condition checked at recorded rows (e.g. a wall-time budget).
  std::function<bool(const ReportRow&)> should_stop;
};

struct TrainResult {
  Model model;
  std::vector<Pose> poses;  // refined when learn_poses, else the input poses
  RunReport report;
};

// Fit a model to posed slices by per-slice (or batched) gradient steps on
// -SSIM: field and decoder via SGD (lr_field / lr_decoder), learnable poses
// via per-pose Adam (lr_pose). Rows are recorded at epoch 0, every
// eval_every epochs, and the final epoch. Training stops early once every
// finite evaluated family reaches -stop_ssim. A non-finite loss aborts with
// NumericError naming the epoch and slice.
TrainResult reconstruct(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                        const TrainConfig& cfg, const TrainHooks& hooks = {});

// Comparison baseline: identical loop with the coordinate-network
// representation (cfg.representation is forced to implicit).
TrainResult train_implicit(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                           const TrainConfig& cfg, const TrainHooks& hooks = {});

// Pose-robustness experiment: trains from noisy poses and traces the mean
// absolute pose error against the true poses (angles in degrees,
// translations in voxels of grid_dim) at every recorded epoch.
struct PoseErrorRow {
  std::uint32_t epoch = 0;
  double mean_abs_angle_deg = 0.0;
  double mean_abs_trans_voxels = 0.0;
  double combined = 0.0;  // mean over all 6N absolute component errors
};

struct NoisyPoseResult {
  TrainResult train;
  std::vector<PoseErrorRow> pose_errors;
};

// Mean absolute parameter error of current vs truth; angles stay in degrees,
// translations are scaled to voxels of a grid_dim-wide volume, and combined
// averages all six components in those mixed units.
PoseErrorRow compute_pose_error(std::uint32_t epoch, const std::vector<Pose>& current,
                                const std::vector<Pose>& truth, std::uint32_t grid_dim);

NoisyPoseResult reconstruct_with_noisy_poses(const std::vector<Image2D>& stack,
                                             const std::vector<Pose>& true_poses,
                                             double noise_halfwidth, std::uint32_t grid_dim,
                                             const TrainConfig& cfg, const TrainHooks& hooks = {});

std::string format_pose_errors(const std::vector<PoseErrorRow>& rows);
void write_pose_errors(const std::vector<PoseErrorRow>& rows, const std::string& path);

// One row of the setup-comparison sweep: a representation plus decoder shape.
struct AblationRowSpec {
  Representation representation = Representation::TriPlanar;
  std::uint32_t mlp_layers = 2;
  std::uint32_t mlp_width = 64;
};

struct AblationColumnSpec {
  std::string label;
  EncodingConfig encoding;
};

struct AblationTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  // Final mean test loss (-SSIM) per cell; configurations whose training
  // diverges are recorded as NaN, never propagated.
  std::vector<std::vector<double>> cells;
};

// The published comparison layout: six tri-planar decoder shapes
// (2-128, 3-128, 4-128, 3-32, 3-64, 2-64) plus CP with 2-64, against seven
// encoding columns (L=0, L=2, L=5, L=10, and the three + input variants).
std::vector<AblationRowSpec> default_ablation_rows();
std::vector<AblationColumnSpec> default_ablation_columns();

AblationTable ablation_sweep(const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                             const std::vector<Image2D>& test_stack,
                             const std::vector<Pose>& test_poses,
                             const std::vector<AblationRowSpec>& rows,
                             const std::vector<AblationColumnSpec>& columns,
                             const TrainConfig& base);

std::string format_ablation_csv(const AblationTable& table);
void write_ablation_csv(const AblationTable& table, const std::string& path);

}  // namespace trivol
