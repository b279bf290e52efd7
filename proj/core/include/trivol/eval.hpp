#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trivol/geometry.hpp"
#include "trivol/run_config.hpp"
#include "trivol/trainer.hpp"
#include "trivol/volume.hpp"

namespace trivol {

enum class TestFamily : std::uint8_t { Axial = 0, Coronal = 1, Sagittal = 2 };
std::string to_string(TestFamily f);
TestFamily parse_test_family(const std::string& s);

// n linearly spaced parallel slices of one anatomical family. Positions sit
// at cell midpoints (-1 + 2(k+0.5)/n), so they never coincide with the
// endpoint-including training stacks regardless of counts.
std::vector<Pose> test_family_poses(TestFamily family, std::uint32_t n);

// Ground truth for a posed view: trilinear sampling of the dense volume.
Image2D extract_slice(const DenseVolume& vol, const SliceGrid& grid);

// Hard error when a test pose equals a training pose in all six parameters
// (tolerance 1e-9): such a view would not be novel.
void check_pose_disjoint(const std::vector<Pose>& test_poses,
                         const std::vector<Pose>& training_poses);

struct FamilySpec {
  TestFamily family = TestFamily::Axial;
  std::uint32_t n = 64;
};

struct EvalSpec {
  std::vector<FamilySpec> families = {{TestFamily::Axial, 64},
                                      {TestFamily::Coronal, 64},
                                      {TestFamily::Sagittal, 64}};
  std::uint32_t rows = 0;  // slice resolution; 0 takes the volume's y extent
  std::uint32_t cols = 0;  // 0 takes the volume's x extent
};

struct ScoreStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};
ScoreStats aggregate_scores(std::span<const double> scores);

struct FamilyScore {
  TestFamily family = TestFamily::Axial;
  std::uint32_t n = 0;
  ScoreStats loss;  // -SSIM across the family's views
};

using RenderFn = std::function<Image2D(const SliceGrid&)>;

// Renders every requested view, extracts the matching ground-truth slice,
// scores -SSIM and aggregates per family. The injectable-renderer form backs
// both the model path and oracle tests.
std::vector<FamilyScore> evaluate_with_renderer(const RenderFn& render, const DenseVolume& gt,
                                                const EvalSpec& spec,
                                                const std::vector<Pose>& training_poses);
std::vector<FamilyScore> evaluate(const Model& model, const DenseVolume& gt, const EvalSpec& spec,
                                  const std::vector<Pose>& training_poses);

// Adapter for TrainHooks::evaluate: per-family mean loss.
EvalScores eval_scores(const Model& model, const DenseVolume& gt, const EvalSpec& spec,
                       const std::vector<Pose>& training_poses);

// Aligned text table (family, n, mean ± std).
std::string format_family_table(const std::vector<FamilyScore>& scores);

struct CurvePoint {
  std::uint32_t epoch = 0;
  double seconds = 0.0;
  double test_loss = 0.0;  // mean over the finite per-family means
};

struct TimingCurve {
  std::string label;
  bool truncated = false;  // the wall budget ran out before the epoch cap
  std::vector<CurvePoint> points;
};

// Timing claims are only comparable on one device, so the fingerprint rides
// along and ratio computations refuse mismatches.
struct TimingProfile {
  std::string device;
  std::vector<TimingCurve> curves;
};

std::string device_fingerprint();

// Trains each labelled config on the same data, sampling test accuracy at
// every recorded epoch, stopping a run once the wall budget is spent.
// Needs >= 2 configs — a single curve cannot support a comparison.
TimingProfile timing_profile(const std::vector<std::pair<std::string, TrainConfig>>& configs,
                             const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                             const DenseVolume& gt, const EvalSpec& spec,
                             double wall_budget_seconds);

// Mean wall-clock seconds per training epoch over the curve.
double per_epoch_seconds(const TimingCurve& curve);

// How many times faster per epoch `fast` is than `slow`. Throws ConfigError
// when the profiles carry different device fingerprints.
double speed_ratio(const TimingProfile& slow_profile, std::size_t slow_index,
                   const TimingProfile& fast_profile, std::size_t fast_index);

// gnuplot-compatible curve blocks (one index per config, blank-line separated).
std::string format_curves(const TimingProfile& profile);
void write_curves(const TimingProfile& profile, const std::string& path);

// First recorded epoch whose mean finite test loss reaches target_loss.
std::optional<std::uint32_t> epochs_to_target(const RunReport& report, double target_loss);

// Counted multiply-accumulates to render one pixel, forward only: lattice
// location, interpolation taps, combiner products, encoding recurrence, and
// dense layers. A deterministic cost proxy, not a wall-clock claim.
std::size_t pixel_macs(const Model& model);

}  // namespace trivol
