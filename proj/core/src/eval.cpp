#include "trivol/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "io_util.hpp"
#include "trivol/errors.hpp"
#include "trivol/loss.hpp"

namespace trivol {

std::string to_string(TestFamily f) {
  switch (f) {
    case TestFamily::Axial: return "axial";
    case TestFamily::Coronal: return "coronal";
    case TestFamily::Sagittal: return "sagittal";
  }
  throw ConfigError("unknown test family enum value");
}

TestFamily parse_test_family(const std::string& s) {
  if (s == "axial") return TestFamily::Axial;
  if (s == "coronal") return TestFamily::Coronal;
  if (s == "sagittal") return TestFamily::Sagittal;
  throw ConfigError("test family must be axial|coronal|sagittal, got \"" + s + "\"");
}

std::vector<Pose> test_family_poses(TestFamily family, std::uint32_t n) {
  if (n < 1) throw ConfigError("test family needs at least one view");
  std::vector<Pose> poses(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    const double t = -1.0 + 2.0 * (double(k) + 0.5) / double(n);
    Pose& p = poses[k];
    p.learnable = false;
    switch (family) {
      case TestFamily::Axial:
        p.trans = {0.0, 0.0, t};
        break;
      case TestFamily::Coronal:
        p.euler_deg = {0.0, 0.0, 90.0};
        p.trans = {0.0, t, 0.0};
        break;
      case TestFamily::Sagittal:
        p.euler_deg = {0.0, 90.0, 0.0};
        p.trans = {t, 0.0, 0.0};
        break;
    }
  }
  return poses;
}

Image2D extract_slice(const DenseVolume& vol, const SliceGrid& grid) {
  if (vol.voxel_count() == 0 || vol.voxels.size() != vol.voxel_count()) {
    throw ShapeError("ground-truth volume is empty or inconsistent");
  }
  Image2D img;
  img.rows = grid.rows;
  img.cols = grid.cols;
  img.pixels.resize(grid.coords.size());
  for (std::size_t i = 0; i < grid.coords.size(); ++i) {
    const auto& p = grid.coords[i];
    img.pixels[i] = static_cast<float>(sample_volume(vol, p[0], p[1], p[2]));
  }
  return img;
}

void check_pose_disjoint(const std::vector<Pose>& test_poses,
                         const std::vector<Pose>& training_poses) {
  constexpr double kTol = 1e-9;
  for (std::size_t t = 0; t < test_poses.size(); ++t) {
    for (std::size_t s = 0; s < training_poses.size(); ++s) {
      bool same = true;
      for (int a = 0; a < 3 && same; ++a) {
        same = std::abs(test_poses[t].euler_deg[a] - training_poses[s].euler_deg[a]) <= kTol &&
               std::abs(test_poses[t].trans[a] - training_poses[s].trans[a]) <= kTol;
      }
      if (same) {
        throw PoseOverlapError("test pose " + std::to_string(t) +
                               " coincides with training pose " + std::to_string(s) +
                               "; the view would not be novel");
      }
    }
  }
}

ScoreStats aggregate_scores(std::span<const double> scores) {
  if (scores.empty()) throw ShapeError("cannot aggregate zero scores");
  ScoreStats stats;
  for (const double v : scores) stats.mean += v;
  stats.mean /= double(scores.size());
  double var = 0.0;
  for (const double v : scores) var += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(var / double(scores.size()));
  return stats;
}

std::vector<FamilyScore> evaluate_with_renderer(const RenderFn& render, const DenseVolume& gt,
                                                const EvalSpec& spec,
                                                const std::vector<Pose>& training_poses) {
  if (!render) throw ConfigError("evaluate needs a renderer");
  if (spec.families.empty()) throw ConfigError("evaluate needs at least one view family");
  const std::uint32_t rows = spec.rows != 0 ? spec.rows : gt.dims[1];
  const std::uint32_t cols = spec.cols != 0 ? spec.cols : gt.dims[0];
  if (rows < 2 || cols < 2) throw ShapeError("evaluation slices need at least 2x2 pixels");
  std::vector<FamilyScore> out;
  out.reserve(spec.families.size());
  for (const FamilySpec& fam : spec.families) {
    const std::vector<Pose> poses = test_family_poses(fam.family, fam.n);
    check_pose_disjoint(poses, training_poses);
    std::vector<double> losses;
    losses.reserve(poses.size());
    for (const Pose& pose : poses) {
      const SliceGrid grid = pose_to_grid(pose, rows, cols);
      const Image2D truth = extract_slice(gt, grid);
      const Image2D rendered = render(grid);
      losses.push_back(training_loss(rendered, truth));
    }
    FamilyScore score;
    score.family = fam.family;
    score.n = fam.n;
    score.loss = aggregate_scores(losses);
    out.push_back(score);
  }
  return out;
}

std::vector<FamilyScore> evaluate(const Model& model, const DenseVolume& gt, const EvalSpec& spec,
                                  const std::vector<Pose>& training_poses) {
  validate_model(model);
  return evaluate_with_renderer([&model](const SliceGrid& grid) { return render_slice(model, grid); },
                                gt, spec, training_poses);
}

EvalScores eval_scores(const Model& model, const DenseVolume& gt, const EvalSpec& spec,
                       const std::vector<Pose>& training_poses) {
  EvalScores scores;
  for (const FamilyScore& fs : evaluate(model, gt, spec, training_poses)) {
    switch (fs.family) {
      case TestFamily::Axial: scores.axial = fs.loss.mean; break;
      case TestFamily::Coronal: scores.coronal = fs.loss.mean; break;
      case TestFamily::Sagittal: scores.sagittal = fs.loss.mean; break;
    }
  }
  return scores;
}

std::string format_family_table(const std::vector<FamilyScore>& scores) {
  std::ostringstream out;
  out << "view family      n    -SSIM mean      +/- std\n";
  for (const FamilyScore& fs : scores) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %5u    %10.4f    %9.4f\n", to_string(fs.family).c_str(),
                  fs.n, fs.loss.mean, fs.loss.stddev);
    out << buf;
  }
  return out.str();
}

std::string device_fingerprint() {
  std::string model = "unknown-cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      const std::size_t colon = line.find(':');
      if (colon != std::string::npos) {
        std::size_t start = line.find_first_not_of(" \t", colon + 1);
        if (start != std::string::npos) model = line.substr(start);
      }
      break;
    }
  }
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  return model + " (" + std::to_string(cores) + " hw threads)";
}

TimingProfile timing_profile(const std::vector<std::pair<std::string, TrainConfig>>& configs,
                             const std::vector<Image2D>& stack, const std::vector<Pose>& poses,
                             const DenseVolume& gt, const EvalSpec& spec,
                             double wall_budget_seconds) {
  if (configs.size() < 2) {
    throw ConfigError("timing_profile compares configs; give at least two");
  }
  if (!(wall_budget_seconds > 0.0)) throw ConfigError("wall budget must be positive");
  TimingProfile profile;
  profile.device = device_fingerprint();
  for (const auto& [label, cfg] : configs) {
    TimingCurve curve;
    curve.label = label;
    TrainHooks hooks;
    hooks.evaluate = [&](const Model& model, const std::vector<Pose>& current) {
      return eval_scores(model, gt, spec, current);
    };
    hooks.on_row = [&curve](const ReportRow& row, const Model&, const std::vector<Pose>&) {
      int n_finite = 0;
      double total = 0.0;
      for (const double v : {row.test.axial, row.test.coronal, row.test.sagittal}) {
        if (std::isfinite(v)) {
          ++n_finite;
          total += v;
        }
      }
      CurvePoint point;
      point.epoch = row.epoch;
      point.seconds = row.seconds;
      point.test_loss = n_finite > 0 ? total / n_finite : std::numeric_limits<double>::quiet_NaN();
      curve.points.push_back(point);
    };
    hooks.should_stop = [&curve, wall_budget_seconds](const ReportRow& row) {
      if (row.seconds >= wall_budget_seconds) {
        curve.truncated = true;
        return true;
      }
      return false;
    };
    const TrainResult run = reconstruct(stack, poses, cfg, hooks);
    if (!run.report.rows.empty() && run.report.rows.back().epoch >= cfg.epochs) {
      curve.truncated = false;  // finished the epoch cap within budget
    }
    profile.curves.push_back(std::move(curve));
  }
  return profile;
}

double per_epoch_seconds(const TimingCurve& curve) {
  if (curve.points.empty() || curve.points.back().epoch == 0) {
    throw ShapeError("curve \"" + curve.label + "\" has no completed training epochs");
  }
  const CurvePoint& last = curve.points.back();
  return last.seconds / double(last.epoch);
}

double speed_ratio(const TimingProfile& slow_profile, std::size_t slow_index,
                   const TimingProfile& fast_profile, std::size_t fast_index) {
  if (slow_index >= slow_profile.curves.size() || fast_index >= fast_profile.curves.size()) {
    throw ConfigError("speed_ratio curve index out of range");
  }
  if (slow_profile.device != fast_profile.device) {
    throw ConfigError("timing profiles come from different devices (\"" + slow_profile.device +
                      "\" vs \"" + fast_profile.device + "\"); refusing a speed ratio");
  }
  return per_epoch_seconds(slow_profile.curves[slow_index]) /
         per_epoch_seconds(fast_profile.curves[fast_index]);
}

std::string format_curves(const TimingProfile& profile) {
  std::ostringstream out;
  out << "# device: " << profile.device << "\n";
  out << "# columns: epoch seconds test_loss\n";
  bool first = true;
  for (const TimingCurve& curve : profile.curves) {
    if (!first) out << "\n\n";
    first = false;
    out << "# curve: " << curve.label << (curve.truncated ? " (truncated by wall budget)" : "")
        << "\n";
    for (const CurvePoint& p : curve.points) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%u %.6f %.17g\n", p.epoch, p.seconds, p.test_loss);
      out << buf;
    }
  }
  return out.str();
}

void write_curves(const TimingProfile& profile, const std::string& path) {
  detail::write_file(path, format_curves(profile));
}

std::optional<std::uint32_t> epochs_to_target(const RunReport& report, double target_loss) {
  for (const ReportRow& row : report.rows) {
    int n_finite = 0;
    double total = 0.0;
    for (const double v : {row.test.axial, row.test.coronal, row.test.sagittal}) {
      if (std::isfinite(v)) {
        ++n_finite;
        total += v;
      }
    }
    if (n_finite > 0 && total / n_finite <= target_loss) return row.epoch;
  }
  return std::nullopt;
}

std::size_t pixel_macs(const Model& model) {
  validate_model(model);
  std::size_t macs = 0;
  if (const auto* tp = std::get_if<TriPlanarField>(&model.field)) {
    // Locating the cell (scale + offset per axis), three 4-tap bilinear
    // gathers, and two combiner multiplies plus the rank accumulate.
    macs += 6 + std::size_t(tp->channels) * tp->rank * (3 * 4 + 3);
  } else if (const auto* cp = std::get_if<CPField>(&model.field)) {
    macs += 6 + std::size_t(cp->channels) * cp->rank * (3 * 2 + 3);
  }
  const std::uint32_t channels = field_channels(model.field);
  // Angle-doubling recurrence: one scaling multiply plus two multiplies per
  // level beyond the base trig pair.
  if (model.encoding.degree > 0) {
    macs += std::size_t(channels) * 3 * model.encoding.degree;
  }
  for (std::uint32_t l = 0; l < model.decoder.cfg.n_layers; ++l) {
    macs += std::size_t(model.decoder.in_dim(l)) * model.decoder.out_dim(l) +
            model.decoder.out_dim(l);
  }
  return macs;
}

}  // namespace trivol
