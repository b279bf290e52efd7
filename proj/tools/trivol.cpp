// trivol — slice-to-volume reconstruction workbench.
//
// Subcommands: simulate | reconstruct | render | evaluate | ablate | bench |
// atlas-fit. Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
// failure. Every run writes its resolved configuration next to its outputs.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "trivol/atlas.hpp"
#include "trivol/checkpoint.hpp"
#include "trivol/errors.hpp"
#include "trivol/eval.hpp"
#include "trivol/geometry.hpp"
#include "trivol/run_config.hpp"
#include "trivol/trainer.hpp"
#include "trivol/volume.hpp"

namespace fs = std::filesystem;

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_kv(const fs::path& path, const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw trivol::IoError(path.string() + ": cannot open for writing");
  std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<trivol::Image2D> load_slice_stack(const std::string& dir) {
  if (!fs::is_directory(dir)) throw trivol::IoError(dir + ": not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("slice_", 0) != 0) continue;
    if (entry.path().extension() != ".rvol" && entry.path().extension() != ".pgm") continue;
    files.push_back(entry.path().string());
  }
  if (files.empty()) throw trivol::IoError(dir + ": no slice_*.rvol or slice_*.pgm images found");
  std::sort(files.begin(), files.end());
  std::vector<trivol::Image2D> stack;
  stack.reserve(files.size());
  for (const std::string& f : files) stack.push_back(trivol::load_image(f));
  return stack;
}

trivol::EvalSpec eval_spec_from(const std::string& families_csv, std::uint32_t n,
                                std::uint32_t rows, std::uint32_t cols) {
  trivol::EvalSpec spec;
  spec.families.clear();
  spec.rows = rows;
  spec.cols = cols;
  std::size_t from = 0;
  while (from <= families_csv.size()) {
    const std::size_t comma = families_csv.find(',', from);
    const std::string tok =
        families_csv.substr(from, comma == std::string::npos ? std::string::npos : comma - from);
    if (!tok.empty()) spec.families.push_back({trivol::parse_test_family(tok), n});
    if (comma == std::string::npos) break;
    from = comma + 1;
  }
  if (spec.families.empty()) throw trivol::ConfigError("no view families requested");
  return spec;
}

std::array<double, 6> parse_pose_csv(const std::string& text) {
  std::vector<std::string> toks;
  std::size_t from = 0;
  while (true) {
    const std::size_t comma = text.find(',', from);
    toks.push_back(text.substr(from, comma == std::string::npos ? std::string::npos : comma - from));
    if (comma == std::string::npos) break;
    from = comma + 1;
  }
  if (toks.size() != 6) {
    throw trivol::ConfigError("pose must be six comma-separated numbers "
                              "(e1,e2,e3,t1,t2,t3), got " +
                              std::to_string(toks.size()) + " in \"" + text + "\"");
  }
  std::array<double, 6> vals{};
  for (int i = 0; i < 6; ++i) {
    try {
      std::size_t used = 0;
      vals[i] = std::stod(toks[i], &used);
      if (used != toks[i].size()) throw std::invalid_argument(toks[i]);
    } catch (const std::exception&) {
      throw trivol::ConfigError("bad pose component \"" + toks[i] + "\"");
    }
  }
  return vals;
}

std::pair<std::uint32_t, std::uint32_t> parse_size(const std::string& text) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size()) {
    throw trivol::ConfigError("size must look like 256x256, got \"" + text + "\"");
  }
  try {
    std::size_t used = 0;
    const unsigned long rows = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string cols_str = text.substr(x + 1);
    const unsigned long cols = std::stoul(cols_str, &used);
    if (used != cols_str.size()) throw std::invalid_argument(text);
    if (rows < 2 || cols < 2 || rows > 1u << 16 || cols > 1u << 16) {
      throw std::out_of_range(text);
    }
    return {static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols)};
  } catch (const trivol::Error&) {
    throw;
  } catch (const std::exception&) {
    throw trivol::ConfigError("size must look like 256x256, got \"" + text + "\"");
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string volume_path;
  std::uint64_t phantom_seed = 0;
  bool have_volume = false;
  bool have_phantom = false;
  std::uint32_t phantom_dim = 64;
  std::uint32_t phantom_shells = 5;
  double phantom_texture_freq = 6.0;
  std::string sweep = "axial";
  std::uint32_t n = 64;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  if (a.have_volume == a.have_phantom) {
    throw trivol::ConfigError("give exactly one volume source: --volume or --phantom-seed");
  }
  if (a.noise < 0.0) throw trivol::ConfigError("--noise must be >= 0");
  trivol::DenseVolume vol;
  if (a.have_volume) {
    vol = trivol::load_volume(a.volume_path);
  } else {
    trivol::PhantomSpec spec;
    spec.dims = {a.phantom_dim, a.phantom_dim, a.phantom_dim};
    spec.seed = a.phantom_seed;
    spec.n_ellipsoids = a.phantom_shells;
    spec.texture_freq = a.phantom_texture_freq;
    vol = trivol::generate_phantom(spec);
  }

  std::vector<trivol::Pose> true_poses;
  if (a.sweep == "axial") {
    true_poses = trivol::axial_stack_poses(a.n);
  } else if (a.sweep == "coronal360") {
    true_poses = trivol::rotated_coronal_poses(a.n);
  } else {
    throw trivol::ConfigError("--sweep must be axial or coronal360, got \"" + a.sweep + "\"");
  }

  fs::create_directories(a.out);
  const fs::path out(a.out);
  trivol::save_volume(vol, (out / "ground_truth.rvol").string());
  for (std::uint32_t k = 0; k < true_poses.size(); ++k) {
    const trivol::SliceGrid grid = trivol::pose_to_grid(true_poses[k], vol.dims[1], vol.dims[0]);
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04u.rvol", k);
    trivol::save_image(trivol::extract_slice(vol, grid), (out / name).string());
  }
  if (a.noise > 0.0) {
    const std::vector<trivol::Pose> noisy =
        trivol::perturb_poses(true_poses, a.noise, a.seed, vol.dims[0]);
    trivol::save_poses(noisy, (out / "poses.txt").string());
    trivol::save_poses(true_poses, (out / "poses_true.txt").string());
  } else {
    trivol::save_poses(true_poses, (out / "poses.txt").string());
  }

  KeyValues kv{{"command", "simulate"},
               {"source", a.have_volume ? "volume" : "phantom"},
               {"volume", a.volume_path},
               {"phantom_seed", std::to_string(a.phantom_seed)},
               {"phantom_dim", std::to_string(a.phantom_dim)},
               {"phantom_shells", std::to_string(a.phantom_shells)},
               {"phantom_texture_freq", fmt(a.phantom_texture_freq)},
               {"sweep", a.sweep},
               {"n", std::to_string(a.n)},
               {"noise", fmt(a.noise)},
               {"seed", std::to_string(a.seed)}};
  write_kv(out / "simulate_config.txt", kv);
  std::printf("simulate: wrote %zu slices (%s sweep) to %s\n", true_poses.size(),
              a.sweep.c_str(), a.out.c_str());
}

// -------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string images;
  std::string poses;
  std::string config;
  std::string out;
  std::string gt;
  std::string true_poses;
  std::uint32_t eval_n = 64;
};

void run_reconstruct(const ReconstructArgs& a) {
  const trivol::TrainConfig cfg = trivol::parse_train_config(a.config);
  const std::vector<trivol::Image2D> stack = load_slice_stack(a.images);
  const std::vector<trivol::Pose> poses = trivol::load_poses(a.poses);
  if (stack.size() != poses.size()) {
    throw trivol::ShapeError("found " + std::to_string(stack.size()) + " images but " +
                             std::to_string(poses.size()) + " poses");
  }

  fs::create_directories(a.out);
  const fs::path out(a.out);
  trivol::write_train_config(cfg, (out / "config.txt").string());

  std::optional<trivol::DenseVolume> gt;
  trivol::EvalSpec spec;
  spec.families = {{trivol::TestFamily::Axial, a.eval_n},
                   {trivol::TestFamily::Coronal, a.eval_n},
                   {trivol::TestFamily::Sagittal, a.eval_n}};
  std::optional<std::vector<trivol::Pose>> truth;
  std::vector<trivol::PoseErrorRow> pose_trace;
  if (!a.true_poses.empty()) {
    truth = trivol::load_poses(a.true_poses);
    if (truth->size() != poses.size()) {
      throw trivol::ShapeError("true-pose table has " + std::to_string(truth->size()) +
                               " entries for " + std::to_string(poses.size()) + " slices");
    }
  }

  trivol::TrainHooks hooks;
  if (!a.gt.empty()) {
    gt = trivol::load_volume(a.gt);
    hooks.evaluate = [&](const trivol::Model& model, const std::vector<trivol::Pose>& current) {
      return trivol::eval_scores(model, *gt, spec, current);
    };
  }
  const std::uint32_t grid_dim = stack.front().cols;
  hooks.on_row = [&](const trivol::ReportRow& row, const trivol::Model&,
                     const std::vector<trivol::Pose>& current) {
    if (truth) pose_trace.push_back(trivol::compute_pose_error(row.epoch, current, *truth, grid_dim));
  };

  const trivol::TrainResult result = trivol::reconstruct(stack, poses, cfg, hooks);

  trivol::save_model(result.model, (out / "checkpoint.rfld").string());
  trivol::write_report(result.report, (out / "report.csv").string());
  if (cfg.learn_poses) trivol::save_poses(result.poses, (out / "poses_refined.txt").string());
  if (truth) trivol::write_pose_errors(pose_trace, (out / "pose_errors.csv").string());

  const trivol::ReportRow& last = result.report.rows.back();
  std::printf("reconstruct: epoch %u train_loss %.4f (%.1fs); outputs in %s\n", last.epoch,
              last.train_loss, last.seconds, a.out.c_str());
}

// ------------------------------------------------------------------ render

struct RenderArgs {
  std::string ckpt;
  std::string pose;
  std::string size = "64x64";
  std::string out;
};

void run_render(const RenderArgs& a) {
  const trivol::Model model = trivol::load_model(a.ckpt);
  const std::array<double, 6> v = parse_pose_csv(a.pose);
  const auto [rows, cols] = parse_size(a.size);
  trivol::Pose pose;
  pose.euler_deg = {v[0], v[1], v[2]};
  pose.trans = {v[3], v[4], v[5]};
  const trivol::Image2D img = trivol::render_slice(model, trivol::pose_to_grid(pose, rows, cols));
  if (const fs::path parent = fs::path(a.out).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  trivol::save_image(img, a.out);
  write_kv(a.out + ".config.txt", {{"command", "render"},
                                   {"ckpt", a.ckpt},
                                   {"pose", a.pose},
                                   {"size", a.size}});
  std::printf("render: wrote %ux%u view to %s\n", rows, cols, a.out.c_str());
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string ckpt;
  std::string gt;
  std::string families = "axial,coronal,sagittal";
  std::uint32_t n = 64;
  std::string size;
  std::string train_poses;
  std::string out;
};

void run_evaluate(const EvaluateArgs& a) {
  const trivol::Model model = trivol::load_model(a.ckpt);
  const trivol::DenseVolume gt = trivol::load_volume(a.gt);
  std::uint32_t rows = 0, cols = 0;
  if (!a.size.empty()) std::tie(rows, cols) = parse_size(a.size);
  const trivol::EvalSpec spec = eval_spec_from(a.families, a.n, rows, cols);
  std::vector<trivol::Pose> train_poses;
  if (!a.train_poses.empty()) train_poses = trivol::load_poses(a.train_poses);

  const std::vector<trivol::FamilyScore> scores = trivol::evaluate(model, gt, spec, train_poses);
  std::fputs(trivol::format_family_table(scores).c_str(), stdout);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  std::string csv = "family,n,loss_mean,loss_std\n";
  for (const auto& fs_ : scores) {
    csv += trivol::to_string(fs_.family) + "," + std::to_string(fs_.n) + "," +
           fmt(fs_.loss.mean) + "," + fmt(fs_.loss.stddev) + "\n";
  }
  std::FILE* f = std::fopen((out / "eval.csv").string().c_str(), "wb");
  if (!f) throw trivol::IoError((out / "eval.csv").string() + ": cannot open for writing");
  std::fwrite(csv.data(), 1, csv.size(), f);
  std::fclose(f);
  write_kv(out / "evaluate_config.txt", {{"command", "evaluate"},
                                         {"ckpt", a.ckpt},
                                         {"gt", a.gt},
                                         {"families", a.families},
                                         {"n", std::to_string(a.n)},
                                         {"size", a.size},
                                         {"train_poses", a.train_poses}});
}

// ------------------------------------------------------------------ ablate

struct AblateArgs {
  std::string images;
  std::string poses;
  std::string test_images;
  std::string test_poses;
  std::string config;
  std::string out;
};

void run_ablate(const AblateArgs& a) {
  const trivol::TrainConfig base = trivol::parse_train_config(a.config);
  const std::vector<trivol::Image2D> stack = load_slice_stack(a.images);
  const std::vector<trivol::Pose> poses = trivol::load_poses(a.poses);
  const std::vector<trivol::Image2D> test_stack = load_slice_stack(a.test_images);
  const std::vector<trivol::Pose> test_poses = trivol::load_poses(a.test_poses);
  if (stack.size() != poses.size()) {
    throw trivol::ShapeError("found " + std::to_string(stack.size()) + " images but " +
                             std::to_string(poses.size()) + " poses");
  }

  const trivol::AblationTable table =
      trivol::ablation_sweep(stack, poses, test_stack, test_poses,
                             trivol::default_ablation_rows(),
                             trivol::default_ablation_columns(), base);
  fs::create_directories(a.out);
  const fs::path out(a.out);
  trivol::write_ablation_csv(table, (out / "ablation.csv").string());
  trivol::write_train_config(base, (out / "config.txt").string());
  std::fputs(trivol::format_ablation_csv(table).c_str(), stdout);
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string images;
  std::string poses;
  std::string gt;
  std::string config;
  double budget = 600.0;
  std::uint32_t eval_n = 16;
  std::string out;
};

void run_bench(const BenchArgs& a) {
  trivol::TrainConfig tri;
  if (!a.config.empty()) tri = trivol::parse_train_config(a.config);
  trivol::TrainConfig imp = trivol::implicit_baseline_config();
  imp.epochs = tri.epochs;
  imp.eval_every = tri.eval_every;
  imp.seed = tri.seed;
  imp.batch_slices = tri.batch_slices;

  const std::vector<trivol::Image2D> stack = load_slice_stack(a.images);
  const std::vector<trivol::Pose> poses = trivol::load_poses(a.poses);
  if (stack.size() != poses.size()) {
    throw trivol::ShapeError("found " + std::to_string(stack.size()) + " images but " +
                             std::to_string(poses.size()) + " poses");
  }
  const trivol::DenseVolume gt = trivol::load_volume(a.gt);
  trivol::EvalSpec spec;
  spec.families = {{trivol::TestFamily::Coronal, a.eval_n}};

  const trivol::TimingProfile profile = trivol::timing_profile(
      {{"triplanar", tri}, {"implicit", imp}}, stack, poses, gt, spec, a.budget);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  trivol::write_curves(profile, (out / "curves.txt").string());
  trivol::write_train_config(tri, (out / "config.txt").string());

  const double tri_s = trivol::per_epoch_seconds(profile.curves[0]);
  const double imp_s = trivol::per_epoch_seconds(profile.curves[1]);
  const double ratio = trivol::speed_ratio(profile, 1, profile, 0);
  const std::size_t tri_macs = trivol::pixel_macs(trivol::make_model(tri));
  const std::size_t imp_macs = trivol::pixel_macs(trivol::make_model(imp));
  std::printf("device: %s\n", profile.device.c_str());
  std::printf("per-epoch seconds: triplanar %.4f, implicit %.4f (ratio %.2fx)\n", tri_s, imp_s,
              ratio);
  std::printf("per-pixel MACs:    triplanar %zu, implicit %zu\n", tri_macs, imp_macs);
}

// --------------------------------------------------------------- atlas-fit

struct AtlasFitArgs {
  std::string atlas;
  std::string config;
  std::string out;
  double target = 0.95;
  double floor = 0.80;
  std::uint32_t max_epochs = 4000;
};

void run_atlas_fit(const AtlasFitArgs& a) {
  const trivol::TrainConfig cfg = trivol::parse_train_config(a.config);
  const trivol::DenseVolume atlas = trivol::load_volume(a.atlas);
  const trivol::Model model = trivol::fit_atlas(atlas, cfg, a.target, a.floor, a.max_epochs);
  if (const fs::path parent = fs::path(a.out).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  trivol::save_model(model, a.out);
  write_kv(a.out + ".config.txt", {{"command", "atlas-fit"},
                                   {"atlas", a.atlas},
                                   {"config", a.config},
                                   {"target", fmt(a.target)},
                                   {"floor", fmt(a.floor)},
                                   {"max_epochs", std::to_string(a.max_epochs)}});
  std::printf("atlas-fit: wrote %s\n", a.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slice-to-volume reconstruction workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trivol 0.1.0");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a posed slice stack");
  auto* sim_vol = c_sim->add_option("--volume", sim.volume_path, "ground-truth volume (.rvol)");
  auto* sim_ph = c_sim->add_option("--phantom-seed", sim.phantom_seed, "generate a phantom");
  c_sim->add_option("--phantom-dim", sim.phantom_dim, "phantom edge length")->check(CLI::Range(8u, 512u));
  c_sim->add_option("--phantom-shells", sim.phantom_shells, "nested shells");
  c_sim->add_option("--phantom-texture-freq", sim.phantom_texture_freq, "texture frequency");
  c_sim->add_option("--sweep", sim.sweep, "axial | coronal360");
  c_sim->add_option("--n", sim.n, "number of slices")->check(CLI::Range(2u, 100000u));
  c_sim->add_option("--noise", sim.noise, "pose noise half-width (deg / voxels)");
  c_sim->add_option("--seed", sim.seed, "noise seed");
  c_sim->add_option("--out", sim.out, "output directory")->required();
  c_sim->callback([&] {
    sim.have_volume = sim_vol->count() > 0;
    sim.have_phantom = sim_ph->count() > 0;
    run_simulate(sim);
  });

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "fit a model to posed slices");
  c_rec->add_option("--images", rec.images, "slice directory")->required();
  c_rec->add_option("--poses", rec.poses, "pose table")->required();
  c_rec->add_option("--config", rec.config, "training config")->required();
  c_rec->add_option("--out", rec.out, "output directory")->required();
  c_rec->add_option("--gt", rec.gt, "ground-truth volume for test columns");
  c_rec->add_option("--true-poses", rec.true_poses, "true poses for pose-error tracing");
  c_rec->add_option("--eval-n", rec.eval_n, "views per test family");
  c_rec->callback([&] { run_reconstruct(rec); });

  RenderArgs ren;
  auto* c_ren = app.add_subcommand("render", "render one cross-section from a checkpoint");
  c_ren->add_option("--ckpt", ren.ckpt, "model checkpoint")->required();
  c_ren->add_option("--pose", ren.pose, "e1,e2,e3,t1,t2,t3 (deg, normalized)")->required();
  c_ren->add_option("--size", ren.size, "RxC output resolution");
  c_ren->add_option("--out", ren.out, "output image (.pgm or .rvol)")->required();
  c_ren->callback([&] { run_render(ren); });

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "score novel views against ground truth");
  c_ev->add_option("--ckpt", ev.ckpt, "model checkpoint")->required();
  c_ev->add_option("--gt", ev.gt, "ground-truth volume")->required();
  c_ev->add_option("--families", ev.families, "comma list of axial,coronal,sagittal");
  c_ev->add_option("--n", ev.n, "views per family")->check(CLI::Range(1u, 100000u));
  c_ev->add_option("--size", ev.size, "RxC view resolution (default: volume extent)");
  c_ev->add_option("--train-poses", ev.train_poses, "training poses for the overlap check");
  c_ev->add_option("--out", ev.out, "output directory")->required();
  c_ev->callback([&] { run_evaluate(ev); });

  AblateArgs ab;
  auto* c_ab = app.add_subcommand("ablate", "run the setup-comparison grid");
  c_ab->add_option("--images", ab.images, "training slice directory")->required();
  c_ab->add_option("--poses", ab.poses, "training pose table")->required();
  c_ab->add_option("--test-images", ab.test_images, "test slice directory")->required();
  c_ab->add_option("--test-poses", ab.test_poses, "test pose table")->required();
  c_ab->add_option("--config", ab.config, "base training config")->required();
  c_ab->add_option("--out", ab.out, "output directory")->required();
  c_ab->callback([&] { run_ablate(ab); });

  BenchArgs be;
  auto* c_be = app.add_subcommand("bench", "profile factorized vs implicit training speed");
  c_be->add_option("--images", be.images, "training slice directory")->required();
  c_be->add_option("--poses", be.poses, "training pose table")->required();
  c_be->add_option("--gt", be.gt, "ground-truth volume")->required();
  c_be->add_option("--config", be.config, "factorized training config (default: defaults)");
  c_be->add_option("--budget", be.budget, "wall budget per run, seconds");
  c_be->add_option("--eval-n", be.eval_n, "test views per sample");
  c_be->add_option("--out", be.out, "output directory")->required();
  c_be->callback([&] { run_bench(be); });

  AtlasFitArgs at;
  auto* c_at = app.add_subcommand("atlas-fit", "pre-fit a model to an atlas volume");
  c_at->add_option("--atlas", at.atlas, "atlas volume (.rvol)")->required();
  c_at->add_option("--config", at.config, "training config")->required();
  c_at->add_option("--out", at.out, "output checkpoint path")->required();
  c_at->add_option("--target", at.target, "held-out SSIM to stop at");
  c_at->add_option("--floor", at.floor, "minimum acceptable held-out SSIM");
  c_at->add_option("--max-epochs", at.max_epochs, "fit epoch cap");
  c_at->callback([&] { run_atlas_fit(at); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const trivol::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const trivol::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const trivol::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
