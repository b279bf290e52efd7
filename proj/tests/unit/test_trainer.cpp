#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "doctest.h"
#include "trivol/errors.hpp"
#include "trivol/eval.hpp"
#include "trivol/loss.hpp"
#include "trivol/trainer.hpp"
#include "trivol/volume.hpp"

namespace {

struct TinyProblem {
  trivol::DenseVolume gt;
  std::vector<trivol::Image2D> stack;
  std::vector<trivol::Pose> poses;
};

TinyProblem tiny_problem(std::uint32_t dim = 16, std::uint32_t n_slices = 12) {
  TinyProblem p;
  trivol::PhantomSpec spec;
  spec.dims = {dim, dim, dim};
  spec.seed = 3;
  p.gt = trivol::generate_phantom(spec);
  p.poses = trivol::axial_stack_poses(n_slices);
  for (const auto& pose : p.poses) {
    p.stack.push_back(trivol::extract_slice(p.gt, trivol::pose_to_grid(pose, dim, dim)));
  }
  return p;
}

trivol::TrainConfig tiny_config(std::uint32_t epochs = 30) {
  trivol::TrainConfig cfg;
  cfg.field_res = 8;
  cfg.rank = 2;
  cfg.channels = 4;
  cfg.epochs = epochs;
  cfg.eval_every = 10;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_CASE("make_model derives the decoder input width from field and encoding") {
  trivol::TrainConfig cfg = tiny_config();
  cfg.channels = 10;
  cfg.encoding = {2, true};
  const trivol::Model m = trivol::make_model(cfg);
  CHECK(m.decoder.cfg.input_width == 50);  // 10 channels x (2*2 + 1)

  const trivol::Model imp = trivol::make_model(trivol::implicit_baseline_config());
  CHECK(imp.decoder.cfg.input_width == 63);  // 3 coords x (2*10 + 1)
  CHECK(std::holds_alternative<std::monostate>(imp.field));
}

TEST_CASE("render_slice yields pixels strictly inside (0,1)") {
  const trivol::Model m = trivol::make_model(tiny_config());
  trivol::Pose pose;
  pose.euler_deg = {15, 30, -45};
  const trivol::Image2D img = trivol::render_slice(m, trivol::pose_to_grid(pose, 13, 17));
  CHECK(img.rows == 13);
  CHECK(img.cols == 17);
  for (float v : img.pixels) {
    CHECK(v > 0.0f);
    CHECK(v < 1.0f);
  }
}

TEST_CASE("reconstruct validates its inputs") {
  const TinyProblem p = tiny_problem();
  const trivol::TrainConfig cfg = tiny_config();

  auto short_poses = p.poses;
  short_poses.pop_back();
  CHECK_THROWS_WITH_AS((void)trivol::reconstruct(p.stack, short_poses, cfg),
                       doctest::Contains("12"), trivol::ShapeError);

  auto tiny_imgs = p.stack;
  tiny_imgs[0].rows = 4;
  tiny_imgs[0].cols = 4;
  tiny_imgs[0].pixels.assign(16, 0.5f);
  CHECK_THROWS_AS((void)trivol::reconstruct(tiny_imgs, p.poses, cfg), trivol::ShapeError);
}

TEST_CASE("training reduces the loss and the report is well-formed") {
  const TinyProblem p = tiny_problem();
  const trivol::TrainConfig cfg = tiny_config(30);

  trivol::TrainHooks hooks;
  trivol::EvalSpec spec;
  spec.families = {{trivol::TestFamily::Coronal, 4}};
  hooks.evaluate = [&](const trivol::Model& m, const std::vector<trivol::Pose>&) {
    return trivol::eval_scores(m, p.gt, spec, {});
  };
  const trivol::TrainResult res = trivol::reconstruct(p.stack, p.poses, cfg, hooks);

  REQUIRE(res.report.rows.size() >= 3);
  CHECK(res.report.rows.front().epoch == 0);
  CHECK(res.report.rows.back().epoch == 30);
  CHECK(res.report.rows.back().train_loss < res.report.rows.front().train_loss - 0.2);
  CHECK(std::isfinite(res.report.rows.back().test.coronal));
  CHECK(std::isnan(res.report.rows.back().test.axial));  // family not evaluated
  for (std::size_t i = 1; i < res.report.rows.size(); ++i) {
    CHECK(res.report.rows[i].seconds >= res.report.rows[i - 1].seconds);
  }

  // The continuous field renders at resolutions the training stack never
  // used: a 2x upsampled central view must still resemble the ground truth.
  trivol::Pose central;
  const trivol::SliceGrid big = trivol::pose_to_grid(central, 32, 32);
  const double up_loss =
      trivol::training_loss(trivol::render_slice(res.model, big), trivol::extract_slice(p.gt, big));
  CHECK(up_loss < -0.5);
}

TEST_CASE("same config and seed reproduce the loss trace and checkpoint bitwise") {
  const TinyProblem p = tiny_problem();
  const trivol::TrainConfig cfg = tiny_config(20);

  const trivol::TrainResult a = trivol::reconstruct(p.stack, p.poses, cfg);
  const trivol::TrainResult b = trivol::reconstruct(p.stack, p.poses, cfg);
  REQUIRE(a.report.rows.size() == b.report.rows.size());
  for (std::size_t i = 0; i < a.report.rows.size(); ++i) {
    CHECK(a.report.rows[i].epoch == b.report.rows[i].epoch);
    CHECK(a.report.rows[i].train_loss == b.report.rows[i].train_loss);  // bitwise
  }
  const auto& fa = std::get<trivol::TriPlanarField>(a.model.field);
  const auto& fb = std::get<trivol::TriPlanarField>(b.model.field);
  CHECK(fa.planes == fb.planes);
  CHECK(a.model.decoder.weights == b.model.decoder.weights);

  trivol::TrainConfig other = cfg;
  other.seed = 2;
  const trivol::TrainResult c = trivol::reconstruct(p.stack, p.poses, other);
  CHECK(c.report.rows.back().train_loss != a.report.rows.back().train_loss);
}

TEST_CASE("a non-finite target aborts with NumericError naming epoch and slice") {
  TinyProblem p = tiny_problem();
  p.stack[3].pixels[40] = std::numeric_limits<float>::quiet_NaN();
  try {
    (void)trivol::reconstruct(p.stack, p.poses, tiny_config(5));
    FAIL("expected NumericError");
  } catch (const trivol::NumericError& e) {
    CHECK(std::string(e.what()).find("slice") != std::string::npos);
    CHECK(e.epoch == 0);  // already non-finite in the pre-update row
  }
}

TEST_CASE("stop_ssim halts once every evaluated family reaches the target") {
  const TinyProblem p = tiny_problem();
  trivol::TrainConfig cfg = tiny_config(400);
  cfg.eval_every = 5;
  cfg.stop_ssim = 0.6;

  trivol::EvalSpec spec;
  spec.families = {{trivol::TestFamily::Axial, 4}, {trivol::TestFamily::Coronal, 4}};
  trivol::TrainHooks hooks;
  hooks.evaluate = [&](const trivol::Model& m, const std::vector<trivol::Pose>&) {
    return trivol::eval_scores(m, p.gt, spec, {});
  };
  const trivol::TrainResult res = trivol::reconstruct(p.stack, p.poses, cfg, hooks);
  CHECK(res.report.rows.back().epoch < 400);
  CHECK(res.report.rows.back().test.axial <= -0.6);
  CHECK(res.report.rows.back().test.coronal <= -0.6);
}

TEST_CASE("hooks.should_stop ends the run at the next recorded row") {
  const TinyProblem p = tiny_problem();
  trivol::TrainConfig cfg = tiny_config(100);
  cfg.eval_every = 5;
  trivol::TrainHooks hooks;
  hooks.should_stop = [](const trivol::ReportRow& row) { return row.epoch >= 10; };
  const trivol::TrainResult res = trivol::reconstruct(p.stack, p.poses, cfg, hooks);
  CHECK(res.report.rows.back().epoch == 10);
}

TEST_CASE("report text round-trips through format and read") {
  trivol::RunReport rep;
  rep.notes = {"config: tiny", "second note"};
  trivol::ReportRow r0;
  r0.epoch = 0;
  r0.seconds = 0.25;
  r0.train_loss = -0.123456789012345678;
  trivol::ReportRow r1;
  r1.epoch = 10;
  r1.seconds = 1.5;
  r1.train_loss = -0.5;
  r1.test.axial = -0.25;
  r1.test.coronal = -1.0 / 3.0;
  rep.rows = {r0, r1};

  const std::string path =
      (std::filesystem::temp_directory_path() / "trivol_test_report.csv").string();
  trivol::write_report(rep, path);
  const trivol::RunReport back = trivol::read_report(path);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].train_loss == r0.train_loss);  // %.17g survives the trip
  CHECK(back.rows[1].test.coronal == r1.test.coronal);
  CHECK(std::isnan(back.rows[0].test.axial));
  CHECK(std::isnan(back.rows[1].test.sagittal));
  std::filesystem::remove(path);
}

TEST_CASE("learnable poses starting at ground truth stay near the frozen result") {
  const TinyProblem p = tiny_problem(16, 12);
  trivol::TrainConfig frozen_cfg = tiny_config(60);
  trivol::TrainConfig learn_cfg = frozen_cfg;
  learn_cfg.learn_poses = true;

  trivol::EvalSpec spec;
  spec.families = {{trivol::TestFamily::Coronal, 4}};
  trivol::TrainHooks hooks;
  hooks.evaluate = [&](const trivol::Model& m, const std::vector<trivol::Pose>&) {
    return trivol::eval_scores(m, p.gt, spec, {});
  };
  const double frozen = trivol::reconstruct(p.stack, p.poses, frozen_cfg, hooks)
                            .report.rows.back()
                            .test.coronal;
  const double learned = trivol::reconstruct(p.stack, p.poses, learn_cfg, hooks)
                             .report.rows.back()
                             .test.coronal;
  CHECK(std::abs(frozen - learned) < 0.01);  // poses were already optimal
}

TEST_CASE("noisy-pose training traces pose error at every recorded row") {
  const TinyProblem p = tiny_problem(16, 12);
  trivol::TrainConfig cfg = tiny_config(20);
  cfg.eval_every = 5;

  const trivol::NoisyPoseResult res =
      trivol::reconstruct_with_noisy_poses(p.stack, p.poses, 2.0, 16, cfg);
  CHECK(res.train.report.rows.size() == res.pose_errors.size());
  CHECK(res.pose_errors.front().epoch == 0);
  CHECK(res.pose_errors.front().combined > 0.0);  // noise actually applied
  for (std::size_t i = 0; i < res.pose_errors.size(); ++i) {
    CHECK(res.pose_errors[i].epoch == res.train.report.rows[i].epoch);
  }

  // noise = 0 must reduce to plain reconstruction from the true poses.
  trivol::TrainConfig cfg2 = cfg;
  cfg2.learn_poses = true;
  const trivol::NoisyPoseResult clean =
      trivol::reconstruct_with_noisy_poses(p.stack, p.poses, 0.0, 16, cfg2);
  const trivol::TrainResult plain = trivol::reconstruct(p.stack, p.poses, cfg2);
  REQUIRE(clean.train.report.rows.size() == plain.report.rows.size());
  for (std::size_t i = 0; i < plain.report.rows.size(); ++i) {
    CHECK(clean.train.report.rows[i].train_loss == plain.report.rows[i].train_loss);
  }
  CHECK(clean.pose_errors.front().combined == 0.0);
}

TEST_CASE("compute_pose_error uses degrees and voxels") {
  std::vector<trivol::Pose> truth(2);
  std::vector<trivol::Pose> current(2);
  current[0].euler_deg = {3.0, 0.0, 0.0};
  current[1].trans = {0.0, 2.0 / 15.0, 0.0};  // one voxel of a 16-wide grid
  const trivol::PoseErrorRow row = trivol::compute_pose_error(7, current, truth, 16);
  CHECK(row.epoch == 7);
  CHECK(row.mean_abs_angle_deg == doctest::Approx(3.0 / 6.0));
  CHECK(row.mean_abs_trans_voxels == doctest::Approx(1.0 / 6.0));
  CHECK(row.combined == doctest::Approx(4.0 / 12.0));
}

TEST_CASE("the dense baseline trains through the same loop") {
  const TinyProblem p = tiny_problem(16, 12);
  trivol::TrainConfig cfg = trivol::implicit_baseline_config();
  cfg.epochs = 10;
  cfg.eval_every = 5;
  cfg.seed = 4;
  const trivol::TrainResult res = trivol::train_implicit(p.stack, p.poses, cfg);
  CHECK(std::holds_alternative<std::monostate>(res.model.field));
  CHECK(res.report.rows.back().train_loss < res.report.rows.front().train_loss);
  bool disclosed = false;
  for (const auto& note : res.report.notes) {
    disclosed |= note.find("implicit") != std::string::npos;
  }
  CHECK(disclosed);  // the baseline is labelled as the stand-in it is
}

TEST_CASE("ablation: default grid shape and CSV formatting") {
  const auto rows = trivol::default_ablation_rows();
  const auto cols = trivol::default_ablation_columns();
  REQUIRE(rows.size() == 7);
  REQUIRE(cols.size() == 7);
  CHECK(rows[0].mlp_layers == 2);
  CHECK(rows[0].mlp_width == 128);
  CHECK(rows[6].representation == trivol::Representation::Cp);
  CHECK(cols[0].label == "L=0");
  CHECK(cols[0].encoding.degree == 0);
  CHECK(cols[0].encoding.include_raw);
  CHECK(cols[4].label == "L=2 + input");
  CHECK(cols[4].encoding.include_raw);
  CHECK_FALSE(cols[1].encoding.include_raw);

  trivol::AblationTable t;
  t.row_labels = {"Tri-Planar MLP 2-64"};
  t.column_labels = {"L=0", "L=2"};
  t.cells = {{-0.5, std::numeric_limits<double>::quiet_NaN()}};
  const std::string csv = trivol::format_ablation_csv(t);
  CHECK(csv.find("network,L=0,L=2") == 0);
  CHECK(csv.find("NaN") != std::string::npos);
  CHECK(csv.find("-0.5") != std::string::npos);
}

TEST_CASE("ablation sweep completes and records diverged cells as NaN") {
  const TinyProblem p = tiny_problem(16, 8);
  trivol::TrainConfig base = tiny_config(6);
  base.eval_every = 6;

  // Midpoint test views, disjoint from the training stack.
  const auto test_poses = trivol::test_family_poses(trivol::TestFamily::Axial, 4);
  std::vector<trivol::Image2D> test_stack;
  for (const auto& pose : test_poses) {
    test_stack.push_back(trivol::extract_slice(p.gt, trivol::pose_to_grid(pose, 16, 16)));
  }

  const std::vector<trivol::AblationRowSpec> rows{
      {trivol::Representation::TriPlanar, 2, 32}, {trivol::Representation::Cp, 2, 32}};
  const std::vector<trivol::AblationColumnSpec> cols{{"L=0", {0, true}}, {"L=1", {1, false}}};
  const trivol::AblationTable t =
      trivol::ablation_sweep(p.stack, p.poses, test_stack, test_poses, rows, cols, base);
  REQUIRE(t.cells.size() == 2);
  REQUIRE(t.cells[0].size() == 2);
  for (const auto& row : t.cells) {
    for (double cell : row) CHECK((std::isfinite(cell) || std::isnan(cell)));
  }

  // A poisoned stack diverges in every cell; the sweep must finish anyway.
  auto bad_stack = p.stack;
  bad_stack[0].pixels[0] = std::numeric_limits<float>::infinity();
  const trivol::AblationTable nan_table = trivol::ablation_sweep(
      bad_stack, p.poses, test_stack, test_poses,
      {{trivol::Representation::TriPlanar, 2, 32}}, {{"L=0", {0, true}}}, base);
  CHECK(std::isnan(nan_table.cells[0][0]));
  CHECK(trivol::format_ablation_csv(nan_table).find("NaN") != std::string::npos);
}
