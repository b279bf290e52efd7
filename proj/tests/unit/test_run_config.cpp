#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "trivol/errors.hpp"
#include "trivol/run_config.hpp"

namespace {

std::string temp_cfg(const std::string& text) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "trivol_test_cfg.txt").string();
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("defaults match the documented training recipe") {
  const trivol::TrainConfig cfg;
  CHECK(cfg.representation == trivol::Representation::TriPlanar);
  CHECK(cfg.field_res == 64);
  CHECK(cfg.rank == 5);
  CHECK(cfg.channels == 10);
  CHECK(cfg.combiner == trivol::Combiner::Product);
  CHECK(cfg.encoding.degree == 2);
  CHECK(cfg.encoding.include_raw);
  CHECK(cfg.mlp_layers == 2);
  CHECK(cfg.mlp_width == 64);
  CHECK(cfg.epochs == 5000);
  CHECK(cfg.eval_every == 250);
  CHECK(cfg.batch_slices == 1);
  CHECK(cfg.lr_field == 0.5);
  CHECK(cfg.lr_decoder == 0.001);
  CHECK(cfg.lr_pose == 0.001);
  CHECK_FALSE(cfg.learn_poses);
  CHECK(cfg.init == trivol::InitKind::Random);
  CHECK_NOTHROW(trivol::validate_train_config(cfg));
}

TEST_CASE("format -> parse round-trip preserves every field") {
  trivol::TrainConfig cfg;
  cfg.representation = trivol::Representation::Cp;
  cfg.field_res = 48;
  cfg.rank = 3;
  cfg.channels = 7;
  cfg.combiner = trivol::Combiner::Sum;
  cfg.encoding = {5, false};
  cfg.mlp_layers = 3;
  cfg.mlp_width = 128;
  cfg.epochs = 123;
  cfg.eval_every = 7;
  cfg.batch_slices = 4;
  cfg.lr_field = 0.125;
  cfg.lr_decoder = 1.0 / 3.0;  // exercises %.17g round-trip
  cfg.lr_pose = 2e-4;
  cfg.learn_poses = true;
  cfg.seed = 987654321;
  cfg.stop_ssim = 0.93;

  const std::string path = temp_cfg(trivol::format_train_config(cfg));
  const trivol::TrainConfig back = trivol::parse_train_config(path);
  CHECK(back.representation == cfg.representation);
  CHECK(back.field_res == cfg.field_res);
  CHECK(back.rank == cfg.rank);
  CHECK(back.channels == cfg.channels);
  CHECK(back.combiner == cfg.combiner);
  CHECK(back.encoding.degree == cfg.encoding.degree);
  CHECK(back.encoding.include_raw == cfg.encoding.include_raw);
  CHECK(back.mlp_layers == cfg.mlp_layers);
  CHECK(back.mlp_width == cfg.mlp_width);
  CHECK(back.epochs == cfg.epochs);
  CHECK(back.eval_every == cfg.eval_every);
  CHECK(back.batch_slices == cfg.batch_slices);
  CHECK(back.lr_field == cfg.lr_field);
  CHECK(back.lr_decoder == cfg.lr_decoder);
  CHECK(back.lr_pose == cfg.lr_pose);
  CHECK(back.learn_poses == cfg.learn_poses);
  CHECK(back.seed == cfg.seed);
  CHECK(back.stop_ssim == cfg.stop_ssim);
  std::filesystem::remove(path);
}

TEST_CASE("parser rejects malformed input with file:line context") {
  const std::string path = temp_cfg("representation=triplanar\nrepresentation=cp\n");
  CHECK_THROWS_WITH_AS((void)trivol::parse_train_config(path),
                       doctest::Contains("duplicate key"), trivol::ConfigError);

  std::ofstream(path) << "no_such_key=1\n";
  CHECK_THROWS_WITH_AS((void)trivol::parse_train_config(path), doctest::Contains("unknown key"),
                       trivol::ConfigError);

  std::ofstream(path) << "epochs=abc\n";
  CHECK_THROWS_AS((void)trivol::parse_train_config(path), trivol::ConfigError);

  std::ofstream(path) << "just a line without equals\n";
  CHECK_THROWS_WITH_AS((void)trivol::parse_train_config(path), doctest::Contains(":1"),
                       trivol::ConfigError);

  std::ofstream(path) << "# comment only\nepochs=10\n";
  CHECK_NOTHROW((void)trivol::parse_train_config(path));
  std::filesystem::remove(path);
}

TEST_CASE("validation enforces the decoder envelope and atlas pairing") {
  trivol::TrainConfig cfg;
  cfg.mlp_layers = 5;
  CHECK_THROWS_AS(trivol::validate_train_config(cfg), trivol::ConfigError);
  cfg.mlp_layers = 2;
  cfg.mlp_width = 48;
  CHECK_THROWS_AS(trivol::validate_train_config(cfg), trivol::ConfigError);

  cfg = trivol::TrainConfig{};
  cfg.init = trivol::InitKind::Atlas;
  CHECK_THROWS_WITH_AS(trivol::validate_train_config(cfg), doctest::Contains("atlas_path"),
                       trivol::ConfigError);
  cfg.atlas_path = "somewhere.rfld";
  CHECK_NOTHROW(trivol::validate_train_config(cfg));

  cfg = trivol::TrainConfig{};
  cfg.lr_field = 0.0;
  CHECK_THROWS_AS(trivol::validate_train_config(cfg), trivol::ConfigError);
  cfg = trivol::TrainConfig{};
  cfg.encoding = {0, false};
  CHECK_THROWS_AS(trivol::validate_train_config(cfg), trivol::ConfigError);
}

TEST_CASE("the dense baseline preset bypasses the factorized envelope") {
  const trivol::TrainConfig cfg = trivol::implicit_baseline_config();
  CHECK(cfg.representation == trivol::Representation::Implicit);
  CHECK(cfg.mlp_layers == 6);
  CHECK(cfg.mlp_width == 128);
  CHECK(cfg.encoding.degree == 10);
  CHECK(cfg.encoding.include_raw);
  CHECK_NOTHROW(trivol::validate_train_config(cfg));
}

TEST_CASE("enum parsing is strict") {
  CHECK(trivol::parse_representation("triplanar") == trivol::Representation::TriPlanar);
  CHECK(trivol::parse_representation("cp") == trivol::Representation::Cp);
  CHECK(trivol::parse_representation("implicit") == trivol::Representation::Implicit);
  CHECK_THROWS_AS((void)trivol::parse_representation("TriPlanar"), trivol::ConfigError);
  CHECK_THROWS_AS((void)trivol::parse_combiner("mul"), trivol::ConfigError);
  CHECK_THROWS_AS((void)trivol::parse_init_kind("zeros"), trivol::ConfigError);
}
