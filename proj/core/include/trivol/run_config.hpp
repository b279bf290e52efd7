#pragma once

#include <cstdint>
#include <string>

#include "trivol/decoder.hpp"
#include "trivol/encoding.hpp"
#include "trivol/field.hpp"

namespace trivol {

enum class Representation : std::uint8_t { TriPlanar = 0, Cp = 1, Implicit = 2 };
enum class InitKind : std::uint8_t { Random = 0, Atlas = 1 };

std::string to_string(Representation r);
std::string to_string(InitKind k);
std::string to_string(Combiner c);
Representation parse_representation(const std::string& s);
InitKind parse_init_kind(const std::string& s);
Combiner parse_combiner(const std::string& s);

// Every hyperparameter of one training run. Round-trips through a flat
// key=value file; unknown keys are rejected so typos can't silently fall back
// to defaults.
struct TrainConfig {
  Representation representation = Representation::TriPlanar;
  std::uint32_t field_res = 64;  // cubic factor lattice resolution
  std::uint32_t rank = 5;
  std::uint32_t channels = 10;
  Combiner combiner = Combiner::Product;
  EncodingConfig encoding;  // degree 2, raw input concatenated
  std::uint32_t mlp_layers = 2;
  std::uint32_t mlp_width = 64;
  std::uint32_t epochs = 5000;
  std::uint32_t eval_every = 250;
  std::uint32_t batch_slices = 1;  // slices per optimizer step
  double lr_field = 0.5;
  double lr_decoder = 0.001;
  double lr_pose = 0.001;
  bool learn_poses = false;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Random;
  std::string atlas_path;
  // Stop once every finite per-family test score reaches this SSIM at an
  // eval epoch. 2.0 (out of range) disables early stopping.
  double stop_ssim = 2.0;
};

// The comparison baseline: a coordinate network with no factorized field.
// Not a faithful reproduction of any published implicit architecture; a
// NeRF-like stand-in (6 layers x 128 hidden on degree-10 + raw coordinates).
TrainConfig implicit_baseline_config();

// Structural validation. The decoder envelope (2-4 layers, width 32/64/128)
// applies to factorized representations; the implicit baseline may use any
// machinery-supported shape (1-8 layers).
void validate_train_config(const TrainConfig& cfg);

std::string format_train_config(const TrainConfig& cfg);
void write_train_config(const TrainConfig& cfg, const std::string& path);
TrainConfig parse_train_config_text(const std::string& text, const std::string& display_path);
TrainConfig parse_train_config(const std::string& path);

}  // namespace trivol
