#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "trivol/errors.hpp"
#include "trivol/volume.hpp"

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("phantom: deterministic, bounded, structured") {
  trivol::PhantomSpec spec;
  spec.dims = {16, 16, 16};
  spec.seed = 42;
  const trivol::DenseVolume a = trivol::generate_phantom(spec);
  const trivol::DenseVolume b = trivol::generate_phantom(spec);
  REQUIRE(a.voxels.size() == 16u * 16 * 16);
  CHECK(a.voxels == b.voxels);  // bit-identical per spec

  float lo = 1.0f, hi = 0.0f;
  for (float v : a.voxels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= 0.0f);
  CHECK(hi <= 1.0f);
  CHECK(hi - lo > 0.2f);  // not a constant volume

  spec.seed = 43;
  const trivol::DenseVolume c = trivol::generate_phantom(spec);
  CHECK(a.voxels != c.voxels);  // seed jitters
  // Same family: the two subjects still correlate strongly.
  double dot = 0, na = 0, nc = 0;
  for (std::size_t i = 0; i < a.voxels.size(); ++i) {
    const double x = a.voxels[i] - 0.5, y = c.voxels[i] - 0.5;
    dot += x * y;
    na += x * x;
    nc += y * y;
  }
  CHECK(dot / std::sqrt(na * nc) > 0.5);
}

TEST_CASE("phantom: tiny dims rejected, degenerate spec is constant") {
  trivol::PhantomSpec spec;
  spec.dims = {4, 16, 16};
  CHECK_THROWS_AS((void)trivol::generate_phantom(spec), trivol::ConfigError);

  spec.dims = {8, 8, 8};
  spec.n_ellipsoids = 0;
  spec.texture_freq = 0.0;
  const trivol::DenseVolume v = trivol::generate_phantom(spec);
  for (float x : v.voxels) CHECK(x == 0.5f);
}

TEST_CASE("volume file round-trip is bitwise") {
  trivol::PhantomSpec spec;
  spec.dims = {9, 11, 13};
  const trivol::DenseVolume vol = trivol::generate_phantom(spec);
  const std::string path = temp_path("trivol_test_vol.rvol");
  trivol::save_volume(vol, path);
  const trivol::DenseVolume back = trivol::load_volume(path);
  CHECK(back.dims == vol.dims);
  CHECK(back.spacing == vol.spacing);
  CHECK(back.voxels == vol.voxels);
  std::filesystem::remove(path);
}

TEST_CASE("volume format negative cases") {
  const std::string path = temp_path("trivol_test_bad.rvol");

  SUBCASE("bad magic") {
    std::ofstream(path, std::ios::binary) << "NOTAVOLX" << std::string(16, '\0');
    CHECK_THROWS_AS((void)trivol::load_volume(path), trivol::BadMagicError);
  }
  SUBCASE("truncated payload") {
    trivol::PhantomSpec spec;
    spec.dims = {8, 8, 8};
    trivol::save_volume(trivol::generate_phantom(spec), path);
    std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
    CHECK_THROWS_AS((void)trivol::load_volume(path), trivol::TruncatedFileError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS((void)trivol::load_volume(temp_path("no_such_file.rvol")), trivol::IoError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("image round-trip: raw container bitwise, pgm quantized half-up") {
  trivol::Image2D img;
  img.rows = 5;
  img.cols = 7;
  img.pixels.resize(35);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<float>(i) / 34.0f;
  }

  const std::string raw = temp_path("trivol_test_img.rvol");
  trivol::save_image(img, raw);
  const trivol::Image2D back = trivol::load_image(raw);
  CHECK(back.rows == img.rows);
  CHECK(back.cols == img.cols);
  CHECK(back.pixels == img.pixels);
  std::filesystem::remove(raw);

  const std::string pgm = temp_path("trivol_test_img.pgm");
  trivol::save_image(img, pgm);
  const trivol::Image2D q = trivol::load_image(pgm);
  REQUIRE(q.pixels.size() == img.pixels.size());
  for (std::size_t i = 0; i < q.pixels.size(); ++i) {
    CHECK(std::abs(q.pixels[i] - img.pixels[i]) <= 0.5f / 255.0f + 1e-6f);
  }
  // Exactly the half-up quantization, not merely close.
  CHECK(q.pixels[0] == 0.0f);
  CHECK(q.pixels[34] == 1.0f);
  std::filesystem::remove(pgm);
}

TEST_CASE("sample_volume: lattice exactness, trilinear midpoints, clamping") {
  trivol::DenseVolume vol;
  vol.dims = {3, 3, 3};
  vol.voxels.resize(27);
  for (std::size_t i = 0; i < 27; ++i) vol.voxels[i] = static_cast<float>(i) / 26.0f;

  // Corner-aligned: normalized -1 -> index 0, +1 -> index n-1.
  CHECK(trivol::sample_volume(vol, -1, -1, -1) == doctest::Approx(vol.at(0, 0, 0)).epsilon(1e-12));
  CHECK(trivol::sample_volume(vol, 1, 1, 1) == doctest::Approx(vol.at(2, 2, 2)).epsilon(1e-12));
  CHECK(trivol::sample_volume(vol, 0, 0, 0) == doctest::Approx(vol.at(1, 1, 1)).epsilon(1e-12));

  // Halfway along x between (0,0,0) and (1,0,0): mean of the two voxels.
  const double mid = trivol::sample_volume(vol, -0.5, -1, -1);
  CHECK(mid == doctest::Approx(0.5 * (vol.at(0, 0, 0) + vol.at(1, 0, 0))).epsilon(1e-12));

  // Out-of-cube clamps to the face value.
  CHECK(trivol::sample_volume(vol, 5.0, 0, 0) ==
        doctest::Approx(trivol::sample_volume(vol, 1.0, 0, 0)).epsilon(1e-12));
  CHECK(trivol::sample_volume(vol, 0, -9.0, 0) ==
        doctest::Approx(trivol::sample_volume(vol, 0, -1.0, 0)).epsilon(1e-12));
}
