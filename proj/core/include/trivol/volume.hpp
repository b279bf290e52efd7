#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace trivol {

// Dense grayscale volume. Voxels are float32 in [0, 1], laid out x-fastest:
// index = x + nx*(y + ny*z). dims = (nx, ny, nz).
struct DenseVolume {
  std::array<std::uint32_t, 3> dims{0, 0, 0};
  float spacing = 1.0f;  // isotropic voxel edge, millimetres
  std::vector<float> voxels;

  std::uint64_t voxel_count() const {
    return std::uint64_t(dims[0]) * dims[1] * dims[2];
  }
  float& at(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
    return voxels[x + std::uint64_t(dims[0]) * (y + std::uint64_t(dims[1]) * z)];
  }
  float at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
    return voxels[x + std::uint64_t(dims[0]) * (y + std::uint64_t(dims[1]) * z)];
  }
};

// Single grayscale image, float32 in [0, 1], row-major.
struct Image2D {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> pixels;

  float& at(std::uint32_t r, std::uint32_t c) { return pixels[std::uint64_t(r) * cols + c]; }
  float at(std::uint32_t r, std::uint32_t c) const { return pixels[std::uint64_t(r) * cols + c]; }
};

// Synthetic test-object description. Same spec in, same voxels out.
// n_ellipsoids = 0 together with texture_freq = 0 produces constant 0.5.
struct PhantomSpec {
  std::array<std::uint32_t, 3> dims{64, 64, 64};  // every entry must be >= 8
  std::uint64_t seed = 0;
  std::uint32_t n_ellipsoids = 5;
  double texture_freq = 6.0;
};

// Nested soft-edged ellipsoid shells plus a band-limited sinusoidal texture.
// Shell geometry is shared by all phantoms of the same (dims, n_ellipsoids,
// texture_freq) family; the seed only jitters it, so two phantoms of one
// family look like two subjects of one cohort.
DenseVolume generate_phantom(const PhantomSpec& spec);

// Binary volume format, little-endian:
//   8-byte magic "RVOLv001", u32 nx, u32 ny, u32 nz, f32 spacing,
//   nx*ny*nz f32 voxels, x fastest.
void save_volume(const DenseVolume& vol, const std::string& path);
DenseVolume load_volume(const std::string& path);

// PGM P5 maxval 255 when path ends in .pgm (values rounded half-up), else the
// raw float container above with dims (rows, cols, 1).
void save_image(const Image2D& img, const std::string& path);
Image2D load_image(const std::string& path);

// Trilinear lookup at a normalized coordinate in [-1,1]^3 (center origin,
// corner-aligned: x=-1 is voxel 0, x=+1 is voxel nx-1). Out-of-cube
// coordinates clamp to the boundary.
double sample_volume(const DenseVolume& vol, double x, double y, double z);

}  // namespace trivol
