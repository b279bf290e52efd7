#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace trivol {

// Rigid slice pose. Rotation is intrinsic Z-Y-X Euler, degrees; translation
// is in normalized volume units ([-1,1] spans the volume).
struct Pose {
  std::array<double, 3> euler_deg{0.0, 0.0, 0.0};
  std::array<double, 3> trans{0.0, 0.0, 0.0};
  bool learnable = true;
};

struct Mat3 {
  // Row-major.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  std::array<double, 3> apply(const std::array<double, 3>& v) const {
    return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
  }
  Mat3 mul(const Mat3& o) const;
  Mat3 transposed() const;
};

// R(E) = Rz(e1) * Ry(e2) * Rx(e3), angles in degrees.
Mat3 pose_rotation(const Pose& pose);

// d/d e_i of pose_rotation, per-degree (the pi/180 factor is included).
std::array<Mat3, 3> pose_rotation_derivatives(const Pose& pose);

// World-space sample lattice of one slice. coords row-major, rows*cols many.
struct SliceGrid {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::array<double, 3>> coords;
  // The base-plane point (x, y, 0) each lattice cell was mapped from, needed
  // by pose gradients. xs varies along columns, ys along rows, both
  // linspace(-extent, extent).
  std::vector<double> xs;  // size cols
  std::vector<double> ys;  // size rows
};

// The base plane is z=0 with x spanning [-extent, extent] across columns and
// y across rows; each point is mapped by p = R(E)*b + T. rows, cols >= 2.
SliceGrid pose_to_grid(const Pose& pose, std::uint32_t rows, std::uint32_t cols,
                       double extent = 1.0);

// Pi_1: N parallel axial slices, E = 0, T = (0, 0, z_k), z_k linspace[-1,1].
std::vector<Pose> axial_stack_poses(std::uint32_t n);

// Pi_2: coronal base orientation (axial plane tipped 90 deg about x, i.e. the
// y-normal plane) swept about the volume's vertical axis z in steps of
// 360/N degrees, T = 0: E_k = (k*360/N, 0, 90). Every grid contains the
// line x = y = 0.
std::vector<Pose> rotated_coronal_poses(std::uint32_t n);

// Adds independent U(-h, h) noise to every pose parameter; h is read in
// degrees for angles and in voxels for translations, the latter converted to
// normalized units by 2/(grid_dim-1). h = 0 returns the input unchanged.
std::vector<Pose> perturb_poses(const std::vector<Pose>& poses, double noise_halfwidth,
                                std::uint64_t seed, std::uint32_t grid_dim);

// Plain-text pose table: one pose per line, six fields
// (e1 e2 e3 t1 t2 t3), '#' starts a comment.
void save_poses(const std::vector<Pose>& poses, const std::string& path);
std::vector<Pose> load_poses(const std::string& path);

}  // namespace trivol
