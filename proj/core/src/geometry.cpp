#include "trivol/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trivol/errors.hpp"
#include "trivol/rng.hpp"

namespace trivol {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

Mat3 rot_z(double c, double s) { return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}}; }
Mat3 rot_y(double c, double s) { return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}}; }
Mat3 rot_x(double c, double s) { return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}}; }
}  // namespace

Mat3 Mat3::mul(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r.m[i * 3 + j] =
          m[i * 3] * o.m[j] + m[i * 3 + 1] * o.m[3 + j] + m[i * 3 + 2] * o.m[6 + j];
    }
  }
  return r;
}

Mat3 Mat3::transposed() const {
  return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
}

Mat3 pose_rotation(const Pose& pose) {
  const double a = pose.euler_deg[0] * kDegToRad;
  const double b = pose.euler_deg[1] * kDegToRad;
  const double g = pose.euler_deg[2] * kDegToRad;
  return rot_z(std::cos(a), std::sin(a))
      .mul(rot_y(std::cos(b), std::sin(b)))
      .mul(rot_x(std::cos(g), std::sin(g)));
}

std::array<Mat3, 3> pose_rotation_derivatives(const Pose& pose) {
  const double a = pose.euler_deg[0] * kDegToRad;
  const double b = pose.euler_deg[1] * kDegToRad;
  const double g = pose.euler_deg[2] * kDegToRad;
  const Mat3 rz = rot_z(std::cos(a), std::sin(a));
  const Mat3 ry = rot_y(std::cos(b), std::sin(b));
  const Mat3 rx = rot_x(std::cos(g), std::sin(g));
  // d/dtheta of each elementary rotation, then scaled to per-degree.
  const Mat3 dz = Mat3{{-std::sin(a), -std::cos(a), 0, std::cos(a), -std::sin(a), 0, 0, 0, 0}};
  const Mat3 dy = Mat3{{-std::sin(b), 0, std::cos(b), 0, 0, 0, -std::cos(b), 0, -std::sin(b)}};
  const Mat3 dx = Mat3{{0, 0, 0, 0, -std::sin(g), -std::cos(g), 0, std::cos(g), -std::sin(g)}};
  std::array<Mat3, 3> out = {dz.mul(ry).mul(rx), rz.mul(dy).mul(rx), rz.mul(ry).mul(dx)};
  for (Mat3& d : out) {
    for (double& v : d.m) v *= kDegToRad;
  }
  return out;
}

SliceGrid pose_to_grid(const Pose& pose, std::uint32_t rows, std::uint32_t cols, double extent) {
  if (rows < 2 || cols < 2) throw ConfigError("slice grid needs rows, cols >= 2");
  if (!(extent > 0.0)) throw ConfigError("slice grid extent must be positive");
  SliceGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.xs.resize(cols);
  grid.ys.resize(rows);
  for (std::uint32_t c = 0; c < cols; ++c) {
    grid.xs[c] = -extent + 2.0 * extent * double(c) / double(cols - 1);
  }
  for (std::uint32_t r = 0; r < rows; ++r) {
    grid.ys[r] = -extent + 2.0 * extent * double(r) / double(rows - 1);
  }
  const Mat3 rot = pose_rotation(pose);
  grid.coords.resize(std::size_t(rows) * cols);
  std::size_t idx = 0;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c, ++idx) {
      const std::array<double, 3> p = rot.apply({grid.xs[c], grid.ys[r], 0.0});
      grid.coords[idx] = {p[0] + pose.trans[0], p[1] + pose.trans[1], p[2] + pose.trans[2]};
    }
  }
  return grid;
}

std::vector<Pose> axial_stack_poses(std::uint32_t n) {
  if (n < 2) throw ConfigError("axial stack needs at least 2 slices");
  std::vector<Pose> poses(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    poses[k].trans[2] = -1.0 + 2.0 * double(k) / double(n - 1);
  }
  return poses;
}

std::vector<Pose> rotated_coronal_poses(std::uint32_t n) {
  if (n < 2) throw ConfigError("rotated coronal sweep needs at least 2 slices");
  std::vector<Pose> poses(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    poses[k].euler_deg = {360.0 * double(k) / double(n), 0.0, 90.0};
  }
  return poses;
}

std::vector<Pose> perturb_poses(const std::vector<Pose>& poses, double noise_halfwidth,
                                std::uint64_t seed, std::uint32_t grid_dim) {
  if (noise_halfwidth < 0.0) throw ConfigError("pose noise halfwidth must be >= 0");
  if (grid_dim < 2) throw ConfigError("perturb_poses needs grid_dim >= 2");
  std::vector<Pose> out = poses;
  if (noise_halfwidth == 0.0) return out;
  Rng rng(derive_seed(seed, 0x905EULL));
  const double trans_scale = 2.0 / double(grid_dim - 1);  // voxels -> normalized
  for (Pose& p : out) {
    for (int a = 0; a < 3; ++a) p.euler_deg[a] += rng.uniform(-noise_halfwidth, noise_halfwidth);
    for (int a = 0; a < 3; ++a) {
      p.trans[a] += rng.uniform(-noise_halfwidth, noise_halfwidth) * trans_scale;
    }
  }
  return out;
}

void save_poses(const std::vector<Pose>& poses, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "# e1_deg e2_deg e3_deg t1 t2 t3\n";
  char line[256];
  for (const Pose& p : poses) {
    std::snprintf(line, sizeof line, "%.17g %.17g %.17g %.17g %.17g %.17g\n", p.euler_deg[0],
                  p.euler_deg[1], p.euler_deg[2], p.trans[0], p.trans[1], p.trans[2]);
    out << line;
  }
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

std::vector<Pose> load_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::vector<Pose> poses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    double v[6];
    int got = 0;
    while (got < 6 && fields >> v[got]) ++got;
    if (got == 0) continue;  // blank or comment-only line
    std::string trailing;
    if (got != 6 || (fields >> trailing)) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected 6 pose fields");
    }
    Pose p;
    p.euler_deg = {v[0], v[1], v[2]};
    p.trans = {v[3], v[4], v[5]};
    poses.push_back(p);
  }
  return poses;
}

}  // namespace trivol
