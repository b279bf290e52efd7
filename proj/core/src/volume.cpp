#include "trivol/volume.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

#include "io_util.hpp"
#include "trivol/errors.hpp"
#include "trivol/rng.hpp"

namespace trivol {

namespace {

constexpr char kVolumeMagic[8] = {'R', 'V', 'O', 'L', 'v', '0', '0', '1'};

struct Ellipsoid {
  double center[3];
  double inv_axes[3];  // 1/semi-axis
  double rot[9];       // row-major, applied to (p - center)
  double intensity;
};

void small_rotation(double ax, double ay, double az, double* m) {
  // Rz*Ry*Rx, angles in radians.
  const double cx = std::cos(ax), sx = std::sin(ax);
  const double cy = std::cos(ay), sy = std::sin(ay);
  const double cz = std::cos(az), sz = std::sin(az);
  m[0] = cz * cy;
  m[1] = cz * sy * sx - sz * cx;
  m[2] = cz * sy * cx + sz * sx;
  m[3] = sz * cy;
  m[4] = sz * sy * sx + cz * cx;
  m[5] = sz * sy * cx - cz * sx;
  m[6] = -sy;
  m[7] = cy * sx;
  m[8] = cy * cx;
}

double smooth01(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Squared normalized radius: <=1 inside the ellipsoid.
double q_value(const Ellipsoid& e, double x, double y, double z) {
  const double px = x - e.center[0], py = y - e.center[1], pz = z - e.center[2];
  const double rx = e.rot[0] * px + e.rot[1] * py + e.rot[2] * pz;
  const double ry = e.rot[3] * px + e.rot[4] * py + e.rot[5] * pz;
  const double rz = e.rot[6] * px + e.rot[7] * py + e.rot[8] * pz;
  const double a = rx * e.inv_axes[0], b = ry * e.inv_axes[1], c = rz * e.inv_axes[2];
  return a * a + b * b + c * c;
}

}  // namespace

DenseVolume generate_phantom(const PhantomSpec& spec) {
  for (int a = 0; a < 3; ++a) {
    if (spec.dims[a] < 8) {
      throw ConfigError("phantom dims must be >= 8, got " + std::to_string(spec.dims[a]) +
                        " on axis " + std::to_string(a));
    }
  }
  if (spec.texture_freq < 0.0 || !std::isfinite(spec.texture_freq)) {
    throw ConfigError("phantom texture_freq must be finite and >= 0");
  }

  DenseVolume vol;
  vol.dims = spec.dims;
  vol.spacing = 1.0f;
  vol.voxels.assign(vol.voxel_count(), 0.5f);

  const bool degenerate = spec.n_ellipsoids == 0 && spec.texture_freq == 0.0;
  if (degenerate) return vol;

  Rng rng(derive_seed(spec.seed, 0xF0A17ULL));
  const std::uint32_t n = spec.n_ellipsoids;

  // Family geometry is fixed; the seed only jitters it, so same-family
  // phantoms resemble one another (different subjects of one cohort).
  std::vector<Ellipsoid> shells(n);
  const double base_axes[3] = {0.82, 0.70, 0.76};
  for (std::uint32_t s = 0; s < n; ++s) {
    Ellipsoid& e = shells[s];
    const double scale = 1.0 - 0.78 * double(s) / double(n);
    for (int a = 0; a < 3; ++a) {
      const double jitter = 1.0 + 0.05 * rng.uniform(-1.0, 1.0);
      e.inv_axes[a] = 1.0 / (base_axes[a] * scale * jitter);
    }
    for (int a = 0; a < 3; ++a) e.center[a] = 0.035 * rng.uniform(-1.0, 1.0);
    const double deg = 3.14159265358979323846 / 180.0;
    small_rotation(8.0 * deg * rng.uniform(-1.0, 1.0), 8.0 * deg * rng.uniform(-1.0, 1.0),
                   8.0 * deg * rng.uniform(-1.0, 1.0), e.rot);
    const double palette = 0.5 + 0.36 * std::cos(2.39996 * double(s + 1));
    e.intensity = std::clamp(palette + 0.04 * rng.uniform(-1.0, 1.0), 0.12, 0.92);
  }

  double tex_dir1[3] = {0, 0, 0}, tex_dir2[3] = {0, 0, 0};
  double tex_phase1 = 0.0, tex_phase2 = 0.0;
  if (spec.texture_freq > 0.0) {
    auto unit_dir = [&rng](double* d) {
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          d[a] = rng.uniform(-1.0, 1.0);
          norm2 += d[a] * d[a];
        }
      } while (norm2 < 1e-4 || norm2 > 1.0);
      const double inv = 1.0 / std::sqrt(norm2);
      for (int a = 0; a < 3; ++a) d[a] *= inv;
    };
    unit_dir(tex_dir1);
    unit_dir(tex_dir2);
    tex_phase1 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    tex_phase2 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  }

  const double background = (n == 0) ? 0.5 : 0.08;
  const double edge = 0.12;        // soft shell boundary width in q units
  const double tex_amp = 0.07;
  const double pi = 3.14159265358979323846;

  const std::uint32_t nx = spec.dims[0], ny = spec.dims[1], nz = spec.dims[2];
  std::uint64_t idx = 0;
  for (std::uint32_t zi = 0; zi < nz; ++zi) {
    const double z = 2.0 * zi / double(nz - 1) - 1.0;
    for (std::uint32_t yi = 0; yi < ny; ++yi) {
      const double y = 2.0 * yi / double(ny - 1) - 1.0;
      for (std::uint32_t xi = 0; xi < nx; ++xi, ++idx) {
        const double x = 2.0 * xi / double(nx - 1) - 1.0;
        double val = background;
        double outer_weight = (n == 0) ? 1.0 : 0.0;
        for (std::uint32_t s = 0; s < n; ++s) {
          const double q = q_value(shells[s], x, y, z);
          const double w = smooth01((1.0 - q) / edge);
          if (s == 0) outer_weight = smooth01((1.0 - q) / 0.25);
          val = val + (shells[s].intensity - val) * w;
        }
        if (spec.texture_freq > 0.0 && outer_weight > 0.0) {
          const double u1 = tex_dir1[0] * x + tex_dir1[1] * y + tex_dir1[2] * z;
          const double u2 = tex_dir2[0] * x + tex_dir2[1] * y + tex_dir2[2] * z;
          val += tex_amp * outer_weight * std::sin(pi * spec.texture_freq * u1 + tex_phase1) *
                 std::cos(pi * spec.texture_freq * u2 + tex_phase2);
        }
        vol.voxels[idx] = static_cast<float>(std::clamp(val, 0.0, 1.0));
      }
    }
  }
  return vol;
}

void save_volume(const DenseVolume& vol, const std::string& path) {
  if (vol.voxels.size() != vol.voxel_count()) {
    throw ShapeError("volume voxel buffer does not match dims");
  }
  std::string out;
  out.reserve(24 + vol.voxels.size() * 4);
  out.append(kVolumeMagic, 8);
  detail::put_u32le(out, vol.dims[0]);
  detail::put_u32le(out, vol.dims[1]);
  detail::put_u32le(out, vol.dims[2]);
  detail::put_f32le(out, vol.spacing);
  detail::put_f32le_block(out, vol.voxels.data(), vol.voxels.size());
  detail::write_file(path, out);
}

DenseVolume load_volume(const std::string& path) {
  const std::string data = detail::read_file(path);
  detail::Cursor cur(path, data);
  const std::string magic = cur.bytes(8);
  if (std::memcmp(magic.data(), kVolumeMagic, 8) != 0) {
    throw BadMagicError(path + ": bad magic \"" + magic + "\"");
  }
  DenseVolume vol;
  vol.dims[0] = cur.u32le();
  vol.dims[1] = cur.u32le();
  vol.dims[2] = cur.u32le();
  vol.spacing = cur.f32le();
  for (int a = 0; a < 3; ++a) {
    if (vol.dims[a] == 0) throw IoError(path + ": zero dimension in header");
  }
  const std::uint64_t count = vol.voxel_count();
  if (count > (1ull << 31)) throw IoError(path + ": volume too large");
  const std::uint64_t expected = 24 + count * 4;
  if (data.size() < expected) throw TruncatedFileError(path, expected, data.size());
  if (data.size() > expected) {
    throw PayloadSizeError(path + ": dims imply " + std::to_string(expected) +
                           " bytes but file has " + std::to_string(data.size()));
  }
  vol.voxels.resize(count);
  cur.f32le_block(vol.voxels.data(), count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = vol.voxels[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw IoError(path + ": voxel " + std::to_string(i) + " = " + std::to_string(v) +
                    " outside [0,1]");
    }
  }
  return vol;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void save_pgm(const Image2D& img, const std::string& path) {
  std::string out = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n255\n";
  out.reserve(out.size() + img.pixels.size());
  for (float v : img.pixels) {
    const double scaled = std::floor(double(v) * 255.0 + 0.5);  // round half up
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0))));
  }
  detail::write_file(path, out);
}

// Reads one PGM token, skipping whitespace and '#' comments.
std::string pgm_token(const std::string& data, std::size_t& pos, const std::string& path) {
  while (pos < data.size()) {
    if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  if (start == pos) throw IoError(path + ": malformed PGM header");
  return data.substr(start, pos - start);
}

Image2D load_pgm(const std::string& path) {
  const std::string data = detail::read_file(path);
  std::size_t pos = 0;
  if (pgm_token(data, pos, path) != "P5") throw BadMagicError(path + ": not a P5 PGM");
  Image2D img;
  try {
    img.cols = static_cast<std::uint32_t>(std::stoul(pgm_token(data, pos, path)));
    img.rows = static_cast<std::uint32_t>(std::stoul(pgm_token(data, pos, path)));
    const unsigned long maxval = std::stoul(pgm_token(data, pos, path));
    if (maxval != 255) throw IoError(path + ": only maxval 255 PGM supported");
  } catch (const std::logic_error&) {
    throw IoError(path + ": malformed PGM header");
  }
  ++pos;  // single whitespace after maxval
  const std::uint64_t count = std::uint64_t(img.rows) * img.cols;
  if (pos + count > data.size()) throw TruncatedFileError(path, pos + count, data.size());
  img.pixels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    img.pixels[i] = static_cast<float>(static_cast<unsigned char>(data[pos + i])) / 255.0f;
  }
  return img;
}

}  // namespace

void save_image(const Image2D& img, const std::string& path) {
  if (img.pixels.size() != std::uint64_t(img.rows) * img.cols) {
    throw ShapeError("image pixel buffer does not match dims");
  }
  if (ends_with(path, ".pgm")) {
    save_pgm(img, path);
    return;
  }
  // Raw float container, dims (rows, cols, 1), pixels row-major.
  std::string out;
  out.reserve(24 + img.pixels.size() * 4);
  out.append(kVolumeMagic, 8);
  detail::put_u32le(out, img.rows);
  detail::put_u32le(out, img.cols);
  detail::put_u32le(out, 1);
  detail::put_f32le(out, 1.0f);
  detail::put_f32le_block(out, img.pixels.data(), img.pixels.size());
  detail::write_file(path, out);
}

Image2D load_image(const std::string& path) {
  if (ends_with(path, ".pgm")) return load_pgm(path);
  DenseVolume vol = load_volume(path);
  if (vol.dims[2] != 1) {
    throw IoError(path + ": expected a single image (dims rows, cols, 1), got depth " +
                  std::to_string(vol.dims[2]));
  }
  Image2D img;
  img.rows = vol.dims[0];
  img.cols = vol.dims[1];
  img.pixels = std::move(vol.voxels);
  return img;
}

double sample_volume(const DenseVolume& vol, double x, double y, double z) {
  const double c[3] = {std::clamp(x, -1.0, 1.0), std::clamp(y, -1.0, 1.0), std::clamp(z, -1.0, 1.0)};
  double f[3];
  std::uint32_t i0[3], i1[3];
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t n = vol.dims[a];
    const double fa = (c[a] + 1.0) * 0.5 * double(n - 1);
    std::uint32_t lo = (n >= 2) ? std::min(static_cast<std::uint32_t>(fa), n - 2) : 0u;
    i0[a] = lo;
    i1[a] = (n >= 2) ? lo + 1 : 0u;
    f[a] = (n >= 2) ? fa - double(lo) : 0.0;
  }
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? f[2] : 1.0 - f[2];
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? f[1] : 1.0 - f[1];
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? f[0] : 1.0 - f[0];
        acc += wx * wy * wz *
               double(vol.at(dx ? i1[0] : i0[0], dy ? i1[1] : i0[1], dz ? i1[2] : i0[2]));
      }
    }
  }
  return acc;
}

}  // namespace trivol
