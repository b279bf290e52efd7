#include "trivol/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "field_detail.hpp"
#include "trivol/errors.hpp"
#include "trivol/rng.hpp"

namespace trivol {

namespace {

// Plane p covers lattice axes (kPlaneAxes[p][0], kPlaneAxes[p][1]):
// XY -> (0,1), YZ -> (1,2), XZ -> (0,2). Rows run over the first axis.
constexpr int kPlaneAxes[3][2] = {{0, 1}, {1, 2}, {0, 2}};

void validate_shape(const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
                    std::uint32_t channels) {
  for (int a = 0; a < 3; ++a) {
    if (res[a] < 2) throw ConfigError("field resolution entries must be >= 2");
  }
  if (rank < 1) throw ConfigError("field rank must be >= 1");
  if (channels < 1) throw ConfigError("field channels must be >= 1");
}

// Bilinear stencil of one plane at in-cell position (ta, tb).
struct Stencil {
  std::size_t o00, o01, o10, o11;
  double w00, w01, w10, w11;
};

inline Stencil stencil(std::uint32_t lo_a, std::uint32_t lo_b, double ta, double tb,
                       std::uint32_t nb) {
  Stencil s;
  s.o00 = std::size_t(lo_a) * nb + lo_b;
  s.o01 = s.o00 + 1;
  s.o10 = s.o00 + nb;
  s.o11 = s.o10 + 1;
  const double ua = 1.0 - ta, ub = 1.0 - tb;
  s.w00 = ua * ub;
  s.w01 = ua * tb;
  s.w10 = ta * ub;
  s.w11 = ta * tb;
  return s;
}

inline double gather(const float* p, const Stencil& s) {
  return s.w00 * p[s.o00] + s.w01 * p[s.o01] + s.w10 * p[s.o10] + s.w11 * p[s.o11];
}

inline void scatter(double* g, const Stencil& s, double v) {
  g[s.o00] += v * s.w00;
  g[s.o01] += v * s.w01;
  g[s.o10] += v * s.w10;
  g[s.o11] += v * s.w11;
}

// d(gather)/d(ta) and /d(tb).
inline double dgather_da(const float* p, const Stencil& s, double tb) {
  return (1.0 - tb) * (p[s.o10] - p[s.o00]) + tb * (p[s.o11] - p[s.o01]);
}
inline double dgather_db(const float* p, const Stencil& s, double ta) {
  return (1.0 - ta) * (p[s.o01] - p[s.o00]) + ta * (p[s.o11] - p[s.o10]);
}

inline Stencil plane_stencil(const CellIndex& cell, int plane, std::uint32_t nb) {
  const int a = kPlaneAxes[plane][0], b = kPlaneAxes[plane][1];
  return stencil(cell.lo[a], cell.lo[b], cell.t[a], cell.t[b], nb);
}

}  // namespace

std::array<std::uint32_t, 2> TriPlanarField::plane_shape(int which) const {
  return {res[kPlaneAxes[which][0]], res[kPlaneAxes[which][1]]};
}

std::size_t TriPlanarField::plane_elems(int which) const {
  const auto s = plane_shape(which);
  return std::size_t(s[0]) * s[1];
}

float* TriPlanarField::plane_at(int which, std::uint32_t c, std::uint32_t r) {
  return planes[which].data() + (std::size_t(c) * rank + r) * plane_elems(which);
}
const float* TriPlanarField::plane_at(int which, std::uint32_t c, std::uint32_t r) const {
  return planes[which].data() + (std::size_t(c) * rank + r) * plane_elems(which);
}

std::size_t TriPlanarField::parameter_count() const {
  return planes[0].size() + planes[1].size() + planes[2].size();
}

float* CPField::vector_at(int axis, std::uint32_t c, std::uint32_t r) {
  return vectors[axis].data() + (std::size_t(c) * rank + r) * res[axis];
}
const float* CPField::vector_at(int axis, std::uint32_t c, std::uint32_t r) const {
  return vectors[axis].data() + (std::size_t(c) * rank + r) * res[axis];
}

std::size_t CPField::parameter_count() const {
  return vectors[0].size() + vectors[1].size() + vectors[2].size();
}

void FieldGradients::zero() {
  for (auto& part : parts) std::fill(part.begin(), part.end(), 0.0);
}

std::size_t FieldGradients::parameter_count() const {
  return parts[0].size() + parts[1].size() + parts[2].size();
}

FieldGradients make_gradients(const TriPlanarField& f) {
  FieldGradients g;
  for (int p = 0; p < 3; ++p) g.parts[p].assign(f.planes[p].size(), 0.0);
  return g;
}

FieldGradients make_gradients(const CPField& f) {
  FieldGradients g;
  for (int a = 0; a < 3; ++a) g.parts[a].assign(f.vectors[a].size(), 0.0);
  return g;
}

namespace {
void fill_init(std::span<float> dst, Combiner combiner, Rng& rng) {
  const double lo = combiner == Combiner::Product ? 0.9 : -0.1;
  const double hi = combiner == Combiner::Product ? 1.1 : 0.1;
  for (float& v : dst) v = static_cast<float>(rng.uniform(lo, hi));
}
}  // namespace

TriPlanarField make_triplanar(const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
                              std::uint32_t channels, Combiner combiner, std::uint64_t seed) {
  validate_shape(res, rank, channels);
  TriPlanarField f;
  f.res = res;
  f.rank = rank;
  f.channels = channels;
  f.combiner = combiner;
  for (int p = 0; p < 3; ++p) {
    f.planes[p].resize(std::size_t(channels) * rank * f.plane_elems(p));
  }
  // Serialization order: channel-major, rank next, planes XY/YZ/XZ.
  Rng rng(derive_seed(seed, 0xF1E1DULL));
  for (std::uint32_t c = 0; c < channels; ++c) {
    for (std::uint32_t r = 0; r < rank; ++r) {
      for (int p = 0; p < 3; ++p) {
        fill_init({f.plane_at(p, c, r), f.plane_elems(p)}, combiner, rng);
      }
    }
  }
  return f;
}

CPField make_cp(const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
                std::uint32_t channels, Combiner combiner, std::uint64_t seed) {
  validate_shape(res, rank, channels);
  CPField f;
  f.res = res;
  f.rank = rank;
  f.channels = channels;
  f.combiner = combiner;
  for (int a = 0; a < 3; ++a) f.vectors[a].resize(std::size_t(channels) * rank * res[a]);
  Rng rng(derive_seed(seed, 0xF1E1DULL));
  for (std::uint32_t c = 0; c < channels; ++c) {
    for (std::uint32_t r = 0; r < rank; ++r) {
      for (int a = 0; a < 3; ++a) {
        fill_init({f.vector_at(a, c, r), res[a]}, combiner, rng);
      }
    }
  }
  return f;
}

CellIndex locate_cell(const std::array<std::uint32_t, 3>& res, double x, double y, double z) {
  const double raw[3] = {x, y, z};
  CellIndex cell;
  for (int a = 0; a < 3; ++a) {
    const std::uint32_t n = res[a];
    const double clamped = std::clamp(raw[a], -1.0, 1.0);
    const double f = (clamped + 1.0) * 0.5 * double(n - 1);
    const std::uint32_t lo = std::min(static_cast<std::uint32_t>(f), n - 2);
    cell.lo[a] = lo;
    cell.t[a] = f - double(lo);
    cell.dindex_dcoord[a] = (raw[a] < -1.0 || raw[a] > 1.0) ? 0.0 : 0.5 * double(n - 1);
  }
  return cell;
}

void sample_triplanar(const TriPlanarField& f, double x, double y, double z,
                      std::span<double> out_features) {
  if (out_features.size() != f.channels) throw ShapeError("feature buffer size != channels");
  const CellIndex cell = locate_cell(f.res, x, y, z);
  const Stencil s0 = plane_stencil(cell, 0, f.res[1]);
  const Stencil s1 = plane_stencil(cell, 1, f.res[2]);
  const Stencil s2 = plane_stencil(cell, 2, f.res[2]);
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    double acc = 0.0;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const double pxy = gather(f.plane_at(0, c, r), s0);
      const double pyz = gather(f.plane_at(1, c, r), s1);
      const double pxz = gather(f.plane_at(2, c, r), s2);
      acc += f.combiner == Combiner::Product ? pxy * pyz * pxz : pxy + pyz + pxz;
    }
    out_features[c] = acc;
  }
}

void sample_cp(const CPField& f, double x, double y, double z, std::span<double> out_features) {
  if (out_features.size() != f.channels) throw ShapeError("feature buffer size != channels");
  const CellIndex cell = locate_cell(f.res, x, y, z);
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    double acc = 0.0;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      double v[3];
      for (int a = 0; a < 3; ++a) {
        const float* vec = f.vector_at(a, c, r);
        v[a] = (1.0 - cell.t[a]) * vec[cell.lo[a]] + cell.t[a] * vec[cell.lo[a] + 1];
      }
      acc += f.combiner == Combiner::Product ? v[0] * v[1] * v[2] : v[0] + v[1] + v[2];
    }
    out_features[c] = acc;
  }
}

std::array<double, 3> backward_sample_triplanar(const TriPlanarField& f, double x, double y,
                                                double z, std::span<const double> upstream,
                                                FieldGradients& grads) {
  if (upstream.size() != f.channels) throw ShapeError("upstream size != channels");
  if (grads.parts[0].size() != f.planes[0].size()) {
    throw ShapeError("gradient buffers do not match field shape");
  }
  const CellIndex cell = locate_cell(f.res, x, y, z);
  const Stencil st[3] = {plane_stencil(cell, 0, f.res[1]), plane_stencil(cell, 1, f.res[2]),
                         plane_stencil(cell, 2, f.res[2])};
  // d(feature)/d(fractional index) accumulators per lattice axis.
  double dfeat_dfi = 0.0, dfeat_dfj = 0.0, dfeat_dfk = 0.0;
  std::array<double, 3> coord_grad{0.0, 0.0, 0.0};
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double g = upstream[c];
    dfeat_dfi = dfeat_dfj = dfeat_dfk = 0.0;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* pxy_p = f.plane_at(0, c, r);
      const float* pyz_p = f.plane_at(1, c, r);
      const float* pxz_p = f.plane_at(2, c, r);
      double* gxy = grads.parts[0].data() + (pxy_p - f.planes[0].data());
      double* gyz = grads.parts[1].data() + (pyz_p - f.planes[1].data());
      double* gxz = grads.parts[2].data() + (pxz_p - f.planes[2].data());
      const double pxy = gather(pxy_p, st[0]);
      const double pyz = gather(pyz_p, st[1]);
      const double pxz = gather(pxz_p, st[2]);
      if (f.combiner == Combiner::Product) {
        scatter(gxy, st[0], g * pyz * pxz);
        scatter(gyz, st[1], g * pxy * pxz);
        scatter(gxz, st[2], g * pxy * pyz);
        dfeat_dfi += dgather_da(pxy_p, st[0], cell.t[1]) * pyz * pxz +
                     pxy * pyz * dgather_da(pxz_p, st[2], cell.t[2]);
        dfeat_dfj += dgather_db(pxy_p, st[0], cell.t[0]) * pyz * pxz +
                     pxy * dgather_da(pyz_p, st[1], cell.t[2]) * pxz;
        dfeat_dfk += pxy * dgather_db(pyz_p, st[1], cell.t[1]) * pxz +
                     pxy * pyz * dgather_db(pxz_p, st[2], cell.t[0]);
      } else {
        scatter(gxy, st[0], g);
        scatter(gyz, st[1], g);
        scatter(gxz, st[2], g);
        dfeat_dfi += dgather_da(pxy_p, st[0], cell.t[1]) + dgather_da(pxz_p, st[2], cell.t[2]);
        dfeat_dfj += dgather_db(pxy_p, st[0], cell.t[0]) + dgather_da(pyz_p, st[1], cell.t[2]);
        dfeat_dfk += dgather_db(pyz_p, st[1], cell.t[1]) + dgather_db(pxz_p, st[2], cell.t[0]);
      }
    }
    coord_grad[0] += g * dfeat_dfi;
    coord_grad[1] += g * dfeat_dfj;
    coord_grad[2] += g * dfeat_dfk;
  }
  for (int a = 0; a < 3; ++a) coord_grad[a] *= cell.dindex_dcoord[a];
  return coord_grad;
}

std::array<double, 3> backward_sample_cp(const CPField& f, double x, double y, double z,
                                         std::span<const double> upstream, FieldGradients& grads) {
  if (upstream.size() != f.channels) throw ShapeError("upstream size != channels");
  if (grads.parts[0].size() != f.vectors[0].size()) {
    throw ShapeError("gradient buffers do not match field shape");
  }
  const CellIndex cell = locate_cell(f.res, x, y, z);
  std::array<double, 3> coord_grad{0.0, 0.0, 0.0};
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double g = upstream[c];
    double dfeat_df[3] = {0.0, 0.0, 0.0};
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* vec[3];
      double v[3], dv[3];
      for (int a = 0; a < 3; ++a) {
        vec[a] = f.vector_at(a, c, r);
        v[a] = (1.0 - cell.t[a]) * vec[a][cell.lo[a]] + cell.t[a] * vec[a][cell.lo[a] + 1];
        dv[a] = double(vec[a][cell.lo[a] + 1]) - double(vec[a][cell.lo[a]]);
      }
      for (int a = 0; a < 3; ++a) {
        double* gv = grads.parts[a].data() + (vec[a] - f.vectors[a].data());
        const double up =
            f.combiner == Combiner::Product ? g * v[(a + 1) % 3] * v[(a + 2) % 3] : g;
        gv[cell.lo[a]] += up * (1.0 - cell.t[a]);
        gv[cell.lo[a] + 1] += up * cell.t[a];
        dfeat_df[a] +=
            f.combiner == Combiner::Product ? dv[a] * v[(a + 1) % 3] * v[(a + 2) % 3] : dv[a];
      }
    }
    for (int a = 0; a < 3; ++a) coord_grad[a] += g * dfeat_df[a];
  }
  for (int a = 0; a < 3; ++a) coord_grad[a] *= cell.dindex_dcoord[a];
  return coord_grad;
}

namespace {
void check_dense_size(std::uint64_t total) {
  if (total > (1ull << 24)) {
    throw ShapeError("dense reconstruction of " + std::to_string(total) +
                     " entries refused (limit 2^24)");
  }
}
}  // namespace

std::vector<double> reconstruct_dense(const TriPlanarField& f) {
  const std::uint32_t I = f.res[0], J = f.res[1], K = f.res[2];
  const std::uint64_t total = std::uint64_t(f.channels) * I * J * K;
  check_dense_size(total);
  std::vector<double> out(total);
  std::size_t idx = 0;
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    for (std::uint32_t k = 0; k < K; ++k) {
      for (std::uint32_t j = 0; j < J; ++j) {
        for (std::uint32_t i = 0; i < I; ++i, ++idx) {
          double acc = 0.0;
          for (std::uint32_t r = 0; r < f.rank; ++r) {
            const double pxy = f.plane_at(0, c, r)[std::size_t(i) * J + j];
            const double pyz = f.plane_at(1, c, r)[std::size_t(j) * K + k];
            const double pxz = f.plane_at(2, c, r)[std::size_t(i) * K + k];
            acc += f.combiner == Combiner::Product ? pxy * pyz * pxz : pxy + pyz + pxz;
          }
          out[idx] = acc;
        }
      }
    }
  }
  return out;
}

std::vector<double> reconstruct_dense(const CPField& f) {
  const std::uint32_t I = f.res[0], J = f.res[1], K = f.res[2];
  const std::uint64_t total = std::uint64_t(f.channels) * I * J * K;
  check_dense_size(total);
  std::vector<double> out(total);
  std::size_t idx = 0;
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    for (std::uint32_t k = 0; k < K; ++k) {
      for (std::uint32_t j = 0; j < J; ++j) {
        for (std::uint32_t i = 0; i < I; ++i, ++idx) {
          double acc = 0.0;
          for (std::uint32_t r = 0; r < f.rank; ++r) {
            const double vx = f.vector_at(0, c, r)[i];
            const double vy = f.vector_at(1, c, r)[j];
            const double vz = f.vector_at(2, c, r)[k];
            acc += f.combiner == Combiner::Product ? vx * vy * vz : vx + vy + vz;
          }
          out[idx] = acc;
        }
      }
    }
  }
  return out;
}

std::uint32_t field_channels(const FieldVariant& v) {
  if (std::holds_alternative<std::monostate>(v)) return 3;
  if (const auto* tp = std::get_if<TriPlanarField>(&v)) return tp->channels;
  return std::get<CPField>(v).channels;
}

std::size_t field_parameter_count(const FieldVariant& v) {
  if (std::holds_alternative<std::monostate>(v)) return 0;
  if (const auto* tp = std::get_if<TriPlanarField>(&v)) return tp->parameter_count();
  return std::get<CPField>(v).parameter_count();
}

namespace detail {

void batched_forward(const TriPlanarField& f, std::span<const CellIndex> cells, double* feats,
                     double* triples) {
  const std::size_t n = cells.size();
  std::fill(feats, feats + std::size_t(f.channels) * n, 0.0);
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    double* feat_c = feats + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* p0 = f.plane_at(0, c, r);
      const float* p1 = f.plane_at(1, c, r);
      const float* p2 = f.plane_at(2, c, r);
      double* cache = triples ? triples + (std::size_t(c) * f.rank + r) * n * 3 : nullptr;
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double pxy = gather(p0, plane_stencil(cell, 0, f.res[1]));
        const double pyz = gather(p1, plane_stencil(cell, 1, f.res[2]));
        const double pxz = gather(p2, plane_stencil(cell, 2, f.res[2]));
        if (cache) {
          cache[px * 3] = pxy;
          cache[px * 3 + 1] = pyz;
          cache[px * 3 + 2] = pxz;
        }
        feat_c[px] += f.combiner == Combiner::Product ? pxy * pyz * pxz : pxy + pyz + pxz;
      }
    }
  }
}

void batched_forward(const CPField& f, std::span<const CellIndex> cells, double* feats,
                     double* triples) {
  const std::size_t n = cells.size();
  std::fill(feats, feats + std::size_t(f.channels) * n, 0.0);
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    double* feat_c = feats + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* v0 = f.vector_at(0, c, r);
      const float* v1 = f.vector_at(1, c, r);
      const float* v2 = f.vector_at(2, c, r);
      double* cache = triples ? triples + (std::size_t(c) * f.rank + r) * n * 3 : nullptr;
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double vx = (1.0 - cell.t[0]) * v0[cell.lo[0]] + cell.t[0] * v0[cell.lo[0] + 1];
        const double vy = (1.0 - cell.t[1]) * v1[cell.lo[1]] + cell.t[1] * v1[cell.lo[1] + 1];
        const double vz = (1.0 - cell.t[2]) * v2[cell.lo[2]] + cell.t[2] * v2[cell.lo[2] + 1];
        if (cache) {
          cache[px * 3] = vx;
          cache[px * 3 + 1] = vy;
          cache[px * 3 + 2] = vz;
        }
        feat_c[px] += f.combiner == Combiner::Product ? vx * vy * vz : vx + vy + vz;
      }
    }
  }
}

void batched_backward_params(const TriPlanarField& f, std::span<const CellIndex> cells,
                             const double* upstream, const double* triples,
                             FieldGradients& grads) {
  const std::size_t n = cells.size();
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double* up_c = upstream + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      double* g0 = grads.parts[0].data() + (f.plane_at(0, c, r) - f.planes[0].data());
      double* g1 = grads.parts[1].data() + (f.plane_at(1, c, r) - f.planes[1].data());
      double* g2 = grads.parts[2].data() + (f.plane_at(2, c, r) - f.planes[2].data());
      const double* cache = triples + (std::size_t(c) * f.rank + r) * n * 3;
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double g = up_c[px];
        const double pxy = cache[px * 3], pyz = cache[px * 3 + 1], pxz = cache[px * 3 + 2];
        if (f.combiner == Combiner::Product) {
          scatter(g0, plane_stencil(cell, 0, f.res[1]), g * pyz * pxz);
          scatter(g1, plane_stencil(cell, 1, f.res[2]), g * pxy * pxz);
          scatter(g2, plane_stencil(cell, 2, f.res[2]), g * pxy * pyz);
        } else {
          scatter(g0, plane_stencil(cell, 0, f.res[1]), g);
          scatter(g1, plane_stencil(cell, 1, f.res[2]), g);
          scatter(g2, plane_stencil(cell, 2, f.res[2]), g);
        }
      }
    }
  }
}

void batched_backward_params(const CPField& f, std::span<const CellIndex> cells,
                             const double* upstream, const double* triples,
                             FieldGradients& grads) {
  const std::size_t n = cells.size();
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double* up_c = upstream + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      double* gv[3];
      for (int a = 0; a < 3; ++a) {
        gv[a] = grads.parts[a].data() + (f.vector_at(a, c, r) - f.vectors[a].data());
      }
      const double* cache = triples + (std::size_t(c) * f.rank + r) * n * 3;
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double g = up_c[px];
        const double v[3] = {cache[px * 3], cache[px * 3 + 1], cache[px * 3 + 2]};
        for (int a = 0; a < 3; ++a) {
          const double up =
              f.combiner == Combiner::Product ? g * v[(a + 1) % 3] * v[(a + 2) % 3] : g;
          gv[a][cell.lo[a]] += up * (1.0 - cell.t[a]);
          gv[a][cell.lo[a] + 1] += up * cell.t[a];
        }
      }
    }
  }
}

void batched_backward_coords(const TriPlanarField& f, std::span<const CellIndex> cells,
                             const double* upstream, double* coord_grads) {
  const std::size_t n = cells.size();
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double* up_c = upstream + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* p0 = f.plane_at(0, c, r);
      const float* p1 = f.plane_at(1, c, r);
      const float* p2 = f.plane_at(2, c, r);
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double g = up_c[px];
        const Stencil s0 = plane_stencil(cell, 0, f.res[1]);
        const Stencil s1 = plane_stencil(cell, 1, f.res[2]);
        const Stencil s2 = plane_stencil(cell, 2, f.res[2]);
        double dfi, dfj, dfk;
        if (f.combiner == Combiner::Product) {
          const double pxy = gather(p0, s0), pyz = gather(p1, s1), pxz = gather(p2, s2);
          dfi = dgather_da(p0, s0, cell.t[1]) * pyz * pxz + pxy * pyz * dgather_da(p2, s2, cell.t[2]);
          dfj = dgather_db(p0, s0, cell.t[0]) * pyz * pxz + pxy * dgather_da(p1, s1, cell.t[2]) * pxz;
          dfk = pxy * dgather_db(p1, s1, cell.t[1]) * pxz + pxy * pyz * dgather_db(p2, s2, cell.t[0]);
        } else {
          dfi = dgather_da(p0, s0, cell.t[1]) + dgather_da(p2, s2, cell.t[2]);
          dfj = dgather_db(p0, s0, cell.t[0]) + dgather_da(p1, s1, cell.t[2]);
          dfk = dgather_db(p1, s1, cell.t[1]) + dgather_db(p2, s2, cell.t[0]);
        }
        coord_grads[px * 3] += g * dfi * cell.dindex_dcoord[0];
        coord_grads[px * 3 + 1] += g * dfj * cell.dindex_dcoord[1];
        coord_grads[px * 3 + 2] += g * dfk * cell.dindex_dcoord[2];
      }
    }
  }
}

void batched_backward_coords(const CPField& f, std::span<const CellIndex> cells,
                             const double* upstream, double* coord_grads) {
  const std::size_t n = cells.size();
  for (std::uint32_t c = 0; c < f.channels; ++c) {
    const double* up_c = upstream + std::size_t(c) * n;
    for (std::uint32_t r = 0; r < f.rank; ++r) {
      const float* vec[3] = {f.vector_at(0, c, r), f.vector_at(1, c, r), f.vector_at(2, c, r)};
      for (std::size_t px = 0; px < n; ++px) {
        const CellIndex& cell = cells[px];
        const double g = up_c[px];
        double v[3], dv[3];
        for (int a = 0; a < 3; ++a) {
          v[a] = (1.0 - cell.t[a]) * vec[a][cell.lo[a]] + cell.t[a] * vec[a][cell.lo[a] + 1];
          dv[a] = double(vec[a][cell.lo[a] + 1]) - double(vec[a][cell.lo[a]]);
        }
        for (int a = 0; a < 3; ++a) {
          const double d =
              f.combiner == Combiner::Product ? dv[a] * v[(a + 1) % 3] * v[(a + 2) % 3] : dv[a];
          coord_grads[px * 3 + a] += g * d * cell.dindex_dcoord[a];
        }
      }
    }
  }
}

}  // namespace detail

}  // namespace trivol
