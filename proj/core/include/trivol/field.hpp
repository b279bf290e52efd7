#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace trivol {

enum class Combiner : std::uint8_t { Product = 0, Sum = 1 };

// Rank-R tri-planar factorization of a C-channel volume on an (I, J, K)
// lattice. Feature c at lattice point (i, j, k) is
//   sum_r  P_XY[c,r](i,j) o P_YZ[c,r](j,k) o P_XZ[c,r](i,k)
// with o the combiner (product by default). Continuous coordinates sample
// each plane bilinearly before combining.
struct TriPlanarField {
  std::array<std::uint32_t, 3> res{0, 0, 0};  // (I, J, K), each >= 2
  std::uint32_t rank = 0;
  std::uint32_t channels = 0;
  Combiner combiner = Combiner::Product;
  // planes[0] = XY (I rows, J cols), planes[1] = YZ (J rows, K cols),
  // planes[2] = XZ (I rows, K cols); each [c][r][row][col], col fastest.
  std::array<std::vector<float>, 3> planes;

  std::array<std::uint32_t, 2> plane_shape(int which) const;
  std::size_t plane_elems(int which) const;
  float* plane_at(int which, std::uint32_t c, std::uint32_t r);
  const float* plane_at(int which, std::uint32_t c, std::uint32_t r) const;
  std::size_t parameter_count() const;
};

// Rank-R CP factorization: feature c at (i, j, k) is
//   sum_r  vX[c,r](i) o vY[c,r](j) o vZ[c,r](k),
// product combiner by default, linear interpolation at fractional indices.
struct CPField {
  std::array<std::uint32_t, 3> res{0, 0, 0};
  std::uint32_t rank = 0;
  std::uint32_t channels = 0;
  Combiner combiner = Combiner::Product;
  // vectors[axis] holds [c][r][res[axis]] entries, contiguous per (c, r).
  std::array<std::vector<float>, 3> vectors;

  float* vector_at(int axis, std::uint32_t c, std::uint32_t r);
  const float* vector_at(int axis, std::uint32_t c, std::uint32_t r) const;
  std::size_t parameter_count() const;
};

// Gradient buffers congruent with a field's parameter storage, accumulated
// in double. Owners zero them between optimization steps.
struct FieldGradients {
  std::array<std::vector<double>, 3> parts;
  void zero();
  std::size_t parameter_count() const;
};

FieldGradients make_gradients(const TriPlanarField& f);
FieldGradients make_gradients(const CPField& f);

// Random init: product combiner draws U[0.9, 1.1) so rank sums start near R;
// sum combiner draws U[-0.1, 0.1) so features start near zero. Entries are
// filled in serialization order (channel-major, rank next, planes XY/YZ/XZ).
TriPlanarField make_triplanar(const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
                              std::uint32_t channels, Combiner combiner, std::uint64_t seed);
CPField make_cp(const std::array<std::uint32_t, 3>& res, std::uint32_t rank,
                std::uint32_t channels, Combiner combiner, std::uint64_t seed);

// Continuous lattice location of one normalized coordinate triple; shared by
// every sampler so forward and backward agree on the cell and the clamping.
struct CellIndex {
  std::array<std::uint32_t, 3> lo;      // lower lattice index per axis
  std::array<double, 3> t;              // in-cell fraction per axis
  std::array<double, 3> dindex_dcoord;  // (n-1)/2, or 0 in a clamped axis
};
CellIndex locate_cell(const std::array<std::uint32_t, 3>& res, double x, double y, double z);

// out_features.size() must equal channels.
void sample_triplanar(const TriPlanarField& f, double x, double y, double z,
                      std::span<double> out_features);
void sample_cp(const CPField& f, double x, double y, double z, std::span<double> out_features);

// Accumulates dL/dparams into grads given upstream = dL/dfeatures and
// returns dL/d(x,y,z). Coordinates outside the cube contribute zero gradient
// in the clamped axis.
std::array<double, 3> backward_sample_triplanar(const TriPlanarField& f, double x, double y,
                                                double z, std::span<const double> upstream,
                                                FieldGradients& grads);
std::array<double, 3> backward_sample_cp(const CPField& f, double x, double y, double z,
                                         std::span<const double> upstream, FieldGradients& grads);

// Direct lattice evaluation (pure indexing, no interpolation), channel-major,
// x fastest within a channel: out[c][i + I*(j + J*k)]. Refuses outputs larger
// than 2^24 entries.
std::vector<double> reconstruct_dense(const TriPlanarField& f);
std::vector<double> reconstruct_dense(const CPField& f);

// A model's geometry representation. monostate = none: features are the raw
// coordinates themselves (the dense implicit baseline).
using FieldVariant = std::variant<std::monostate, TriPlanarField, CPField>;

std::uint32_t field_channels(const FieldVariant& v);  // 3 for monostate
std::size_t field_parameter_count(const FieldVariant& v);

}  // namespace trivol
