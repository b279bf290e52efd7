#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trivol/errors.hpp"
#include "field_detail.hpp"
#include "trivol/field.hpp"
#include "trivol/rng.hpp"

using trivol::Combiner;

namespace {

// Summed-feature scalar objective with fixed random weights, used to turn the
// vector-valued sampler into a differentiable scalar for gradient checks.
std::vector<double> make_weights(std::uint32_t channels, std::uint64_t seed) {
  trivol::Rng rng(seed);
  std::vector<double> w(channels);
  for (double& x : w) x = rng.uniform(-1.0, 1.0);
  return w;
}

}  // namespace

TEST_CASE("init ranges and determinism") {
  const auto prod = trivol::make_triplanar({4, 4, 4}, 2, 3, Combiner::Product, 9);
  for (const auto& plane : prod.planes) {
    for (float v : plane) {
      CHECK(v >= 0.9f);
      CHECK(v < 1.1f);
    }
  }
  const auto sum = trivol::make_cp({4, 4, 4}, 2, 3, Combiner::Sum, 9);
  for (const auto& vec : sum.vectors) {
    for (float v : vec) {
      CHECK(v >= -0.1f);
      CHECK(v < 0.1f);
    }
  }
  const auto again = trivol::make_triplanar({4, 4, 4}, 2, 3, Combiner::Product, 9);
  CHECK(again.planes == prod.planes);
  const auto other = trivol::make_triplanar({4, 4, 4}, 2, 3, Combiner::Product, 10);
  CHECK(other.planes != prod.planes);
}

TEST_CASE("parameter counts follow the factorization laws") {
  const auto tp = trivol::make_triplanar({5, 7, 9}, 3, 2, Combiner::Product, 1);
  CHECK(tp.parameter_count() == 2u * 3u * (5 * 7 + 7 * 9 + 5 * 9));
  const auto cp = trivol::make_cp({5, 7, 9}, 3, 2, Combiner::Product, 1);
  CHECK(cp.parameter_count() == 2u * 3u * (5 + 7 + 9));
}

TEST_CASE("lattice samples equal the brute-force formula and reconstruct_dense") {
  for (const Combiner comb : {Combiner::Product, Combiner::Sum}) {
    const auto tp = trivol::make_triplanar({4, 5, 6}, 3, 2, comb, 21);
    const auto cp = trivol::make_cp({4, 5, 6}, 3, 2, comb, 22);
    const auto dense_tp = trivol::reconstruct_dense(tp);
    const auto dense_cp = trivol::reconstruct_dense(cp);
    std::vector<double> feats(2);
    for (std::uint32_t k = 0; k < 6; ++k) {
      for (std::uint32_t j = 0; j < 5; ++j) {
        for (std::uint32_t i = 0; i < 4; ++i) {
          // Normalized coordinate of lattice point (i, j, k).
          const double x = -1.0 + 2.0 * i / 3.0;
          const double y = -1.0 + 2.0 * j / 4.0;
          const double z = -1.0 + 2.0 * k / 5.0;
          const std::size_t idx = i + 4ull * (j + 5ull * k);
          for (std::uint32_t c = 0; c < 2; ++c) {
            const double want_tp = oracle::triplanar_lattice(tp, c, i, j, k);
            const double want_cp = oracle::cp_lattice(cp, c, i, j, k);
            CHECK(std::abs(dense_tp[c * 120 + idx] - want_tp) < 1e-9);
            CHECK(std::abs(dense_cp[c * 120 + idx] - want_cp) < 1e-9);
            trivol::sample_triplanar(tp, x, y, z, feats);
            CHECK(std::abs(feats[c] - want_tp) < 1e-9);
            trivol::sample_cp(cp, x, y, z, feats);
            CHECK(std::abs(feats[c] - want_cp) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("continuous samples match the independent interpolating oracle") {
  trivol::Rng rng(33);
  const auto tp = trivol::make_triplanar({6, 5, 4}, 4, 3, Combiner::Product, 5);
  const auto cp = trivol::make_cp({6, 5, 4}, 4, 3, Combiner::Sum, 6);
  std::vector<double> feats(3);
  for (int n = 0; n < 200; ++n) {
    const double x = rng.uniform(-1.2, 1.2);  // includes out-of-cube clamping
    const double y = rng.uniform(-1.2, 1.2);
    const double z = rng.uniform(-1.2, 1.2);
    const auto want_tp = oracle::sample_triplanar(tp, x, y, z);
    trivol::sample_triplanar(tp, x, y, z, feats);
    for (std::uint32_t c = 0; c < 3; ++c) CHECK(oracle::rel_err(feats[c], want_tp[c]) < 1e-12);
    const auto want_cp = oracle::sample_cp(cp, x, y, z);
    trivol::sample_cp(cp, x, y, z, feats);
    for (std::uint32_t c = 0; c < 3; ++c) CHECK(oracle::rel_err(feats[c], want_cp[c]) < 1e-12);
  }
}

TEST_CASE("out-of-cube coordinates clamp and kill the clamped axis gradient") {
  const auto tp = trivol::make_triplanar({5, 5, 5}, 2, 2, Combiner::Product, 3);
  std::vector<double> at_edge(2), beyond(2);
  trivol::sample_triplanar(tp, 1.0, 0.3, -0.2, at_edge);
  trivol::sample_triplanar(tp, 7.5, 0.3, -0.2, beyond);
  CHECK(at_edge == beyond);

  trivol::FieldGradients grads = trivol::make_gradients(tp);
  const std::vector<double> upstream{1.0, -0.5};
  const auto g = trivol::backward_sample_triplanar(tp, 7.5, 0.3, -0.2, upstream, grads);
  CHECK(g[0] == 0.0);  // clamped axis
  CHECK(g[1] != 0.0);
}

TEST_CASE("backward gradients agree with finite differences") {
  trivol::Rng rng(77);
  for (const Combiner comb : {Combiner::Product, Combiner::Sum}) {
    auto tp = trivol::make_triplanar({4, 4, 4}, 2, 2, comb, 13);
    const auto w = make_weights(2, 99);
    const auto objective = [&](double x, double y, double z) {
      std::vector<double> f(2);
      trivol::sample_triplanar(tp, x, y, z, f);
      return w[0] * f[0] + w[1] * f[1];
    };

    for (int n = 0; n < 10; ++n) {
      const double x = rng.uniform(-0.95, 0.95);
      const double y = rng.uniform(-0.95, 0.95);
      const double z = rng.uniform(-0.95, 0.95);
      trivol::FieldGradients grads = trivol::make_gradients(tp);
      const auto gxyz = trivol::backward_sample_triplanar(tp, x, y, z, w, grads);

      // Coordinate gradients.
      for (int axis = 0; axis < 3; ++axis) {
        const double fd = oracle::central_diff(
            [&](double v) {
              double c[3] = {x, y, z};
              c[axis] = v;
              return objective(c[0], c[1], c[2]);
            },
            axis == 0 ? x : axis == 1 ? y : z, 1e-5);
        CHECK(oracle::rel_err(fd, gxyz[static_cast<std::size_t>(axis)]) < 1e-4);
      }

      // A few parameter gradients per plane (FD over the float parameter).
      for (int which = 0; which < 3; ++which) {
        const auto wi = static_cast<std::size_t>(which);
        for (int probe = 0; probe < 4; ++probe) {
          const std::size_t p = rng.below(tp.planes[wi].size());
          const float save = tp.planes[wi][p];
          const double fd = oracle::central_diff(
              [&](double v) {
                tp.planes[wi][p] = static_cast<float>(v);
                const double r = objective(x, y, z);
                tp.planes[wi][p] = save;
                return r;
              },
              static_cast<double>(save), 1e-3);
          CHECK(oracle::rel_err(fd, grads.parts[wi][p]) < 1e-3);
        }
      }
    }
  }
}

TEST_CASE("batched kernels are bitwise-identical to the per-coordinate API") {
  trivol::Rng rng(55);
  const auto tp = trivol::make_triplanar({6, 6, 6}, 3, 4, Combiner::Product, 17);
  const std::size_t n = 64;
  std::vector<trivol::CellIndex> cells(n);
  std::vector<double> coords(n * 3);
  for (std::size_t s = 0; s < n; ++s) {
    coords[s * 3 + 0] = rng.uniform(-1.1, 1.1);
    coords[s * 3 + 1] = rng.uniform(-1.1, 1.1);
    coords[s * 3 + 2] = rng.uniform(-1.1, 1.1);
    cells[s] = trivol::locate_cell(tp.res, coords[s * 3], coords[s * 3 + 1], coords[s * 3 + 2]);
  }

  // Forward: feats laid out as [channel][sample] planes.
  std::vector<double> batched(4 * n), triples(3ull * 4 * 3 * n);
  trivol::detail::batched_forward(tp, cells, batched.data(), triples.data());
  std::vector<double> one(4);
  for (std::size_t s = 0; s < n; ++s) {
    trivol::sample_triplanar(tp, coords[s * 3], coords[s * 3 + 1], coords[s * 3 + 2], one);
    for (std::uint32_t c = 0; c < 4; ++c) CHECK(batched[c * n + s] == one[c]);
  }

  // Backward: batched params + coords vs per-coordinate accumulation.
  std::vector<double> upstream(4 * n);
  for (double& u : upstream) u = rng.uniform(-1, 1);
  trivol::FieldGradients batched_grads = trivol::make_gradients(tp);
  std::vector<double> coord_grads(n * 3, 0.0);
  trivol::detail::batched_backward_params(tp, cells, upstream.data(), triples.data(),
                                          batched_grads);
  trivol::detail::batched_backward_coords(tp, cells, upstream.data(), coord_grads.data());

  trivol::FieldGradients serial_grads = trivol::make_gradients(tp);
  std::vector<double> up_one(4);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::uint32_t c = 0; c < 4; ++c) up_one[c] = upstream[c * n + s];
    const auto g = trivol::backward_sample_triplanar(tp, coords[s * 3], coords[s * 3 + 1],
                                                     coords[s * 3 + 2], up_one, serial_grads);
    CHECK(coord_grads[s * 3 + 0] == g[0]);
    CHECK(coord_grads[s * 3 + 1] == g[1]);
    CHECK(coord_grads[s * 3 + 2] == g[2]);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(batched_grads.parts[static_cast<std::size_t>(i)] ==
          serial_grads.parts[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("field constructor validation") {
  CHECK_THROWS_AS((void)trivol::make_triplanar({1, 4, 4}, 2, 2, Combiner::Product, 0),
                  trivol::ConfigError);
  CHECK_THROWS_AS((void)trivol::make_cp({4, 4, 4}, 0, 2, Combiner::Product, 0),
                  trivol::ConfigError);
  CHECK_THROWS_AS((void)trivol::make_cp({4, 4, 4}, 2, 0, Combiner::Product, 0),
                  trivol::ConfigError);
}
