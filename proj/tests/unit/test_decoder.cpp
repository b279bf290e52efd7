#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trivol/decoder.hpp"
#include "trivol/errors.hpp"
#include "trivol/rng.hpp"

TEST_CASE("decoder envelope and machinery bounds") {
  for (std::uint32_t n : {2u, 3u, 4u}) {
    for (std::uint32_t w : {32u, 64u, 128u}) {
      CHECK_NOTHROW(trivol::validate_decoder_config({n, w, 50}));
    }
  }
  CHECK_THROWS_AS(trivol::validate_decoder_config({5, 64, 50}), trivol::ConfigError);
  CHECK_THROWS_AS(trivol::validate_decoder_config({1, 64, 50}), trivol::ConfigError);
  CHECK_THROWS_AS(trivol::validate_decoder_config({3, 48, 50}), trivol::ConfigError);

  // The machinery itself accepts the wider range the dense baseline needs.
  CHECK_NOTHROW((void)trivol::make_mlp({6, 128, 63}, 0));
  CHECK_NOTHROW((void)trivol::make_mlp({1, 1, 5}, 0));
  CHECK_THROWS_AS((void)trivol::make_mlp({9, 64, 50}, 0), trivol::ConfigError);
  CHECK_THROWS_AS((void)trivol::make_mlp({2, 5000, 50}, 0), trivol::ConfigError);
}

TEST_CASE("init: zero biases, fan-in bound, 0.5 at zero input") {
  const trivol::Mlp mlp = trivol::make_mlp({3, 64, 50}, 4);
  for (const auto& b : mlp.biases) {
    for (float v : b) CHECK(v == 0.0f);
  }
  for (std::uint32_t l = 0; l < 3; ++l) {
    const double bound = std::sqrt(6.0 / mlp.in_dim(l));
    for (float v : mlp.weights[l]) CHECK(std::abs(v) <= bound);
  }
  const std::vector<double> zeros(50, 0.0);
  CHECK(trivol::mlp_forward_one(mlp, zeros) == 0.5);
}

TEST_CASE("parameter count sums the affine layers") {
  const trivol::Mlp mlp = trivol::make_mlp({3, 32, 20}, 1);
  // 20->32, 32->32, 32->1 with biases.
  CHECK(mlp.parameter_count() == (20u * 32 + 32) + (32u * 32 + 32) + (32u + 1));
}

TEST_CASE("forward matches the plain-loop oracle; outputs in (0,1)") {
  trivol::Rng rng(6);
  for (const trivol::MlpConfig cfg :
       {trivol::MlpConfig{2, 64, 50}, trivol::MlpConfig{4, 128, 10}, trivol::MlpConfig{1, 1, 5}}) {
    const trivol::Mlp mlp = trivol::make_mlp(cfg, 8);
    for (int n = 0; n < 40; ++n) {
      std::vector<double> input(cfg.input_width);
      for (double& x : input) x = rng.uniform(-2, 2);
      const double got = trivol::mlp_forward_one(mlp, input);
      CHECK(got > 0.0);
      CHECK(got < 1.0);
      CHECK(oracle::rel_err(got, oracle::mlp_forward(mlp, input)) < 1e-12);
    }
  }
}

TEST_CASE("batch forward equals the single-sample path bitwise") {
  trivol::Rng rng(14);
  const trivol::Mlp mlp = trivol::make_mlp({3, 32, 12}, 2);
  const std::size_t n = 9;
  std::vector<double> input(n * 12);
  for (double& x : input) x = rng.uniform(-1, 1);
  std::vector<double> out(n);
  trivol::MlpBatch scratch;
  trivol::mlp_forward(mlp, input.data(), n, scratch, out.data());
  for (std::size_t s = 0; s < n; ++s) {
    const std::span<const double> row(input.data() + s * 12, 12);
    CHECK(out[s] == trivol::mlp_forward_one(mlp, row));
  }
}

TEST_CASE("backward matches finite differences for params and input") {
  trivol::Rng rng(25);
  trivol::Mlp mlp = trivol::make_mlp({3, 32, 8}, 11);
  std::vector<double> input(8);
  for (double& x : input) x = rng.uniform(-1, 1);
  const double upstream = 1.7;

  trivol::MlpGrads grads = trivol::make_grads(mlp);
  std::vector<double> input_grad(8);
  (void)trivol::mlp_backward_one(mlp, input, upstream, grads, input_grad);

  for (std::size_t i = 0; i < input.size(); ++i) {
    const double fd = oracle::central_diff(
        [&](double v) {
          std::vector<double> in2 = input;
          in2[i] = v;
          return upstream * trivol::mlp_forward_one(mlp, in2);
        },
        input[i], 1e-6);
    CHECK(oracle::rel_err(fd, input_grad[i]) < 1e-5);
  }

  for (std::uint32_t l = 0; l < 3; ++l) {
    for (int probe = 0; probe < 8; ++probe) {
      const std::size_t p = rng.below(mlp.weights[l].size());
      const float save = mlp.weights[l][p];
      const double fd = oracle::central_diff(
          [&](double v) {
            mlp.weights[l][p] = static_cast<float>(v);
            const double r = upstream * trivol::mlp_forward_one(mlp, input);
            mlp.weights[l][p] = save;
            return r;
          },
          static_cast<double>(save), 1e-4);
      CHECK(oracle::rel_err(fd, grads.weights[l][p]) < 1e-3);
    }
    const std::size_t bp = rng.below(mlp.biases[l].size());
    const float bsave = mlp.biases[l][bp];
    const double fd = oracle::central_diff(
        [&](double v) {
          mlp.biases[l][bp] = static_cast<float>(v);
          const double r = upstream * trivol::mlp_forward_one(mlp, input);
          mlp.biases[l][bp] = bsave;
          return r;
        },
        static_cast<double>(bsave), 1e-4);
    CHECK(oracle::rel_err(fd, grads.biases[l][bp]) < 1e-3);
  }
}

TEST_CASE("backward accumulates rather than overwriting") {
  trivol::Mlp mlp = trivol::make_mlp({2, 32, 4}, 3);
  const std::vector<double> input{0.1, -0.2, 0.3, 0.4};
  trivol::MlpGrads once = trivol::make_grads(mlp);
  trivol::MlpGrads twice = trivol::make_grads(mlp);
  std::vector<double> ig(4);
  (void)trivol::mlp_backward_one(mlp, input, 1.0, once, ig);
  (void)trivol::mlp_backward_one(mlp, input, 1.0, twice, ig);
  (void)trivol::mlp_backward_one(mlp, input, 1.0, twice, ig);
  for (std::uint32_t l = 0; l < 2; ++l) {
    for (std::size_t i = 0; i < once.weights[l].size(); ++i) {
      CHECK(twice.weights[l][i] == doctest::Approx(2.0 * once.weights[l][i]).epsilon(1e-12));
    }
  }
}
