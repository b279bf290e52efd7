#include <cmath>
#include <vector>

#include "doctest.h"
#include "trivol/errors.hpp"
#include "trivol/optim.hpp"

TEST_CASE("sgd: p -= lr * g, consume form zeroes the grads") {
  std::vector<float> params{1.0f, -2.0f, 0.5f};
  std::vector<double> grads{0.5, -1.0, 4.0};
  trivol::sgd_step(params, grads, 0.5);
  CHECK(params[0] == 0.75f);
  CHECK(params[1] == -1.5f);
  CHECK(params[2] == -1.5f);

  trivol::sgd_step_consume(params, grads, 0.5);
  CHECK(grads == std::vector<double>{0, 0, 0});
  CHECK(params[0] == 0.5f);
}

TEST_CASE("adam: first step moves by ~lr regardless of gradient scale") {
  // With zero state, mhat = g and vhat = g^2, so the update is
  // lr * g / (|g| + eps) — the sign of g at almost exactly lr magnitude.
  trivol::AdamConfig cfg;  // lr 1e-3, betas (0.9, 0.999), eps 1e-8
  for (const double g0 : {1e-6, 0.5, 300.0}) {
    trivol::AdamState st = trivol::make_adam(1, cfg);
    std::vector<double> p{0.0};
    std::vector<double> g{g0};
    trivol::adam_step_consume(st, p, g);
    CHECK(std::abs(p[0] + cfg.lr * g0 / (std::abs(g0) + cfg.eps)) < 1e-15);
    CHECK(g[0] == 0.0);
    CHECK(st.t == 1);
  }
}

TEST_CASE("adam follows the reference update for a fixed two-step trace") {
  trivol::AdamConfig cfg;
  trivol::AdamState st = trivol::make_adam(1, cfg);
  std::vector<double> p{1.0};

  // Step 1, g = 2.
  std::vector<double> g{2.0};
  trivol::adam_step_consume(st, p, g);
  double m = 0.1 * 2.0, v = 0.001 * 4.0;
  double mhat = m / (1 - 0.9), vhat = v / (1 - 0.999);
  double want = 1.0 - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  CHECK(p[0] == doctest::Approx(want).epsilon(1e-14));

  // Step 2, g = -1.
  g[0] = -1.0;
  trivol::adam_step_consume(st, p, g);
  m = 0.9 * m + 0.1 * -1.0;
  v = 0.999 * v + 0.001 * 1.0;
  mhat = m / (1 - 0.9 * 0.9);
  vhat = v / (1 - 0.999 * 0.999);
  want -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  CHECK(p[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("adam converges on a 1D quadratic") {
  trivol::AdamConfig cfg;
  cfg.lr = 0.05;
  trivol::AdamState st = trivol::make_adam(1, cfg);
  std::vector<double> p{3.0};
  std::vector<double> g(1);
  for (int i = 0; i < 2000; ++i) {
    g[0] = 2.0 * (p[0] - 0.7);  // d/dp (p - 0.7)^2
    trivol::adam_step_consume(st, p, g);
  }
  CHECK(std::abs(p[0] - 0.7) < 1e-3);
}

TEST_CASE("size mismatches are rejected") {
  std::vector<float> params{1.0f};
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(trivol::sgd_step(params, three, 0.1), trivol::ShapeError);
  trivol::AdamState st = trivol::make_adam(2, {});
  std::vector<double> p{0.0, 0.0};
  CHECK_THROWS_AS(trivol::adam_step_consume(st, p, three), trivol::ShapeError);
}
