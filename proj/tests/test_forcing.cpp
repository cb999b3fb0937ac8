#include <cmath>

#include "doctest.h"
#include "opm/forcing.hpp"
#include "opm/rng.hpp"

using namespace opm;

TEST_CASE("Brownian paths: pinned at zero, deterministic, N(0, dt) increments") {
  const BrownianPaths a = sample_brownian(11, {4, 5}, VectorXd::Constant(2, 0.2), 1e-3, -1.0, 100.0);
  const BrownianPaths b = sample_brownian(11, {4, 5}, VectorXd::Constant(2, 0.2), 1e-3, -1.0, 100.0);
  CHECK(a.at(0, 0) == 0.0);
  CHECK(a.at(1, 0) == 0.0);
  CHECK(a.W == b.W);
  double s = 0, s2 = 0;
  long n = 0;
  for (long k = 0; k < a.k_max; ++k) {
    const double d = a.at(0, k + 1) - a.at(0, k);
    s += d;
    s2 += d * d;
    ++n;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(n >= 100000);
  CHECK(var > 0.95e-3);
  CHECK(var < 1.05e-3);
  // independent sub-streams per mode
  CHECK(a.at(0, 500) != a.at(1, 500));
}

TEST_CASE("Brownian paths: forward samples do not depend on the pre-history length") {
  const BrownianPaths a = sample_brownian(3, {4}, VectorXd::Constant(1, 1.0), 1e-2, -1.0, 5.0);
  const BrownianPaths b = sample_brownian(3, {4}, VectorXd::Constant(1, 1.0), 1e-2, -4.0, 5.0);
  for (long k = -100; k <= 500; ++k) CHECK(a.at(0, k) == b.at(0, k));
}

TEST_CASE("Brownian paths reject a positive t_min") {
  CHECK_THROWS_AS(sample_brownian(1, {4}, VectorXd::Constant(1, 1.0), 1e-2, 0.5, 5.0), std::invalid_argument);
}

TEST_CASE("coarsen keeps the realization") {
  const BrownianPaths f = sample_brownian(5, {4}, VectorXd::Constant(1, 1.0), 1e-3, -1.0, 2.0);
  const BrownianPaths c = coarsen(f, 10);
  CHECK(c.dt == doctest::Approx(1e-2));
  for (long k = c.k_min; k <= c.k_max; ++k) CHECK(c.at(0, k) == f.at(0, 10 * k));
}

TEST_CASE("jump signal: block structure and firing rate") {
  const JumpSignal s = sample_jump_signal(9, 0.35, 1.0, 0.01, 0.0, 10000.0);
  long fired = 0, blocks = 0;
  for (long k = 0; k + 100 <= s.k_max; k += 100) {
    for (long j = 1; j < 100; ++j) {
      REQUIRE(s.f[k + j - s.k_min] == s.f[k - s.k_min]);
      REQUIRE(s.zeta[k + j - s.k_min] == s.zeta[k - s.k_min]);
    }
    fired += s.f[k - s.k_min] > 0.5;
    ++blocks;
    CHECK(std::abs(s.zeta[k - s.k_min]) < 1.0);
  }
  CHECK(blocks >= 10000);
  const double rate = static_cast<double>(fired) / blocks;
  CHECK(rate >= 0.343);
  CHECK(rate <= 0.357);
}

TEST_CASE("jump signal: firing rate extremes and validation") {
  const JumpSignal one = sample_jump_signal(1, 1.0, 1.0, 0.1, 0.0, 50.0);
  const JumpSignal zero = sample_jump_signal(1, 0.0, 1.0, 0.1, 0.0, 50.0);
  CHECK(one.f.minCoeff() == 1.0);
  CHECK(zero.f.maxCoeff() == 0.0);
  CHECK_THROWS_AS(sample_jump_signal(1, 1.5, 1.0, 0.1, 0.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_jump_signal(1, -0.1, 1.0, 0.1, 0.0, 5.0), std::invalid_argument);
}

TEST_CASE("per-step cadence resamples zeta inside a block") {
  const JumpSignal s = sample_jump_signal(2, 1.0, 1.0, 0.1, 0.0, 5.0, ZetaCadence::PerStep);
  CHECK(s.zeta[1] != s.zeta[2]);
  CHECK(s.f[1] == s.f[2]);
}

TEST_CASE("memory quadrature: trivial cases") {
  BrownianPaths p = sample_brownian(1, {4}, VectorXd::Constant(1, 1.0), 1e-2, -2.0, 1.0);
  CHECK(memory_quadrature_I(p, 0, -1.0, 0.0, 50) == 0.0);
  CHECK(init_memory_I(p, 0, -1.0, 0.0) == 0.0);
  p.W.setZero();
  CHECK(init_memory_I(p, 0, -1.0, 1.5) == 0.0);
  CHECK_THROWS_AS(init_memory_I(p, 0, -1.0, 2.5), std::invalid_argument);
}

TEST_CASE("init_memory_I converges at second order under refinement") {
  // smooth path so the trapezoid order shows: W_s = s^2
  auto make = [](double dt) {
    BrownianPaths p = sample_brownian(1, {4}, VectorXd::Constant(1, 1.0), dt, -2.0, 0.0);
    for (long k = p.k_min; k <= p.k_max; ++k) p.W(0, k - p.k_min) = std::pow(k * dt, 2);
    return p;
  };
  const double kappa = -0.7, tau = 1.0;
  // exact int_{-1}^0 e^{-kappa s} s^2 ds
  const double a = -kappa;
  const double exact = 2.0 / (a * a * a) - std::exp(-a) * (1.0 / a + 2.0 / (a * a) + 2.0 / (a * a * a));
  const double e1 = std::abs(init_memory_I(make(0.02), 0, kappa, tau) - exact);
  const double e2 = std::abs(init_memory_I(make(0.01), 0, kappa, tau) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("step_memory_I: homogeneous decay is the Euler factor") {
  BrownianPaths p = sample_brownian(1, {4}, VectorXd::Constant(1, 1.0), 1e-2, -2.0, 1.0);
  p.W.setZero();
  MemoryState m = init_memory_gaussian(p, {0}, VectorXd::Constant(1, -2.0), VectorXd::Constant(1, 0.5), 0);
  m.value[0] = 3.0;
  for (int k = 0; k < 10; ++k) step_memory_I(m, p);
  CHECK(m.value[0] == doctest::Approx(std::pow(1.0 - 0.02, 10) * 3.0).epsilon(1e-14));
  CHECK(m.k == 10);
}

TEST_CASE("step_memory_J: constant signal reaches the closed-form stationary value") {
  JumpSignal s = sample_jump_signal(1, 1.0, 1.0, 1e-3, -2.0, 10.0);
  s.zeta.setOnes();
  const double beta = -3.0, tau = 0.5, gain = 396.0;
  MemoryState m = init_memory_jump(s, VectorXd::Constant(1, beta), VectorXd::Constant(1, tau),
                                   VectorXd::Constant(1, gain), 0);
  const double stat = gain * (1.0 - std::exp(beta * tau)) / (-beta);
  CHECK(m.value[0] == doctest::Approx(stat).epsilon(1e-5));
  for (int k = 0; k < 5000; ++k) step_memory_J(m, s);
  CHECK(m.value[0] == doctest::Approx(stat).epsilon(1e-3));
}

TEST_CASE("step_memory_J: zero signal decays to zero") {
  JumpSignal s = sample_jump_signal(1, 0.0, 1.0, 1e-2, -2.0, 20.0);
  MemoryState m = init_memory_jump(s, VectorXd::Constant(1, -5.0), VectorXd::Constant(1, 0.5),
                                   VectorXd::Constant(1, 1.0), 0);
  m.value[0] = 1.0;
  for (int k = 0; k < 1000; ++k) step_memory_J(m, s);
  CHECK(std::abs(m.value[0]) < 1e-12);
}

TEST_CASE("memory steps reject non-negative rates") {
  BrownianPaths p = sample_brownian(1, {4}, VectorXd::Constant(1, 1.0), 1e-2, -2.0, 1.0);
  CHECK_THROWS_AS(init_memory_gaussian(p, {0}, VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 0.5), 0),
                  std::invalid_argument);
  JumpSignal s = sample_jump_signal(1, 0.5, 1.0, 1e-2, -2.0, 5.0);
  CHECK_THROWS_AS(init_memory_jump(s, VectorXd::Constant(1, 0.5), VectorXd::Constant(1, 0.5), VectorXd::Ones(1), 0),
                  std::invalid_argument);
}

TEST_CASE("propagated memory tracks quadrature at dt = 1e-3 for moderate rates") {
  const double dt = 1e-3, kappa = -1.4, tau = 0.8;
  const BrownianPaths p = sample_brownian(8, {4}, VectorXd::Constant(1, 1.0), dt, -1.0, 5.0);
  MemoryState m = init_memory_gaussian(p, {0}, VectorXd::Constant(1, kappa), VectorXd::Constant(1, tau), 0);
  double worst = 0;
  for (long k = 1; k <= 5000; ++k) {
    step_memory_I(m, p);
    const double q = memory_quadrature_I(p, 0, kappa, tau, k);
    worst = std::max(worst, std::abs(m.value[0] - q) / (1.0 + std::abs(q)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("counter generator: moments and purity") {
  const CounterRng r(123);
  double s = 0, s2 = 0, su = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(7, i);
    s += z;
    s2 += z * z;
    const double u = r.uniform(8, i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(r.normal(7, 5) == CounterRng(123).normal(7, 5));
  CHECK(r.normal(7, -5) != r.normal(7, 5));
  CHECK(CounterRng::derive(1, 0) != CounterRng::derive(1, 1));
}
