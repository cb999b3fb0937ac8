#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "opm/bifurcation.hpp"
#include "opm/config.hpp"
#include "opm/error.hpp"
#include "opm/experiments.hpp"
#include "opm/spde.hpp"

using namespace opm;

TEST_CASE("sACE noise sits on modes q+1..N only") {
  SaceModel m(SaceParams{});
  const VectorXd& s = m.sigma();
  for (int n = 0; n < s.size(); ++n) {
    if (n >= 4 && n < 8)
      CHECK(s[n] == 0.2);
    else
      CHECK(s[n] == 0.0);
  }
  CHECK(m.forced_modes() == std::vector<int>{4, 5, 6, 7});
  // three unstable modes for L = 3.9 pi, the forced ones are damped
  const VectorXd& ev = m.basis().eigenvalues();
  CHECK(ev[2] > 0.0);
  CHECK(ev[3] < 0.0);
  CHECK(ev[4] < 0.0);
}

TEST_CASE("sACE step rejects forcing on a resolved mode") {
  SaceModel m(SaceParams{});
  VectorXd u = VectorXd::Zero(m.basis().size());
  VectorXd dW = VectorXd::Zero(u.size());
  dW[1] = 0.1;
  CHECK_THROWS_AS(m.step(u, dW), std::invalid_argument);
}

TEST_CASE("sACE without noise: zero is fixed, small data saturate below 1") {
  SaceModel m(SaceParams{});
  const int n = m.basis().size();
  VectorXd dW = VectorXd::Zero(n);
  CHECK(m.step(VectorXd::Zero(n), dW).norm() == 0.0);
  VectorXd u = VectorXd::Zero(n);
  u[0] = 0.05;
  for (int k = 0; k < 4000; ++k) u = m.step(u, dW);
  const VectorXd g = m.basis().reconstruct(u);
  CHECK(g.cwiseAbs().maxCoeff() < 1.0);
  CHECK(g.cwiseAbs().maxCoeff() > 0.5);
  // parity: an odd-mode start never excites the even modes
  for (int j = 1; j < n; j += 2) CHECK(std::abs(u[j]) < 1e-12);
}

TEST_CASE("integrate_sace is a pure function of the seed") {
  SaceModel m(SaceParams{});
  const auto fm = m.forced_modes();
  const BrownianPaths p = sample_brownian(42, fm, VectorXd::Constant(4, 0.2), 1e-2, 0.0, 2.0);
  const VectorXd u0 = VectorXd::Zero(m.basis().size());
  const Trajectory a = integrate_sace(m, u0, p, 2.0, 10);
  const Trajectory b = integrate_sace(m, u0, p, 2.0, 10);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.size() == 21);
  CHECK(a.times[20] == doctest::Approx(2.0));
  // noise leaks into the resolved modes only through the nonlinearity
  CHECK(a.coeffs.row(20).tail(m.basis().size() - 4).norm() > 0.0);
}

TEST_CASE("integrate_sace reports blow-up as NumericalError") {
  SaceModel m(SaceParams{});
  const BrownianPaths p = sample_brownian(1, m.forced_modes(), VectorXd::Constant(4, 0.2), 1e-2, 0.0, 1.0);
  VectorXd u0 = VectorXd::Zero(m.basis().size());
  u0[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate_sace(m, u0, p, 1.0, 1), NumericalError);
}

TEST_CASE("integrate_sace checks grid compatibility") {
  SaceModel m(SaceParams{});
  const BrownianPaths p = sample_brownian(1, m.forced_modes(), VectorXd::Constant(4, 0.2), 2e-2, 0.0, 1.0);
  CHECK_THROWS_AS(integrate_sace(m, VectorXd::Zero(m.basis().size()), p, 1.0, 1), std::invalid_argument);
}

TEST_CASE("jump model: U* is steady and the forced directions satisfy the spectral gap") {
  const ExperimentConfig c = default_config(Study::Jump);
  const JumpModel m = make_jump_model(c);
  const VectorXd& ev = m.basis().eigenvalues();
  // exactly one unstable direction at the middle state
  CHECK(ev[0] > 0.0);
  CHECK(ev[1] < 0.0);
  CHECK(ev[2] < 0.0);
  CHECK(ev[4] < ev[2]);
  CHECK(galerkin_residual(m.ustar_coeffs(), c.jump.lambda, c.jump.eps, c.jump.galerkin_modes).norm() < 1e-9);
  const int n = m.basis().size();
  CHECK(m.step(VectorXd::Zero(n), 0.0).norm() == 0.0);
  CHECK(m.gain() == doctest::Approx(396.0));
}

TEST_CASE("jump model: impulses enter through e_3 and e_5 only") {
  const JumpModel m = make_jump_model(default_config(Study::Jump));
  const int n = m.basis().size();
  const VectorXd v = m.step(VectorXd::Zero(n), 0.5);
  for (int j = 0; j < n; ++j) {
    if (j == 2 || j == 4)
      CHECK(std::abs(v[j]) > 0.0);
    else
      CHECK(v[j] == 0.0);
  }
}

TEST_CASE("integrate_jump is deterministic and honors t0") {
  const JumpModel m = make_jump_model(default_config(Study::Jump));
  const JumpSignal s = sample_jump_signal(5, 0.35, 1.0, 1e-2, 0.0, 30.0);
  VectorXd v0 = VectorXd::Zero(m.basis().size());
  v0[0] = 0.1;
  const Trajectory a = integrate_jump(m, v0, s, 15.0, 100, 5.0);
  const Trajectory b = integrate_jump(m, v0, s, 15.0, 100, 5.0);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.times[0] == doctest::Approx(5.0));
  CHECK(a.times[a.size() - 1] == doctest::Approx(15.0));
  CHECK_THROWS_AS(integrate_jump(m, v0, s, 40.0, 100, 0.0), std::invalid_argument);
}

TEST_CASE("sine_series matches the basis normalization") {
  VectorXd a = VectorXd::Zero(3);
  a[1] = 1.0;
  const double L = 2.0;
  CHECK(sine_series(a, L, 0.5) == doctest::Approx(std::sqrt(2.0 / L) * std::sin(2 * std::numbers::pi * 0.5 / L)));
}
