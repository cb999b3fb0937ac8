#include <cmath>

#include "doctest.h"
#include "opm/experiments.hpp"
#include "opm/parameterization.hpp"

using namespace opm;

TEST_CASE("coeff_balance: closed form, zero rate and the small-argument branch") {
  CHECK(coeff_balance(0.0, 3.0) == 0.0);
  CHECK(coeff_balance(2.0, 0.0) == 2.0);
  CHECK(coeff_balance(1.5, 0.7) == doctest::Approx((1.0 - std::exp(-0.7 * 1.5)) / 0.7).epsilon(1e-15));
  CHECK(coeff_balance(1.5, -0.7) == doctest::Approx((1.0 - std::exp(0.7 * 1.5)) / -0.7).epsilon(1e-15));
  // continuity across the Taylor switch
  const double tau = 1.0;
  for (double d : {5e-9, 2e-8, -5e-9, -2e-8})
    CHECK(coeff_balance(tau, d) == doctest::Approx(tau - d * tau * tau / 2.0).epsilon(1e-15));
  CHECK(coeff_D(1.0, 0.5, 0.25, -1.0) == coeff_balance(1.0, 1.75));
  CHECK(coeff_E(1.0, 0.5, 0.25, 0.125, -1.0) == coeff_balance(1.0, 1.875));
}

namespace {

SaceModel sace() { return SaceModel(SaceParams{}); }

}  // namespace

TEST_CASE("sACE spec: slots, tau update and the long-tau limit") {
  const SaceModel m = sace();
  ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 0.0));
  CHECK(s.size() == 4);
  CHECK(s.q() == 4);
  CHECK(s.total() == 8);
  CHECK(s.slot_of(5) == 1);
  CHECK(s.slot_of(2) == -1);
  CHECK_FALSE(s.has_quad());
  VectorXd X(4);
  X << 0.3, -0.2, 0.5, 0.1;
  CHECK(s.polynomial(1, X) == 0.0);

  // tau -> infinity: sum C X X X / delta with delta = l_i + l_j + l_k - l_n
  s.set_tau(1, 200.0);
  const VectorXd& ev = m.basis().eigenvalues();
  const InteractionTensors& T = s.tensors();
  const int n = 5;
  double ref = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        ref += T.cubic(n, i, j, k) * X[i] * X[j] * X[k] / (ev[i] + ev[j] + ev[k] - ev[n]);
  CHECK(s.polynomial(1, X) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(markovian_opm(s, X, 1) == s.polynomial(1, X));
}

TEST_CASE("sACE spec: the cubic part is odd in X") {
  const SaceModel m = sace();
  const ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 1.3));
  VectorXd X(4);
  X << 0.3, -0.2, 0.5, 0.1;
  for (int p = 0; p < 4; ++p) CHECK(s.polynomial(p, -X) == doctest::Approx(-s.polynomial(p, X)).epsilon(1e-14));
}

TEST_CASE("Gaussian Phi agrees with the backward-forward integration") {
  const SaceModel m = sace();
  const ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 0.5));
  const BrownianPaths fine = sample_brownian(17, m.forced_modes(), m.sigma().segment(4, 4), 1e-4, -1.0, 2.0);
  const long k = 15000;
  const MemoryState mem = spec_memory(s, fine, k);
  VectorXd X(4);
  X << 0.4, 0.1, -0.3, 0.05;
  for (int p = 0; p < 4; ++p) {
    const double phi = eval_phi_gaussian(s, X, mem, fine, p);
    const double bf = integrate_bf_numeric(s, X, p, fine, k);
    CHECK(std::abs(phi - bf) / (1.0 + std::abs(bf)) < 1e-3);
  }
}

TEST_CASE("lift places y on the resolved modes and Phi on the parameterized ones") {
  const SaceModel m = sace();
  const ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 0.5));
  const BrownianPaths p = sample_brownian(3, m.forced_modes(), m.sigma().segment(4, 4), 1e-2, -1.0, 2.0);
  const MemoryState mem = spec_memory(s, p, 100);
  VectorXd y(4);
  y << 0.2, 0.0, -0.1, 0.3;
  const VectorXd u = lift(s, y, mem, &p, 12);
  CHECK(u.size() == 12);
  CHECK(u.head(4) == y);
  for (int q = 0; q < 4; ++q) CHECK(u[4 + q] == eval_phi_gaussian(s, y, mem, p, q));
  CHECK(u.tail(4).norm() == 0.0);
  CHECK_THROWS_AS(lift(s, y, mem, nullptr, 12), std::invalid_argument);
}

TEST_CASE("nonresonance: the sACE setting is clear, a synthetic spectrum is not") {
  const SaceModel m = sace();
  const ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 0.5));
  const NonresonanceReport r = check_nonresonance(m.basis().eigenvalues().head(8), &s.tensors(), 4,
                                                  m.sigma().head(8), 3);
  CHECK(r.checked > 0);
  CHECK(r.all_clear());

  VectorXd ev(2);
  ev << -1.0, -0.5;
  const NonresonanceReport bad = check_nonresonance(ev, nullptr, 1, VectorXd::Zero(2), 2);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].n == 1);
  CHECK(bad.violations[0].value == doctest::Approx(1.5));
}

TEST_CASE("jump spec: forced modes e_3 and e_5 with the gain as sigma") {
  const JumpModel m = make_jump_model(default_config(Study::Jump));
  const ParameterizationSpec s = make_jump_spec(m, VectorXd::Constant(2, 0.3));
  CHECK(s.kind() == NoiseKind::Jump);
  CHECK(s.q() == 1);
  CHECK(s.mode(0).mode == 2);
  CHECK(s.mode(1).mode == 4);
  CHECK(s.mode(0).sigma == doctest::Approx(396.0));
  CHECK(s.has_quad());
  CHECK(s.cubic_scale() == doctest::Approx(1.32 * 0.3103 / 2.0));
  CHECK(s.mode(0).rate == m.basis().eigenvalue(2));
}

TEST_CASE("jump Phi agrees with the backward-forward integration") {
  const JumpModel m = make_jump_model(default_config(Study::Jump));
  const ParameterizationSpec s = make_jump_spec(m, VectorXd::Constant(2, 0.3));
  const JumpSignal sig = sample_jump_signal(4, 0.35, 1.0, 1e-5, -1.0, 1.0);
  const long k = 50000;
  const MemoryState mem = spec_memory(s, sig, k);
  for (int p = 0; p < 2; ++p) {
    const double phi = eval_phi_jump(s, 0.2, mem, p);
    const double bf = integrate_bf_numeric(s, VectorXd::Constant(1, 0.2), p, sig, k);
    CHECK(std::abs(phi - bf) / (1.0 + std::abs(bf)) < 1e-2);
  }
}
