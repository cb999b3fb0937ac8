#include <cmath>

#include "doctest.h"
#include "opm/bifurcation.hpp"
#include "opm/spde.hpp"

using namespace opm;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  VectorXd x, w;
  gauss_legendre(6, 0.0, 2.0, x, w);
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double s = 0;
  for (int i = 0; i < 6; ++i) s += w[i] * std::pow(x[i], 11);
  CHECK(s == doctest::Approx(std::pow(2.0, 12) / 12.0).epsilon(1e-13));
}

TEST_CASE("Galerkin residual: zero data gives minus the forcing projection") {
  // R_n(0) = -lambda <1, e_n>, <1, e_n> = sqrt(2/L) L (1 - (-1)^n) / (n pi)
  const double lambda = 1.2, L = 2.0;
  const VectorXd r = galerkin_residual(VectorXd::Zero(4), lambda, 0.1, 4, L);
  for (int n = 1; n <= 4; ++n) {
    const double proj = std::sqrt(2.0 / L) * L * (1.0 - std::pow(-1.0, n)) / (n * std::numbers::pi);
    CHECK(r[n - 1] == doctest::Approx(-lambda * proj).epsilon(1e-12));
  }
}

TEST_CASE("Newton solves the fold problem and the Jacobian matches differences") {
  const SineGalerkin p = fold_problem(2.0, 1.0, kEpsStar / 2.0, 6);
  const NewtonResult r = newton_solve(p, VectorXd::Zero(6));
  REQUIRE(r.converged);
  CHECK(p.residual(r.a).norm() < 1e-10);
  // the lower branch is stable
  CHECK(classify(p, 1.0, r.a).stable);
  // steady states are symmetric about the midpoint: even sine modes vanish
  CHECK(std::abs(r.a[1]) < 1e-10);
  CHECK(std::abs(r.a[3]) < 1e-10);
}

TEST_CASE("three steady states at lambda = 1.32 with alternating stability") {
  const double eps = kEpsStar / 2.0;
  const FoldSteadyStates s = fold_steady_states(2.0, 1.32, eps, 6);
  REQUIRE(s.solutions.size() == 3);
  const SineGalerkin p = fold_problem(2.0, 1.32, eps, 6);
  CHECK(classify(p, 1.32, s.solutions[0]).stable);
  CHECK_FALSE(classify(p, 1.32, s.solutions[1]).stable);
  CHECK(classify(p, 1.32, s.solutions[2]).stable);
  CHECK(s.solutions[0][0] < s.solutions[1][0]);
  CHECK(s.solutions[1][0] < s.solutions[2][0]);
}

TEST_CASE("continuation of the lower branch turns near lambda = 1.33") {
  ContinuationOptions o;
  o.step = 5e-3;
  o.lambda_end = 2.0;
  const SineGalerkin p = fold_problem(2.0, 1.0, kEpsStar / 2.0, 6);
  const NewtonResult r0 = newton_solve(p, VectorXd::Zero(6));
  const Branch b = continue_branch(kEpsStar / 2.0, 6, 2.0, 1.0, r0.a, o);
  CHECK(b.turned);
  CHECK(b.fold_lambda == doctest::Approx(1.331).epsilon(0.005));
}

TEST_CASE("no fold at eps = 0.35 up to lambda = 3") {
  ContinuationOptions o;
  o.step = 1e-2;
  o.lambda_end = 3.0;
  const SineGalerkin p = fold_problem(2.0, 1.0, 0.35, 6);
  const NewtonResult r0 = newton_solve(p, VectorXd::Zero(6));
  const Branch b = continue_branch(0.35, 6, 2.0, 1.0, r0.a, o);
  CHECK_FALSE(b.turned);
  CHECK(b.points.back().lambda == doctest::Approx(3.0));
}

TEST_CASE("Allen-Cahn steady states on L = 3.9 pi") {
  const auto states = allen_cahn_steady_states(3.9 * std::numbers::pi, 16);
  REQUIRE(states.size() >= 3);
  for (const auto& s : states) {
    CHECK(s.residual < 1e-9);
    if (s.a.norm() > 1e-8) CHECK(s.fractions.sum() == doctest::Approx(1.0));
  }
}
