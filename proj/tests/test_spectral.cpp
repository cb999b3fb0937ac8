#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opm/spde.hpp"
#include "opm/spectral.hpp"

using namespace opm;

TEST_CASE("sine basis eigenvalues") {
  const double L = 3.9 * std::numbers::pi;
  const EigenBasis b = build_sine_basis(L, 8, 201);
  for (int j = 1; j <= 8; ++j) CHECK(b.eigenvalue(j - 1) == doctest::Approx(1.0 - j * j / (3.9 * 3.9)).epsilon(1e-14));
  // modes 1..3 unstable, 4 onwards stable
  CHECK(b.eigenvalue(2) > 0);
  CHECK(b.eigenvalue(3) < 0);
}

TEST_CASE("sine basis is orthonormal under the trapezoid rule") {
  const EigenBasis b = build_sine_basis(3.9 * std::numbers::pi, 32, 201);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j)
      CHECK(b.inner(b.mode(i).transpose(), b.mode(j).transpose()) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("project inverts reconstruct") {
  const EigenBasis b = build_sine_basis(2.0, 16, 257);
  VectorXd c = VectorXd::LinSpaced(16, -1.0, 1.0);
  const VectorXd back = b.project(b.reconstruct(c));
  CHECK((back - c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cubic tensor is fully symmetric and matches direct quadrature") {
  const EigenBasis b = build_sine_basis(3.9 * std::numbers::pi, 8, 201);
  const InteractionTensors t = interaction_tensors(b, VectorXd(), 4, 8);
  CHECK(t.cubic(4, 0, 1, 2) == doctest::Approx(t.cubic(2, 4, 0, 1)));
  CHECK(t.cubic(4, 0, 1, 2) == doctest::Approx(t.cubic(1, 2, 0, 4)));
  const VectorXd prod = b.mode(0).transpose().cwiseProduct(b.mode(0).transpose()).cwiseProduct(b.mode(2).transpose());
  CHECK(t.cubic(4, 0, 0, 2) == doctest::Approx(-b.inner(prod, b.mode(4).transpose())).epsilon(1e-12));
  // parity: odd total index sum integrates to zero on sine modes
  CHECK(std::abs(t.cubic(0, 0, 0, 1)) < 1e-12);
  // no weight -> no quadratic terms
  CHECK(t.quad(4, 0, 0) == 0.0);
}

TEST_CASE("interaction tensors reject bad ranges") {
  const EigenBasis b = build_sine_basis(2.0, 8, 64);
  CHECK_THROWS_AS(interaction_tensors(b, VectorXd(), 4, 9), std::invalid_argument);
  CHECK_THROWS_AS(interaction_tensors(b, VectorXd::Ones(3), 4, 8), std::invalid_argument);
}

TEST_CASE("Ginzburg-Landau energy of zero and of a single mode") {
  const double L = 3.9 * std::numbers::pi;
  auto b = std::make_shared<const EigenBasis>(build_sine_basis(L, 8, 2000));
  VectorXd c = VectorXd::Zero(8);
  CHECK(gl_energy(SpectralField(b, c, 4)) == doctest::Approx(L / 4.0).epsilon(1e-12));
  // small amplitude: E ~ L/4 - (1 - k^2) a^2 / 2
  c[0] = 1e-3;
  const double k2 = std::pow(std::numbers::pi / L, 2);
  CHECK(gl_energy(SpectralField(b, c, 4)) - L / 4.0 == doctest::Approx(-(1.0 - k2) * 1e-6 / 2.0).epsilon(1e-3));
}

TEST_CASE("linearized basis: Chebyshev spectrum converged and modes orthonormal") {
  JumpParams p;
  auto ustar = [](double x) { return 2.0 * std::sin(std::numbers::pi * x / 2.0); };
  LinearizedBasisOptions o;
  o.length = 2.0;
  o.lambda = p.lambda;
  o.eps = p.eps;
  o.cheb_points = 48;
  o.n_modes = 6;
  o.grid_intervals = 257;
  const VectorXd s48 = linearized_spectrum(ustar, o);
  o.cheb_points = 64;
  const VectorXd s64 = linearized_spectrum(ustar, o);
  CHECK((s48.head(6) - s64.head(6)).cwiseAbs().maxCoeff() < 1e-8);
  // eigenvalues decreasing
  for (int i = 1; i < 6; ++i) CHECK(s64[i] < s64[i - 1]);
  const EigenBasis b = build_linearized_basis(ustar, o);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(b.inner(b.mode(i).transpose(), b.mode(j).transpose()) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("linearized basis with U* = 0 reduces to the Dirichlet sine problem") {
  LinearizedBasisOptions o;
  o.length = 2.0;
  o.lambda = 1.0;
  o.eps = 0.1;
  o.cheb_points = 48;
  o.n_modes = 4;
  const VectorXd s = linearized_spectrum([](double) { return 0.0; }, o);
  for (int j = 1; j <= 4; ++j) CHECK(s[j - 1] == doctest::Approx(-j * j * std::numbers::pi * std::numbers::pi / 4.0).epsilon(1e-9));
}
