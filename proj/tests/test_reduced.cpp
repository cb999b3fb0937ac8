#include <cmath>

#include "doctest.h"
#include "opm/experiments.hpp"
#include "opm/reduced.hpp"

using namespace opm;

TEST_CASE("sACE closure: pseudo-spectral and tensor forms agree") {
  const SaceModel m{SaceParams{}};
  const SaceClosure c(m, make_sace_spec(m, VectorXd::Constant(4, 0.7)));
  VectorXd y(4), phi(4);
  y << 0.5, -0.3, 0.2, 0.1;
  phi << 0.05, -0.02, 0.01, 0.03;
  const VectorXd a = c.nonlinear(y, phi);
  const VectorXd b = c.nonlinear_expanded(y, phi);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sACE closure degenerates to the Galerkin truncation when Phi vanishes") {
  const SaceModel m{SaceParams{}};
  const SaceClosure c(m, make_sace_spec(m, VectorXd::Zero(4)));
  VectorXd y(4);
  y << 0.5, -0.3, 0.2, 0.1;
  CHECK((c.rhs(y, VectorXd::Zero(4)) - c.galerkin_rhs(y)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sACE closure is odd under u -> -u") {
  const SaceModel m{SaceParams{}};
  const SaceClosure c(m, make_sace_spec(m, VectorXd::Constant(4, 0.7)));
  VectorXd y(4), phi(4);
  y << 0.5, -0.3, 0.2, 0.1;
  phi << 0.05, -0.02, 0.01, 0.03;
  CHECK((c.rhs(-y, -phi) + c.rhs(y, phi)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("run_reduced_sace: layout and determinism") {
  const SaceModel m{SaceParams{}};
  const SaceClosure c(m, make_sace_spec(m, VectorXd::Constant(4, 0.7)));
  const BrownianPaths p = sace_paths(m, 9, 3.0, 0.7);
  const Trajectory a = run_reduced_sace(c, p, VectorXd::Zero(4), 3.0, 10);
  const Trajectory b = run_reduced_sace(c, p, VectorXd::Zero(4), 3.0, 10);
  CHECK(a.coeffs.cols() == 8);
  CHECK(a.size() == 31);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.coeffs.row(30).head(4).norm() > 0.0);
}

namespace {

struct JumpFixture {
  JumpModel model = make_jump_model(default_config(Study::Jump));
  ParameterizationSpec spec = make_jump_spec(model, VectorXd::Constant(2, 0.3));
};

}  // namespace

TEST_CASE("jump closure: OU polynomial is cubic with the right low-order terms") {
  JumpFixture f;
  const JumpClosure c(f.model, f.spec, true);
  CHECK(c.degree() == 3);
  CHECK(c.coefficient(1, 0, 0) == doctest::Approx(f.model.basis().eigenvalue(0)).epsilon(1e-12));
  // even part in y by symmetric differences of the grid evaluation
  const VectorXd J0 = VectorXd::Zero(2);
  const double h = 0.1;
  const double c2 = (c.rhs_quadrature(h, J0) + c.rhs_quadrature(-h, J0)) / (2 * h * h);
  CHECK(c.coefficient(2, 0, 0) == doctest::Approx(c2).epsilon(1e-10));
  // y J3 by a mixed difference
  auto g = [&](double y, double j3) {
    VectorXd J(2);
    J << j3, 0.0;
    return c.rhs_quadrature(y, J);
  };
  const double mixed = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h);
  CHECK(c.coefficient(1, 1, 0) == doctest::Approx(mixed).epsilon(1e-9));
  CHECK(c.coefficient(0, 0, 0) == 0.0);
}

TEST_CASE("jump closure: polynomial matches grid quadrature") {
  JumpFixture f;
  for (bool ou : {true, false}) {
    const JumpClosure c(f.model, f.spec, ou);
    CHECK(c.degree() == (ou ? 3 : 9));
    for (double y : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
      VectorXd J(2);
      J << 0.4 * y + 0.1, -0.2;
      const double a = c.rhs(y, J), b = c.rhs_quadrature(y, J);
      CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("run_reduced_jump starts at t0 with memory of the past") {
  JumpFixture f;
  const JumpClosure c(f.model, f.spec, true);
  const double t0 = jump_start_time(f.spec);
  CHECK(t0 == doctest::Approx(0.3));
  const JumpSignal s = sample_jump_signal(2, 0.35, 1.0, 1e-2, 0.0, 20.0);
  const Trajectory tr = run_reduced_jump(c, s, 0.1, t0, 10.3, 100);
  CHECK(tr.times[0] == doctest::Approx(t0));
  CHECK(tr.times[tr.size() - 1] == doctest::Approx(10.3));
  CHECK(tr.coeffs.cols() == 3);
  CHECK(tr.coeffs(0, 0) == 0.1);
}
