#include "doctest.h"
#include "opm/defect.hpp"
#include "opm/experiments.hpp"

using namespace opm;

TEST_CASE("normalized_defect: exact fit and trivial fit") {
  VectorXd u(4);
  u << 1.0, -2.0, 0.5, 3.0;
  CHECK(normalized_defect(u, u) == 0.0);
  CHECK(normalized_defect(u, VectorXd::Zero(4)) == doctest::Approx(1.0));
  CHECK(normalized_defect(u, 2.0 * u) == doctest::Approx(1.0));
}

TEST_CASE("select_minimum: ties go to the smallest tau, asymptotic flag at the end") {
  DefectCurve c;
  c.tau = tau_grid(0.5, 2.0);
  REQUIRE(c.tau.size() == 5);
  c.normalized.resize(5);
  c.normalized << 0.9, 0.4, 0.4 + 1e-14, 0.6, 0.8;
  select_minimum(c);
  CHECK(c.argmin == 1);
  CHECK(c.tau_star == 0.5);
  CHECK_FALSE(c.asymptotic);
  CHECK(c.improvement == doctest::Approx(0.5));

  c.normalized << 0.9, 0.8, 0.7, 0.6, 0.5;
  select_minimum(c);
  CHECK(c.asymptotic);
  CHECK(c.improvement == 0.0);
}

TEST_CASE("tau_grid includes zero and the end point") {
  const VectorXd g = tau_grid(0.01, 10.0);
  CHECK(g.size() == 1001);
  CHECK(g[0] == 0.0);
  CHECK(g[1000] == doctest::Approx(10.0));
  CHECK_THROWS_AS(tau_grid(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("short sACE training: curves on the grid, spec updated, reproducible") {
  const SaceModel m{SaceParams{}};
  const DefectWindow w{2.0, 6.0};
  const VectorXd grid = tau_grid(0.25, 2.0);
  const TrainingResult a = train_sace(m, 3, w, grid);
  const TrainingResult b = train_sace(m, 3, w, grid);
  REQUIRE(a.curves.size() == 4);
  for (int p = 0; p < 4; ++p) {
    const DefectCurve& c = a.curves[p];
    CHECK(c.mode == 4 + p);
    CHECK(c.normalized.size() == grid.size());
    CHECK(c.normalized.minCoeff() >= 0.0);
    // tau = 0 leaves Phi = 0, so the normalized defect is 1 there
    CHECK(c.normalized[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.spec.mode(p).tau == c.tau_star);
    CHECK(c.normalized == b.curves[p].normalized);
  }
}

TEST_CASE("short jump training keeps tau on the grid") {
  const JumpModel m = make_jump_model(default_config(Study::Jump));
  const VectorXd grid = tau_grid(0.05, 0.5);
  const TrainingResult r = train_jump(m, 1, DefectWindow{10.0, 60.0}, grid);
  REQUIRE(r.curves.size() == 2);
  for (int p = 0; p < 2; ++p) {
    CHECK(r.curves[p].normalized[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.curves[p].tau_star > 0.0);
    CHECK(r.curves[p].tau_star <= 0.5);
    CHECK(r.spec.mode(p).tau == r.curves[p].tau_star);
  }
}
