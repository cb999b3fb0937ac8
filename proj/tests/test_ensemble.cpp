#include <cmath>
#include <random>

#include "doctest.h"
#include "opm/ensemble.hpp"
#include "opm/rng.hpp"

using namespace opm;

TEST_CASE("histogram densities integrate to one") {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  std::vector<double> x(5000);
  for (double& v : x) v = n(g);
  const VectorXd e = uniform_edges(-5.0, 5.0, 40);
  const Histogram h = histogram(x, e);
  const VectorXd w = e.tail(40) - e.head(40);
  CHECK((h.values().array() * w.array()).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.total() == 5000);
  CHECK(h.centers()[0] == doctest::Approx(-4.875));
}

TEST_CASE("L1 distance: zero for identical samples, two for disjoint supports") {
  std::vector<double> a{0.1, 0.2, 0.3, 0.35}, b{5.1, 5.2, 5.3, 5.4};
  CHECK(pdf_and_distance(a, a, 4).l1 == doctest::Approx(0.0));
  CHECK(pdf_and_distance(a, b, uniform_edges(0.0, 6.0, 12)).l1 == doctest::Approx(2.0));
}

TEST_CASE("Freedman-Diaconis edges cover the pooled samples") {
  std::vector<double> a{0.0, 1.0, 2.0, 3.0, 4.0}, b{-1.0, 0.5, 6.0};
  const VectorXd e = freedman_diaconis_edges(a, b);
  CHECK(e[0] <= -1.0);
  CHECK(e[e.size() - 1] >= 6.0);
  for (int i = 1; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
}

TEST_CASE("Wilson interval") {
  const Interval w = wilson_interval(10, 100, 1.959963984540054);
  CHECK(w.lo == doctest::Approx(0.05522).epsilon(1e-3));
  CHECK(w.hi == doctest::Approx(0.17436).epsilon(1e-3));
  const Interval z = wilson_interval(0, 50);
  CHECK(z.lo == 0.0);
  CHECK(z.hi > 0.0);
}

TEST_CASE("compensated sum recovers small terms") {
  std::vector<double> x{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(x.data(), 4) == 2.0);
}

TEST_CASE("acf: lag zero is one and white noise stays in the band") {
  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  VectorXd s(20000);
  for (int i = 0; i < s.size(); ++i) s[i] = n(g);
  const VectorXd r = acf(s, 20);
  CHECK(r[0] == doctest::Approx(1.0));
  for (int l = 1; l <= 20; ++l) CHECK(std::abs(r[l]) < 4.0 / std::sqrt(20000.0));
}

TEST_CASE("acf of an AR(1) series decays geometrically") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n;
  VectorXd s(200000);
  s[0] = 0.0;
  for (int i = 1; i < s.size(); ++i) s[i] = 0.8 * s[i - 1] + n(g);
  const VectorXd r = acf(s, 3);
  CHECK(r[1] == doctest::Approx(0.8).epsilon(0.02));
  CHECK(r[3] == doctest::Approx(0.512).epsilon(0.04));
}

TEST_CASE("profile statistics of identical rows have zero spread") {
  MatrixXd f(3, 5);
  f.row(0) << 1, 2, 3, 4, 5;
  f.row(1) = f.row(0);
  f.row(2) << 9, 9, 9, 9, 9;
  const ProfileStats s = profile_stats(f, {1, 1, 0});
  CHECK(s.count == 2);
  CHECK(s.std.norm() == 0.0);
  CHECK(s.mean == f.row(0).transpose());
}

TEST_CASE("min+max metric and classification") {
  VectorXd g(5);
  g << 0.0, 0.9, 0.3, -0.9, 0.0;
  CHECK(minmax_metric(g) == doctest::Approx(0.0));
  CHECK(minmax_metric(VectorXd(-g)) == doctest::Approx(0.0));
  g << 0.0, 0.9, 0.3, 0.6, 0.0;
  CHECK(minmax_metric(g) == doctest::Approx(0.9));
  CHECK(classify(0.9) == MetricClass::Rare);
  CHECK(classify(-0.6) == MetricClass::Rare);
  CHECK(classify(0.4) == MetricClass::Typical);
}

TEST_CASE("trimodality detects three separated clusters") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n(0.0, 0.05);
  std::vector<double> x;
  for (int i = 0; i < 2000; ++i) x.push_back(n(g));
  for (int i = 0; i < 300; ++i) x.push_back(1.0 + n(g));
  for (int i = 0; i < 300; ++i) x.push_back(-1.0 + n(g));
  CHECK(trimodality(x).trimodal());
  std::vector<double> one(x.begin(), x.begin() + 2000);
  CHECK_FALSE(trimodality(one).trimodal());
}

TEST_CASE("bimodality finds both peaks and the outer mass excludes them") {
  std::mt19937_64 g(6);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back((i % 2 ? 1.0 : 4.0) + n(g));
  const Bimodality b = bimodality(histogram(x, uniform_edges(-1.0, 6.0, 70)));
  CHECK(b.bimodal);
  CHECK(b.peak_lo == doctest::Approx(1.0).epsilon(0.05));
  CHECK(b.peak_hi == doctest::Approx(4.0).epsilon(0.05));
  CHECK(b.dip < 0.5);
  // [1 - 0.75, 4 + 0.75] holds all but about 0.6% of the mass
  CHECK(outer_mass(x, 1.0, 4.0) < 0.01);
  std::vector<double> uni;
  for (int i = 0; i < 20000; ++i) uni.push_back(2.0 + n(g));
  CHECK_FALSE(bimodality(histogram(uni, uniform_edges(-1.0, 6.0, 70))).bimodal);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hit(1000, 0);
  parallel_for(1000, 3, [&](long i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 2, [](long i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const SaceModel m{SaceParams{}};
  EnsembleOptions o;
  o.n_paths = 6;
  o.T = 2.0;
  o.workers = 1;
  const EnsembleResult a = run_sace_full(m, o, 0.0);
  o.workers = 3;
  const EnsembleResult b = run_sace_full(m, o, 0.0);
  CHECK(a.terminal == b.terminal);
  CHECK(a.seeds == b.seeds);
  CHECK(a.seeds[2] == path_seed(o.base_seed, 2));
  CHECK(a.seeds[1] != a.seeds[2]);
}
