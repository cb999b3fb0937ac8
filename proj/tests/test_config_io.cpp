#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "opm/config.hpp"
#include "opm/error.hpp"
#include "opm/experiments.hpp"
#include "opm/io.hpp"

using namespace opm;
using nlohmann::json;

namespace {

std::string field_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string scratch(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("opm-test-" + name);
  std::filesystem::remove_all(d);
  return d.string();
}

}  // namespace

TEST_CASE("study defaults") {
  const ExperimentConfig s = parse_config(json{{"study", "sace"}});
  CHECK(s.study == Study::Sace);
  CHECK(s.sace.q == 4);
  CHECK(s.sace.n_forced == 8);
  CHECK(s.sace.sigma == 0.2);
  CHECK(s.ensemble.paths == 10000);
  const ExperimentConfig j = parse_config(json{{"study", "jump"}});
  CHECK(j.jump.lambda == 1.32);
  CHECK(j.jump.eps == doctest::Approx(0.15515));
  CHECK(j.jump.firing_rate == 0.35);
  CHECK(j.ensemble.paths == 1000);
  CHECK(j.ou_approximation);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of(json::object()) == "study");
  CHECK(field_of(json{{"study", "heat"}}) == "study");
  CHECK(field_of(json{{"study", "sace"}, {"sace", {{"dt_tme", 0.1}}}}) == "sace.dt_tme");
  CHECK(field_of(json{{"study", "sace"}, {"sace", {{"dt_time", "fast"}}}}) == "sace.dt_time");
  CHECK(field_of(json{{"study", "sace"}, {"sace", {{"dt_time", -1.0}}}}) == "sace.dt_time");
  CHECK(field_of(json{{"study", "jump"}, {"jump", {{"zeta_cadence", "hourly"}}}}) == "jump.zeta_cadence");
  CHECK(field_of(json{{"study", "jump"}, {"approximation", "exact"}}) == "approximation");
  CHECK(field_of(json{{"study", "jump"}, {"extra", 1}}) == "extra");
}

TEST_CASE("config survives a JSON round trip") {
  json doc = {{"study", "jump"},
              {"jump", {{"lambda", 1.3}, {"zeta_cadence", "step"}}},
              {"ensemble", {{"paths", 12}, {"base_seed", 99}}},
              {"approximation", "full"}};
  const ExperimentConfig a = parse_config(doc);
  const ExperimentConfig b = parse_config(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(b.jump.lambda == 1.3);
  CHECK(b.jump.cadence == ZetaCadence::PerStep);
  CHECK(b.ensemble.paths == 12);
  CHECK(b.ensemble.base_seed == 99);
  CHECK_FALSE(b.ou_approximation);
}

TEST_CASE("load_config reports unreadable files as config errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
  const std::string d = scratch("badjson");
  ensure_dir(d);
  write_text(d + "/c.json", "{ not json");
  CHECK_THROWS_AS(load_config(d + "/c.json"), ConfigError);
}

TEST_CASE("fmt round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) CHECK(std::stod(fmt(v)) == v);
}

TEST_CASE("trained spec survives JSON") {
  const SaceModel m{SaceParams{}};
  ParameterizationSpec s = make_sace_spec(m, VectorXd::Constant(4, 0.0));
  s.set_tau(0, 0.37);
  s.set_tau(3, 10.0);
  s.set_asymptotic(3, true);
  const ParameterizationSpec r = spec_from_json(spec_to_json(s), make_sace_spec(m, VectorXd::Zero(4)));
  for (int p = 0; p < 4; ++p) {
    CHECK(r.mode(p).tau == s.mode(p).tau);
    CHECK(r.mode(p).asymptotic == s.mode(p).asymptotic);
  }
  VectorXd X(4);
  X << 0.1, 0.2, -0.3, 0.4;
  CHECK(r.polynomial(0, X) == s.polynomial(0, X));

  json bad = spec_to_json(s);
  bad["kind"] = "jump";
  CHECK_THROWS(spec_from_json(bad, make_sace_spec(m, VectorXd::Zero(4))));
  bad = spec_to_json(s);
  bad["modes"][1]["rate"] = 0.5;
  CHECK_THROWS(spec_from_json(bad, make_sace_spec(m, VectorXd::Zero(4))));
}

TEST_CASE("a manifest reproduces its run") {
  RunRequest r;
  r.command = "simulate";
  r.config = parse_config(json{{"study", "sace"}, {"simulate", {{"horizon_time", 1.0}, {"stride_steps", 5}}}});
  r.out = scratch("manifest-a");
  cmd_simulate(r);
  const json m = read_json(r.out + "/manifest.json");
  CHECK(m["command"] == "simulate");
  CHECK(m["version"] == kVersion);

  RunRequest again = request_from_document("simulate", m);
  CHECK(again.out == r.out);
  again.out = scratch("manifest-b");
  cmd_simulate(again);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(r.out + "/trajectory.csv") == slurp(again.out + "/trajectory.csv"));
  CHECK_FALSE(slurp(r.out + "/trajectory.csv").empty());
}

TEST_CASE("ensemble and reduce need a trained spec") {
  RunRequest r;
  r.command = "reduce";
  r.config = parse_config(json{{"study", "sace"}});
  r.out = scratch("nospec");
  CHECK_THROWS_AS(cmd_reduce(r), ConfigError);
  r.command = "ensemble";
  CHECK_THROWS_AS(cmd_ensemble(r), ConfigError);
}

TEST_CASE("noise and jump signal CSVs replay bit-exactly") {
  const std::string d = scratch("noise");
  ensure_dir(d);
  const BrownianPaths p = sample_brownian(5, {4, 5}, VectorXd::Constant(2, 0.2), 1e-2, -0.5, 1.0);
  write_noise_csv(d + "/noise.csv", p);
  const BrownianPaths q = read_noise_csv(d + "/noise.csv", {4, 5}, VectorXd::Constant(2, 0.2), 1e-2);
  CHECK(q.k_min == p.k_min);
  CHECK(q.k_max == p.k_max);
  CHECK(q.W == p.W);
  CHECK_THROWS_AS(read_noise_csv(d + "/noise.csv", {4, 6}, VectorXd::Constant(2, 0.2), 1e-2), ConfigError);
  CHECK_THROWS_AS(read_noise_csv(d + "/noise.csv", {4, 5}, VectorXd::Constant(2, 0.2), 2e-2), ConfigError);

  const JumpSignal s = sample_jump_signal(3, 0.35, 1.0, 1e-2, 0.0, 5.0);
  write_signal_csv(d + "/signal.csv", s);
  const JumpSignal r = read_signal_csv(d + "/signal.csv", 0.35, 1.0, 1e-2);
  CHECK(r.f == s.f);
  CHECK(r.zeta == s.zeta);
}

TEST_CASE("simulate then reduce on an exported path matches the seeded run") {
  const ExperimentConfig c = parse_config(json{{"study", "sace"},
                                               {"simulate", {{"horizon_time", 2.0}}},
                                               {"training", {{"tau_max_time", 1.0}}}});
  RunRequest sim{"simulate", c, std::nullopt, scratch("sim"), std::nullopt};
  cmd_simulate(sim);
  const SaceModel m{c.sace};
  ParameterizationSpec spec = make_sace_spec(m, VectorXd::Constant(4, 0.5));
  const json sj = spec_to_json(spec);
  RunRequest a{"reduce", c, sj, scratch("red-seeded"), std::nullopt};
  RunRequest b{"reduce", c, sj, scratch("red-replay"), sim.out + "/noise.csv"};
  cmd_reduce(a);
  cmd_reduce(b);
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(a.out + "/reduced.csv") == slurp(b.out + "/reduced.csv"));
  CHECK(read_json(b.out + "/manifest.json")["noise"] == sim.out + "/noise.csv");
}
