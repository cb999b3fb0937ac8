#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "opm/error.hpp"
#include "opm/experiments.hpp"
#include "opm/io.hpp"
#include "opm/verification.hpp"

using namespace opm;

namespace {

struct Flags {
  std::string config;
  std::string study;
  std::string spec;
  std::string noise;
  std::string out;
  std::string tau_grid;
  std::string approx;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long paths = 0;
  int workers = 0;
};

bool given(CLI::App& sub, const std::string& name) {
  const CLI::Option* o = sub.get_option_no_throw(name);
  return o && o->count() > 0;
}

RunRequest build_request(const std::string& command, const Flags& fl, CLI::App& sub) {
  RunRequest r;
  if (!fl.config.empty()) {
    r = request_from_document(command, read_json(fl.config));
  } else {
    if (fl.study.empty()) throw ConfigError("study", "missing required field (give --config or --study)");
    nlohmann::json doc = {{"study", fl.study}};
    r = request_from_document(command, doc);
  }
  auto& c = r.config;
  if (given(sub, "--seed")) {
    if (command == "simulate" || command == "reduce") c.simulate.seed = fl.seed;
    else if (command == "train") c.training.seed = fl.seed;
    else c.ensemble.base_seed = fl.seed;
  }
  if (given(sub, "--paths")) {
    if (fl.paths < 1) throw ConfigError("--paths", "must be positive");
    c.ensemble.paths = fl.paths;
  }
  if (given(sub, "--workers")) {
    if (fl.workers < 1) throw ConfigError("--workers", "must be positive");
    c.ensemble.workers = fl.workers;
  }
  if (given(sub, "--tau-grid")) {
    const auto colon = fl.tau_grid.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("");
      c.training.tau_step_time = std::stod(fl.tau_grid.substr(0, colon));
      c.training.tau_max_time = std::stod(fl.tau_grid.substr(colon + 1));
    } catch (const std::invalid_argument&) {
      throw ConfigError("--tau-grid", "expected STEP:MAX");
    }
    if (!(c.training.tau_step_time > 0) || c.training.tau_max_time < c.training.tau_step_time)
      throw ConfigError("--tau-grid", "need 0 < STEP <= MAX");
  }
  if (given(sub, "--approx")) c.ou_approximation = fl.approx == "ou";
  if (!fl.spec.empty()) {
    auto j = read_json(fl.spec);
    r.spec = j.contains("manifest") && j.contains("spec") ? j.at("spec") : j;
  }
  if (!fl.noise.empty()) r.noise = fl.noise;
  if (!fl.out.empty()) r.out = fl.out;
  c.output_dir = r.out;
  // re-validate after overrides
  r.config = parse_config(to_json(c));
  return r;
}

std::vector<int> parse_ids(const std::string& s) {
  std::vector<int> ids;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    int v = 0;
    try {
      v = std::stoi(tok);
    } catch (const std::exception&) {
      throw ConfigError("--criteria", "expected a comma-separated list of integers");
    }
    if (v < 1 || v > 10) throw ConfigError("--criteria", "criteria are numbered 1..10");
    ids.push_back(v);
  }
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian reduced models of stochastic PDEs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags fl;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", fl.config, "Config or manifest (JSON)");
    s->add_option("--study", fl.study, "sace or jump, when no config is given")->check(CLI::IsMember({"sace", "jump"}));
    s->add_option("--out", fl.out, "Output directory");
    s->add_option("--seed", fl.seed, "Seed for the command's noise");
    s->add_option("--workers", fl.workers, "Worker threads");
  };

  auto* sim = app.add_subcommand("simulate", "Run the full model on one noise path");
  add_common(sim);
  sim->add_option("--noise", fl.noise, "Replay an exported noise.csv or signal.csv");
  auto* trn = app.add_subcommand("train", "Optimize tau on a training path");
  add_common(trn);
  trn->add_option("--tau-grid", fl.tau_grid, "STEP:MAX");
  auto* red = app.add_subcommand("reduce", "Run the reduced model on one noise path");
  add_common(red);
  red->add_option("--spec", fl.spec, "Trained spec (spec.json or a train manifest)");
  red->add_option("--noise", fl.noise, "Replay an exported noise.csv or signal.csv");
  red->add_option("--approx", fl.approx, "Jump closure: full or ou")->check(CLI::IsMember({"full", "ou"}));
  auto* ens = app.add_subcommand("ensemble", "Paired full/reduced ensembles and statistics");
  add_common(ens);
  ens->add_option("--spec", fl.spec, "Trained spec (spec.json or a train manifest)");
  ens->add_option("--paths", fl.paths, "Ensemble size");
  ens->add_option("--approx", fl.approx, "Jump closure: full or ou")->check(CLI::IsMember({"full", "ou"}));
  auto* bif = app.add_subcommand("bifurcation", "Branches of the fold system");
  add_common(bif);

  auto* ver = app.add_subcommand("verify", "Run the oracle and acceptance checks");
  std::string criteria = "1,2,3,4,5,10";
  VerifyOptions vo;
  ver->add_option("--criteria", criteria, "Comma-separated criteria (1..10)");
  ver->add_option("--paths", vo.sace_paths, "sACE ensemble size for criteria 7 and 8");
  ver->add_option("--jump-paths", vo.jump_paths, "Jump ensemble size for criterion 9");
  ver->add_option("--workers", vo.workers, "Worker threads");
  ver->add_option("--out", vo.scratch_dir, "Scratch directory for the reproducibility check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ver->parsed()) {
      if (vo.sace_paths < 1 || vo.jump_paths < 1 || vo.workers < 1)
        throw ConfigError("--paths", "sizes and workers must be positive");
      bool all = true;
      for (const auto& r : run_checks(parse_ids(criteria), vo)) {
        std::cout << format_line(r) << std::endl;
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const RunRequest r = build_request(name, fl, *sub);
    if (name == "simulate") cmd_simulate(r);
    else if (name == "train") cmd_train(r);
    else if (name == "reduce") cmd_reduce(r);
    else if (name == "ensemble") cmd_ensemble(r);
    else cmd_bifurcation(r);
    std::cout << "wrote " << r.out << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
