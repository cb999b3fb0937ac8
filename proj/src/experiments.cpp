#include "opm/experiments.hpp"

#include <cmath>
#include <iostream>

#include "opm/bifurcation.hpp"
#include "opm/error.hpp"
#include "opm/io.hpp"

namespace opm {

using nlohmann::json;

const char* const kVersion = "1.0.0";

SaceModel make_sace_model(const ExperimentConfig& c) { return SaceModel(c.sace); }

JumpModel make_jump_model(const ExperimentConfig& c) {
  const JumpParams& p = c.jump;
  const auto st = fold_steady_states(p.length, p.lambda, p.eps, p.galerkin_modes, c.bifurcation.multistart);
  if (st.solutions.size() != 3)
    throw NumericalError("jump model: expected three steady states at lambda = " + fmt(p.lambda) + ", found " +
                         std::to_string(st.solutions.size()));
  return JumpModel(p, st.solutions[1]);
}

VectorXd config_tau_grid(const ExperimentConfig& c) {
  return tau_grid(c.training.tau_step_time, c.training.tau_max_time);
}

TrainingResult train(const ExperimentConfig& c, const SaceModel& model) {
  return train_sace(model, c.training.seed, {c.training.window_start_time, c.training.window_end_time},
                    config_tau_grid(c));
}

TrainingResult train(const ExperimentConfig& c, const JumpModel& model) {
  return train_jump(model, c.training.seed, {c.training.window_start_time, c.training.window_end_time},
                    config_tau_grid(c));
}

EnsembleOptions ensemble_options(const ExperimentConfig& c) {
  EnsembleOptions o;
  o.n_paths = c.ensemble.paths;
  o.base_seed = c.ensemble.base_seed;
  o.T = c.ensemble.horizon_time;
  o.workers = c.ensemble.workers;
  o.acf_max_lag = c.ensemble.acf_max_lag;
  o.acf_stride = c.ensemble.acf_stride_steps;
  o.acf_start = c.ensemble.acf_start_time;
  return o;
}

namespace {

double sup_rel(const ProfileStats& a, const ProfileStats& b) {
  if (a.count == 0 || b.count == 0) return std::numeric_limits<double>::infinity();
  const double amp = a.mean.cwiseAbs().maxCoeff();
  return amp > 0 ? (a.mean - b.mean).cwiseAbs().maxCoeff() / amp : std::numeric_limits<double>::infinity();
}

}  // namespace

SaceComparison compare_sace(const EnsembleResult& full, const EnsembleResult& reduced, const EigenBasis& basis,
                            const EnsembleConfig& e) {
  SaceComparison s;
  const auto mf = ok_metrics(full), mr = ok_metrics(reduced);
  if (mf.empty() || mr.empty()) throw NumericalError("ensemble: no finished paths to compare");
  s.n_full = static_cast<long>(mf.size());
  s.n_reduced = static_cast<long>(mr.size());
  s.failed_full = full.size() - s.n_full;
  s.failed_reduced = reduced.size() - s.n_reduced;
  for (double m : mf) s.rare_full += classify(m, e.rare_threshold) == MetricClass::Rare;
  for (double m : mr) s.rare_reduced += classify(m, e.rare_threshold) == MetricClass::Rare;
  s.wilson_full = wilson_interval(s.rare_full, s.n_full);
  s.wilson_reduced = wilson_interval(s.rare_reduced, s.n_reduced);
  s.tri_full = trimodality(mf);
  s.tri_reduced = trimodality(mr);
  s.metric_pdf = pdf_and_distance(mf, mr, e.histogram_bins);
  s.prof_full = class_profiles(basis, full.terminal, full.metric, e.rare_threshold);
  s.prof_reduced = class_profiles(basis, reduced.terminal, reduced.metric, e.rare_threshold);
  s.profile_typical = sup_rel(s.prof_full.typical, s.prof_reduced.typical);
  s.profile_rare = sup_rel(s.prof_full.rare, s.prof_reduced.rare);
  return s;
}

JumpComparison compare_jump(const EnsembleResult& full, const EnsembleResult& reduced, int bins) {
  JumpComparison j;
  j.failed_full = static_cast<long>(full.failures.size());
  j.failed_reduced = static_cast<long>(reduced.failures.size());
  const auto a = pooled(full), b = pooled(reduced);
  j.pdf = pdf_and_distance(a, b, bins);
  j.full = bimodality(j.pdf.a);
  j.reduced = bimodality(j.pdf.b);
  if (j.full.bimodal && j.reduced.bimodal) {
    j.peak_err_lo = std::abs(j.reduced.peak_lo - j.full.peak_lo) / std::abs(j.full.peak_lo);
    j.peak_err_hi = std::abs(j.reduced.peak_hi - j.full.peak_hi) / std::abs(j.full.peak_hi);
  }
  if (j.full.bimodal) {
    j.outer_full = outer_mass(a, j.full.peak_lo, j.full.peak_hi);
    j.outer_reduced = outer_mass(b, j.full.peak_lo, j.full.peak_hi);
  }
  return j;
}

json manifest(const RunRequest& r, const std::vector<std::string>& outputs) {
  json m;
  m["manifest"] = 1;
  m["tool"] = "opmreduce";
  m["version"] = kVersion;
  m["command"] = r.command;
  json cfg = to_json(r.config);
  cfg["output_dir"] = r.out;
  m["config"] = cfg;
  if (r.spec) m["spec"] = *r.spec;
  if (r.noise) m["noise"] = *r.noise;
  m["rng"] = "counter-based SplitMix64 finalizer, keyed by (seed, stream, counter)";
  m["outputs"] = outputs;
  return m;
}

RunRequest request_from_document(const std::string& command, const json& doc) {
  RunRequest r;
  r.command = command;
  if (doc.is_object() && doc.contains("manifest")) {
    if (!doc.contains("config")) throw ConfigError("config", "manifest without a config section");
    r.config = parse_config(doc.at("config"));
    if (doc.contains("spec")) r.spec = doc.at("spec");
    if (doc.contains("noise")) r.noise = doc.at("noise").get<std::string>();
  } else {
    r.config = parse_config(doc);
  }
  r.out = r.config.output_dir;
  return r;
}

namespace {

std::string path_in(const RunRequest& r, const std::string& name) { return r.out + "/" + name; }

void finish(const RunRequest& r, std::vector<std::string> outputs) {
  outputs.push_back("manifest.json");
  write_json(path_in(r, "manifest.json"), manifest(r, outputs));
}

const json& need_spec(const RunRequest& r) {
  if (!r.spec) throw ConfigError("--spec", "a trained spec is required for reduced runs");
  return *r.spec;
}

BrownianPaths run_paths(const RunRequest& r, const SaceModel& model, double tau_max) {
  if (!r.noise) return sace_paths(model, r.config.simulate.seed, r.config.simulate.horizon_time, tau_max);
  const auto modes = model.forced_modes();
  VectorXd sig(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) sig[static_cast<Eigen::Index>(i)] = model.sigma()[modes[i]];
  return read_noise_csv(*r.noise, modes, sig, model.params().dt);
}

JumpSignal run_signal(const RunRequest& r, const JumpModel& model) {
  if (!r.noise) return jump_signal(model, r.config.simulate.seed, r.config.simulate.horizon_time);
  const auto& p = model.params();
  return read_signal_csv(*r.noise, p.firing_rate, p.block, p.dt);
}

}  // namespace

void cmd_simulate(const RunRequest& r) {
  ensure_dir(r.out);
  const auto& c = r.config;
  if (c.study == Study::Sace) {
    const SaceModel model = make_sace_model(c);
    // pre-history long enough for a reduce run on the same noise
    const BrownianPaths paths = run_paths(r, model, c.training.tau_max_time);
    const Trajectory tr = integrate_sace(model, VectorXd::Zero(model.basis().size()), paths,
                                         c.simulate.horizon_time, c.simulate.stride_steps);
    write_trajectory_csv(path_in(r, "trajectory.csv"), tr);
    write_field_csv(path_in(r, "field.csv"), model.basis(), tr);
    write_basis_csv(path_in(r, "basis.csv"), model.basis());
    write_noise_csv(path_in(r, "noise.csv"), paths);
    finish(r, {"trajectory.csv", "field.csv", "basis.csv", "noise.csv"});
  } else {
    const JumpModel model = make_jump_model(c);
    const JumpSignal sig = run_signal(r, model);
    const Trajectory tr =
        integrate_jump(model, jump_initial_state(model), sig, c.simulate.horizon_time, c.simulate.stride_steps);
    write_trajectory_csv(path_in(r, "trajectory.csv"), tr);
    write_field_csv(path_in(r, "field.csv"), model.basis(), tr);
    write_basis_csv(path_in(r, "basis.csv"), model.basis());
    write_signal_csv(path_in(r, "signal.csv"), sig);
    finish(r, {"trajectory.csv", "field.csv", "basis.csv", "signal.csv"});
  }
}

void cmd_train(const RunRequest& r) {
  ensure_dir(r.out);
  const auto& c = r.config;
  const TrainingResult t = c.study == Study::Sace ? train(c, make_sace_model(c)) : train(c, make_jump_model(c));
  json spec = spec_to_json(t.spec);
  spec["training"] = {{"seed", c.training.seed},
                      {"window_start_time", c.training.window_start_time},
                      {"window_end_time", c.training.window_end_time},
                      {"tau_step_time", c.training.tau_step_time},
                      {"tau_max_time", c.training.tau_max_time}};
  json curves = json::array();
  for (const auto& cv : t.curves)
    curves.push_back({{"mode", cv.mode + 1},
                      {"tau_star_time", cv.tau_star},
                      {"q_min", cv.normalized[cv.argmin]},
                      {"q_at_tau_max", cv.normalized[cv.normalized.size() - 1]},
                      {"improvement", cv.improvement},
                      {"asymptotic", cv.asymptotic}});
  spec["curves"] = curves;
  write_json(path_in(r, "spec.json"), spec);
  write_defect_csv(path_in(r, "defect.csv"), t.curves);
  write_tensors_csv(path_in(r, "tensors.csv"), t.spec.tensors());
  RunRequest m = r;
  m.spec = spec;
  finish(m, {"spec.json", "defect.csv", "tensors.csv"});
}

void cmd_reduce(const RunRequest& r) {
  ensure_dir(r.out);
  const auto& c = r.config;
  if (c.study == Study::Sace) {
    const SaceModel model = make_sace_model(c);
    const SaceClosure cl(model, spec_from_json(need_spec(r), make_sace_spec(model, VectorXd::Zero(c.sace.n_forced - c.sace.q))));
    double tau_max = 0.0;
    for (const auto& m : cl.spec().modes()) tau_max = std::max(tau_max, m.tau);
    const BrownianPaths paths = run_paths(r, model, tau_max);
    const Trajectory tr = run_reduced_sace(cl, paths, VectorXd::Zero(cl.q()), c.simulate.horizon_time,
                                           c.simulate.stride_steps, c.ensemble.zeroed_memory);
    write_trajectory_csv(path_in(r, "reduced.csv"), tr);
  } else {
    const JumpModel model = make_jump_model(c);
    const JumpClosure cl(model,
                         spec_from_json(need_spec(r), make_jump_spec(model, VectorXd::Zero(static_cast<Eigen::Index>(
                                                                                c.jump.forced.size())))),
                         c.ou_approximation);
    const JumpSignal sig = run_signal(r, model);
    const double t0 = jump_start_time(cl.spec());
    const VectorXd v0 = jump_initial_state(model);
    double y0 = v0[0];
    if (t0 > 0) {
      const Trajectory head = integrate_jump(model, v0, sig, t0, 1);
      y0 = head.coeffs(head.size() - 1, 0);
    }
    const Trajectory tr = run_reduced_jump(cl, sig, y0, t0, c.simulate.horizon_time, c.simulate.stride_steps);
    write_trajectory_csv(path_in(r, "reduced.csv"), tr,
                         {"a1", "a" + std::to_string(cl.spec().mode(0).mode + 1),
                          "a" + std::to_string(cl.spec().mode(1).mode + 1)});
  }
  finish(r, {"reduced.csv"});
}

namespace {

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json trimodality_json(const Trimodality& t) {
  return {{"trimodal", t.trimodal()}, {"central_peak", t.central_peak}, {"left_peak", t.left_peak},
          {"right_peak", t.right_peak}, {"gap_max", t.gap_max}};
}

json bimodality_json(const Bimodality& b) {
  return {{"bimodal", b.bimodal}, {"peak_lo", b.peak_lo}, {"peak_hi", b.peak_hi}, {"dip", b.dip}};
}

json failures_json(const EnsembleResult& r) {
  json a = json::array();
  for (const auto& f : r.failures) a.push_back({{"path", f.index}, {"seed", f.seed}, {"error", f.what}});
  return a;
}

}  // namespace

void cmd_ensemble(const RunRequest& r) {
  ensure_dir(r.out);
  const auto& c = r.config;
  const EnsembleOptions o = ensemble_options(c);
  json summary;
  std::vector<std::string> outputs;
  if (c.study == Study::Sace) {
    const SaceModel model = make_sace_model(c);
    const SaceClosure cl(model, spec_from_json(need_spec(r), make_sace_spec(model, VectorXd::Zero(c.sace.n_forced - c.sace.q))));
    double tau_max = 0.0;
    for (const auto& m : cl.spec().modes()) tau_max = std::max(tau_max, m.tau);
    const EnsembleResult full = run_sace_full(model, o, tau_max);
    const EnsembleResult red = run_sace_reduced(cl, model, o, c.ensemble.zeroed_memory);
    std::cerr << "ensemble: full " << full.elapsed_s << " s, reduced " << red.elapsed_s << " s\n";
    const SaceComparison s = compare_sace(full, red, model.basis(), c.ensemble);
    write_seeds_csv(path_in(r, "seeds.csv"), full.seeds, red.seeds);
    write_pdf_csv(path_in(r, "metric_pdf.csv"), s.metric_pdf, "full", "reduced");
    write_profiles_csv(path_in(r, "profiles.csv"), model.basis().grid().x, s.prof_full, s.prof_reduced);
    write_terminal_csv(path_in(r, "terminal_full.csv"), full);
    write_terminal_csv(path_in(r, "terminal_reduced.csv"), red);
    outputs = {"seeds.csv", "metric_pdf.csv", "profiles.csv", "terminal_full.csv", "terminal_reduced.csv"};
    if (o.acf_max_lag > 0) {
      write_acf_csv(path_in(r, "acf.csv"), acf_summary(full), acf_summary(red), o.acf_stride * c.sace.dt);
      outputs.push_back("acf.csv");
    }
    summary = {{"paths", o.n_paths},
               {"finished_full", s.n_full},
               {"finished_reduced", s.n_reduced},
               {"rare_threshold", c.ensemble.rare_threshold},
               {"rare_fraction_full", static_cast<double>(s.rare_full) / s.n_full},
               {"rare_fraction_reduced", static_cast<double>(s.rare_reduced) / s.n_reduced},
               {"rare_wilson99_full", interval_json(s.wilson_full)},
               {"rare_wilson99_reduced", interval_json(s.wilson_reduced)},
               {"typical_fraction_full", 1.0 - static_cast<double>(s.rare_full) / s.n_full},
               {"typical_fraction_reduced", 1.0 - static_cast<double>(s.rare_reduced) / s.n_reduced},
               {"metric_l1_distance", s.metric_pdf.l1},
               {"metric_bins", s.metric_pdf.a.counts.size()},
               {"trimodality_full", trimodality_json(s.tri_full)},
               {"trimodality_reduced", trimodality_json(s.tri_reduced)},
               {"profile_sup_rel_typical", s.profile_typical},
               {"profile_sup_rel_rare", s.profile_rare},
               {"failures_full", failures_json(full)},
               {"failures_reduced", failures_json(red)}};
  } else {
    const JumpModel model = make_jump_model(c);
    const JumpClosure cl(model,
                         spec_from_json(need_spec(r), make_jump_spec(model, VectorXd::Zero(static_cast<Eigen::Index>(
                                                                                c.jump.forced.size())))),
                         c.ou_approximation);
    const JumpSampling smp{c.ensemble.sample_stride_steps, c.ensemble.sample_start_time};
    const EnsembleResult full = run_jump_full(model, o, smp);
    const EnsembleResult red = run_jump_reduced(cl, model, o, smp);
    std::cerr << "ensemble: full " << full.elapsed_s << " s, reduced " << red.elapsed_s << " s\n";
    const JumpComparison j = compare_jump(full, red, c.ensemble.histogram_bins);
    write_seeds_csv(path_in(r, "seeds.csv"), full.seeds, red.seeds);
    write_pdf_csv(path_in(r, "y1_pdf.csv"), j.pdf, "full", "reduced");
    outputs = {"seeds.csv", "y1_pdf.csv"};
    summary = {{"paths", o.n_paths},
               {"approximation", c.ou_approximation ? "ou" : "full"},
               {"t0_time", jump_start_time(cl.spec())},
               {"pdf_l1_distance", j.pdf.l1},
               {"pdf_bins", j.pdf.a.counts.size()},
               {"bimodality_full", bimodality_json(j.full)},
               {"bimodality_reduced", bimodality_json(j.reduced)},
               {"peak_rel_error", json::array({j.peak_err_lo, j.peak_err_hi})},
               {"outer_mass_full", j.outer_full},
               {"outer_mass_reduced", j.outer_reduced},
               {"failures_full", failures_json(full)},
               {"failures_reduced", failures_json(red)}};
  }
  write_json(path_in(r, "summary.json"), summary);
  outputs.push_back("summary.json");
  finish(r, outputs);
}

void cmd_bifurcation(const RunRequest& r) {
  ensure_dir(r.out);
  const auto& c = r.config;
  const auto& b = c.bifurcation;
  ContinuationOptions opts;
  opts.step = b.lambda_step;
  opts.lambda_end = b.lambda_end;
  const BifurcationDiagram d = bifurcation_diagram(c.jump.length, c.jump.eps, c.jump.galerkin_modes, opts, b.lambda_start);
  ContinuationOptions cmp = opts;
  cmp.lambda_end = b.lambda_end_compare;
  const auto start = fold_steady_states(c.jump.length, b.lambda_start, b.eps_compare, c.jump.galerkin_modes, b.multistart);
  if (start.solutions.empty()) throw NumericalError("bifurcation: no steady state at lambda_start for eps_compare");
  const Branch other = continue_branch(b.eps_compare, c.jump.galerkin_modes, c.jump.length, b.lambda_start,
                                       start.solutions.front(), cmp);
  write_branch_csv(path_in(r, "branches.csv"), {{"lower", &d.lower},
                                                {"middle", &d.middle_down},
                                                {"upper_down", &d.upper_down},
                                                {"upper_up", &d.upper_up}});
  write_branch_csv(path_in(r, "branch_eps_compare.csv"), {{"lower", &other}});
  const auto st = fold_steady_states(c.jump.length, c.jump.lambda, c.jump.eps, c.jump.galerkin_modes, b.multistart);
  json states = json::array();
  for (const auto& a : st.solutions) {
    const BranchPoint p = classify(fold_problem(c.jump.length, c.jump.lambda, c.jump.eps, c.jump.galerkin_modes),
                                   c.jump.lambda, a);
    std::vector<double> coeffs(a.data(), a.data() + a.size());
    states.push_back({{"a", coeffs}, {"stable", p.stable}, {"residual", p.residual}});
  }
  json summary = {{"eps", c.jump.eps},
                  {"fold_lower_lambda", d.fold_lower},
                  {"seed_lambda", d.seed_lambda},
                  {"multiplicity_at_seed", d.multiplicity_at_seed},
                  {"lambda", c.jump.lambda},
                  {"steady_states", states},
                  {"eps_compare", b.eps_compare},
                  {"eps_compare_turned", other.turned},
                  {"eps_compare_last_lambda", other.points.empty() ? 0.0 : other.points.back().lambda},
                  {"eps_compare_stop", other.stop_reason}};
  write_json(path_in(r, "summary.json"), summary);
  finish(r, {"branches.csv", "branch_eps_compare.csv", "summary.json"});
}

}  // namespace opm
