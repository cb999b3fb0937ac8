#include "opm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "opm/error.hpp"

namespace opm {

using nlohmann::json;

std::string study_name(Study s) { return s == Study::Sace ? "sace" : "jump"; }

ExperimentConfig default_config(Study s) {
  ExperimentConfig c;
  c.study = s;
  if (s == Study::Jump) {
    c.training = {1, 10.0, 400.0, 0.01, 2.0};
    c.ensemble.paths = 1000;
    c.ensemble.horizon_time = 2000.0;
    c.ensemble.acf_max_lag = 0;
    c.simulate.horizon_time = 400.0;
    c.simulate.stride_steps = 100;
    c.output_dir = "run-jump";
  } else {
    c.output_dir = "run-sace";
  }
  return c;
}

namespace {

// Walks one object, recording the keys it consumed; leftovers are errors.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) const { return j_.contains(k); }

  template <class T>
  void get(const std::string& k, T& out) {
    seen_.insert(k);
    if (!j_.contains(k)) return;
    const json& v = j_.at(k);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(field(k), "expected a boolean");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(field(k), "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_unsigned() || v.get<long long>() >= 0)
            out = v.get<T>();
          else
            throw ConfigError(field(k), "expected a non-negative integer");
        } else {
          out = v.get<T>();
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(field(k), "expected a number");
        out = v.get<T>();
        if (!std::isfinite(out)) throw ConfigError(field(k), "must be finite");
      } else {
        if (!v.is_string()) throw ConfigError(field(k), "expected a string");
        out = v.get<T>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(field(k), e.what());
    }
  }

  const json* child(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) ? &j_.at(k) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(field(k), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

bool multiple_of(double T, double dt) {
  const double n = T / dt;
  return std::abs(n - std::round(n)) < 1e-9 * std::max(1.0, n);
}

void read_sace(const json& j, SaceParams& p) {
  Reader r(j, "sace");
  r.get("domain_length_space", p.length);
  r.get("resolved_modes", p.q);
  r.get("forced_modes_max", p.n_forced);
  r.get("noise_amplitude", p.sigma);
  r.get("dt_time", p.dt);
  r.get("grid_intervals", p.grid_intervals);
  r.get("spectral_modes", p.n_modes);
  r.finish();
  require(p.length > 0, "sace.domain_length_space", "must be positive");
  require(p.q >= 1, "sace.resolved_modes", "must be at least 1");
  require(p.n_forced > p.q, "sace.forced_modes_max", "must exceed resolved_modes");
  require(p.n_modes >= p.n_forced, "sace.spectral_modes", "must be at least forced_modes_max");
  require(p.sigma >= 0, "sace.noise_amplitude", "must be non-negative");
  require(p.dt > 0, "sace.dt_time", "must be positive");
  require(p.grid_intervals >= 2 * p.n_modes, "sace.grid_intervals", "must be at least 2 * spectral_modes");
}

void read_jump(const json& j, JumpParams& p) {
  Reader r(j, "jump");
  std::string cadence = p.cadence == ZetaCadence::PerBlock ? "block" : "step";
  r.get("domain_length_space", p.length);
  r.get("lambda", p.lambda);
  r.get("eps", p.eps);
  r.get("noise_amplitude", p.sigma);
  r.get("firing_rate", p.firing_rate);
  r.get("block_time", p.block);
  r.get("dt_time", p.dt);
  r.get("grid_intervals", p.grid_intervals);
  r.get("spectral_modes", p.n_modes);
  r.get("cheb_points", p.cheb_points);
  r.get("galerkin_modes", p.galerkin_modes);
  r.get("zeta_cadence", cadence);
  r.finish();
  require(cadence == "block" || cadence == "step", "jump.zeta_cadence", "expected \"block\" or \"step\"");
  p.cadence = cadence == "block" ? ZetaCadence::PerBlock : ZetaCadence::PerStep;
  require(p.length > 0, "jump.domain_length_space", "must be positive");
  require(p.lambda > 0, "jump.lambda", "must be positive");
  require(p.eps > 0, "jump.eps", "must be positive");
  require(p.firing_rate >= 0 && p.firing_rate <= 1, "jump.firing_rate", "must lie in [0, 1]");
  require(p.dt > 0, "jump.dt_time", "must be positive");
  require(p.block >= p.dt && multiple_of(p.block, p.dt), "jump.block_time", "must be a positive multiple of dt_time");
  require(p.n_modes >= 5, "jump.spectral_modes", "must be at least 5");
  require(p.cheb_points >= 32 && p.n_modes <= p.cheb_points / 2, "jump.cheb_points",
          "must be >= 32 and >= 2 * spectral_modes");
  require(p.grid_intervals >= 2 * p.n_modes, "jump.grid_intervals", "must be at least 2 * spectral_modes");
  require(p.galerkin_modes >= 1, "jump.galerkin_modes", "must be positive");
}

void read_training(const json& j, TrainingConfig& t) {
  Reader r(j, "training");
  r.get("seed", t.seed);
  r.get("window_start_time", t.window_start_time);
  r.get("window_end_time", t.window_end_time);
  r.get("tau_step_time", t.tau_step_time);
  r.get("tau_max_time", t.tau_max_time);
  r.finish();
  require(t.window_start_time >= 0, "training.window_start_time", "must be non-negative");
  require(t.window_end_time > t.window_start_time, "training.window_end_time", "must exceed window_start_time");
  require(t.tau_step_time > 0, "training.tau_step_time", "must be positive");
  require(t.tau_max_time >= t.tau_step_time, "training.tau_max_time", "must be at least tau_step_time");
}

void read_ensemble(const json& j, EnsembleConfig& e) {
  Reader r(j, "ensemble");
  r.get("paths", e.paths);
  r.get("base_seed", e.base_seed);
  r.get("horizon_time", e.horizon_time);
  r.get("workers", e.workers);
  r.get("rare_threshold", e.rare_threshold);
  r.get("histogram_bins", e.histogram_bins);
  r.get("acf_max_lag", e.acf_max_lag);
  r.get("acf_stride_steps", e.acf_stride_steps);
  r.get("acf_start_time", e.acf_start_time);
  r.get("sample_stride_steps", e.sample_stride_steps);
  r.get("sample_start_time", e.sample_start_time);
  r.get("zeroed_memory", e.zeroed_memory);
  r.finish();
  require(e.paths >= 1, "ensemble.paths", "must be positive");
  require(e.horizon_time > 0, "ensemble.horizon_time", "must be positive");
  require(e.workers >= 1, "ensemble.workers", "must be positive");
  require(e.rare_threshold > 0, "ensemble.rare_threshold", "must be positive");
  require(e.histogram_bins >= 0, "ensemble.histogram_bins", "must be non-negative");
  require(e.acf_max_lag >= 0, "ensemble.acf_max_lag", "must be non-negative");
  require(e.acf_stride_steps >= 1, "ensemble.acf_stride_steps", "must be positive");
  require(e.sample_stride_steps >= 1, "ensemble.sample_stride_steps", "must be positive");
}

void read_bifurcation(const json& j, BifurcationConfig& b) {
  Reader r(j, "bifurcation");
  r.get("lambda_start", b.lambda_start);
  r.get("lambda_end", b.lambda_end);
  r.get("lambda_step", b.lambda_step);
  r.get("multistart", b.multistart);
  r.get("eps_compare", b.eps_compare);
  r.get("lambda_end_compare", b.lambda_end_compare);
  r.finish();
  require(b.lambda_step > 0, "bifurcation.lambda_step", "must be positive");
  require(b.lambda_end > b.lambda_start, "bifurcation.lambda_end", "must exceed lambda_start");
  require(b.multistart >= 1, "bifurcation.multistart", "must be positive");
}

void read_simulate(const json& j, SimulateConfig& s) {
  Reader r(j, "simulate");
  r.get("seed", s.seed);
  r.get("horizon_time", s.horizon_time);
  r.get("stride_steps", s.stride_steps);
  r.finish();
  require(s.horizon_time > 0, "simulate.horizon_time", "must be positive");
  require(s.stride_steps >= 1, "simulate.stride_steps", "must be positive");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  Reader r(doc, "");
  if (!doc.contains("study")) throw ConfigError("study", "missing required field");
  std::string study;
  r.get("study", study);
  if (study != "sace" && study != "jump") throw ConfigError("study", "expected \"sace\" or \"jump\"");
  ExperimentConfig c = default_config(study == "sace" ? Study::Sace : Study::Jump);
  if (auto* j = r.child("sace")) read_sace(*j, c.sace);
  if (auto* j = r.child("jump")) read_jump(*j, c.jump);
  if (auto* j = r.child("training")) read_training(*j, c.training);
  if (auto* j = r.child("ensemble")) read_ensemble(*j, c.ensemble);
  if (auto* j = r.child("bifurcation")) read_bifurcation(*j, c.bifurcation);
  if (auto* j = r.child("simulate")) read_simulate(*j, c.simulate);
  std::string approx = c.ou_approximation ? "ou" : "full";
  r.get("approximation", approx);
  if (approx != "ou" && approx != "full") throw ConfigError("approximation", "expected \"ou\" or \"full\"");
  c.ou_approximation = approx == "ou";
  r.get("output_dir", c.output_dir);
  r.finish();
  const double dt = c.study == Study::Sace ? c.sace.dt : c.jump.dt;
  require(multiple_of(c.ensemble.horizon_time, dt), "ensemble.horizon_time", "must be a multiple of dt_time");
  require(multiple_of(c.simulate.horizon_time, dt), "simulate.horizon_time", "must be a multiple of dt_time");
  require(multiple_of(c.training.window_end_time, dt), "training.window_end_time", "must be a multiple of dt_time");
  if (c.study == Study::Jump)
    require(c.training.window_start_time >= c.training.tau_max_time, "training.window_start_time",
            "must be at least tau_max_time for the jump study");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["study"] = study_name(c.study);
  const auto& s = c.sace;
  j["sace"] = {{"domain_length_space", s.length}, {"resolved_modes", s.q},       {"forced_modes_max", s.n_forced},
               {"noise_amplitude", s.sigma},      {"dt_time", s.dt},             {"grid_intervals", s.grid_intervals},
               {"spectral_modes", s.n_modes}};
  const auto& p = c.jump;
  j["jump"] = {{"domain_length_space", p.length},
               {"lambda", p.lambda},
               {"eps", p.eps},
               {"noise_amplitude", p.sigma},
               {"firing_rate", p.firing_rate},
               {"block_time", p.block},
               {"dt_time", p.dt},
               {"grid_intervals", p.grid_intervals},
               {"spectral_modes", p.n_modes},
               {"cheb_points", p.cheb_points},
               {"galerkin_modes", p.galerkin_modes},
               {"zeta_cadence", p.cadence == ZetaCadence::PerBlock ? "block" : "step"}};
  const auto& t = c.training;
  j["training"] = {{"seed", t.seed},
                   {"window_start_time", t.window_start_time},
                   {"window_end_time", t.window_end_time},
                   {"tau_step_time", t.tau_step_time},
                   {"tau_max_time", t.tau_max_time}};
  const auto& e = c.ensemble;
  j["ensemble"] = {{"paths", e.paths},
                   {"base_seed", e.base_seed},
                   {"horizon_time", e.horizon_time},
                   {"workers", e.workers},
                   {"rare_threshold", e.rare_threshold},
                   {"histogram_bins", e.histogram_bins},
                   {"acf_max_lag", e.acf_max_lag},
                   {"acf_stride_steps", e.acf_stride_steps},
                   {"acf_start_time", e.acf_start_time},
                   {"sample_stride_steps", e.sample_stride_steps},
                   {"sample_start_time", e.sample_start_time},
                   {"zeroed_memory", e.zeroed_memory}};
  const auto& b = c.bifurcation;
  j["bifurcation"] = {{"lambda_start", b.lambda_start}, {"lambda_end", b.lambda_end},
                      {"lambda_step", b.lambda_step},   {"multistart", b.multistart},
                      {"eps_compare", b.eps_compare},   {"lambda_end_compare", b.lambda_end_compare}};
  j["simulate"] = {{"seed", c.simulate.seed},
                   {"horizon_time", c.simulate.horizon_time},
                   {"stride_steps", c.simulate.stride_steps}};
  j["approximation"] = c.ou_approximation ? "ou" : "full";
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace opm
