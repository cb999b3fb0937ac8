#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "opm/spde.hpp"

namespace opm {

enum class Study { Sace, Jump };

struct TrainingConfig {
  std::uint64_t seed = 1;
  double window_start_time = 10.0;
  double window_end_time = 40.0;
  double tau_step_time = 0.01;
  double tau_max_time = 10.0;
};

struct EnsembleConfig {
  long paths = 10000;
  std::uint64_t base_seed = 20240601;
  double horizon_time = 40.0;
  int workers = 1;
  double rare_threshold = 0.5;
  int histogram_bins = 0;  // 0: Freedman-Diaconis
  int acf_max_lag = 100;
  int acf_stride_steps = 10;
  double acf_start_time = 10.0;
  int sample_stride_steps = 100;
  double sample_start_time = 10.0;
  bool zeroed_memory = false;
};

struct BifurcationConfig {
  double lambda_start = 1.0;
  double lambda_end = 2.0;
  double lambda_step = 1e-3;
  int multistart = 200;
  double eps_compare = 0.35;
  double lambda_end_compare = 3.0;
};

struct SimulateConfig {
  std::uint64_t seed = 1;
  double horizon_time = 40.0;
  int stride_steps = 10;
};

struct ExperimentConfig {
  Study study = Study::Sace;
  SaceParams sace;
  JumpParams jump;
  TrainingConfig training;
  EnsembleConfig ensemble;
  BifurcationConfig bifurcation;
  SimulateConfig simulate;
  bool ou_approximation = true;
  std::string output_dir = "run";
};

// Defaults for a study: sACE (L = 3.9 pi, q = 4, N = 8, sigma = 0.2) or the
// jump-driven fold system.
ExperimentConfig default_config(Study s);

// Reads a document over the study defaults. "study" is required; unknown
// keys and malformed values raise ConfigError with the field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

std::string study_name(Study s);

}  // namespace opm
