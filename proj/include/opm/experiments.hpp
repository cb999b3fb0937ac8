#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "opm/config.hpp"
#include "opm/defect.hpp"
#include "opm/ensemble.hpp"
#include "opm/reduced.hpp"

namespace opm {

SaceModel make_sace_model(const ExperimentConfig& c);
// Builds the fluctuation model around the middle steady state at the
// configured lambda. Throws NumericalError when the three states are not found.
JumpModel make_jump_model(const ExperimentConfig& c);

VectorXd config_tau_grid(const ExperimentConfig& c);
TrainingResult train(const ExperimentConfig& c, const SaceModel& model);
TrainingResult train(const ExperimentConfig& c, const JumpModel& model);

EnsembleOptions ensemble_options(const ExperimentConfig& c);

struct SaceComparison {
  long n_full = 0, n_reduced = 0;  // finished paths
  long rare_full = 0, rare_reduced = 0;
  long failed_full = 0, failed_reduced = 0;
  Interval wilson_full, wilson_reduced;
  Trimodality tri_full, tri_reduced;
  PdfComparison metric_pdf;
  ClassProfiles prof_full, prof_reduced;
  // sup_x |mean_full - mean_reduced| / sup_x |mean_full|, per class
  double profile_typical = 0.0, profile_rare = 0.0;
};
SaceComparison compare_sace(const EnsembleResult& full, const EnsembleResult& reduced, const EigenBasis& basis,
                            const EnsembleConfig& e);

struct JumpComparison {
  PdfComparison pdf;
  Bimodality full, reduced;
  double peak_err_lo = 0.0, peak_err_hi = 0.0;  // relative
  double outer_full = 0.0, outer_reduced = 0.0;
  long failed_full = 0, failed_reduced = 0;
};
// PDFs on common bins (0: Freedman-Diaconis).
JumpComparison compare_jump(const EnsembleResult& full, const EnsembleResult& reduced, int bins = 0);

// Output pipelines. Each writes its files and a manifest.json into `out`;
// running the same command with the manifest as config reproduces them.
struct RunRequest {
  std::string command;
  ExperimentConfig config;
  std::optional<nlohmann::json> spec;  // trained spec for reduce/ensemble
  std::string out;
  std::optional<std::string> noise;  // exported noise.csv / signal.csv to replay (simulate, reduce)
};

nlohmann::json manifest(const RunRequest& r, const std::vector<std::string>& outputs);
// A config document may be a plain config or a manifest emitted by a run.
RunRequest request_from_document(const std::string& command, const nlohmann::json& doc);

void cmd_simulate(const RunRequest& r);
void cmd_train(const RunRequest& r);
void cmd_reduce(const RunRequest& r);
void cmd_ensemble(const RunRequest& r);
void cmd_bifurcation(const RunRequest& r);

extern const char* const kVersion;

}  // namespace opm
