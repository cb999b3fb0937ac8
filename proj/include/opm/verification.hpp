#pragma once

#include <string>
#include <vector>

#include "opm/experiments.hpp"

namespace opm {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  long sace_paths = 10000;
  long jump_paths = 1000;
  double jump_horizon_time = 2000.0;  // 2e5 steps at dt = 1e-2
  int defect_seeds = 12;
  int workers = 1;
  std::string scratch_dir = "verify-scratch";
};

// Least-squares slope of log(err) against log(dt).
double loglog_slope(const std::vector<double>& dt, const std::vector<double>& err);

CheckResult check_linearized_spectrum();
CheckResult check_bifurcation();
CheckResult check_energy_fractions();
CheckResult check_memory_oracle();
CheckResult check_phi_oracle();
CheckResult check_defect_structure(const VerifyOptions& o);
// Criteria 7 and 8 share one paired ensemble.
std::vector<CheckResult> check_sace_ensemble(const VerifyOptions& o);
CheckResult check_jump_bimodality(const VerifyOptions& o);
CheckResult check_structural(const VerifyOptions& o);

// Runs the selected criteria (1..10) in order.
std::vector<CheckResult> run_checks(const std::vector<int>& ids, const VerifyOptions& o);

std::string format_line(const CheckResult& r);

}  // namespace opm
