#pragma once

#include <cstdint>
#include <vector>

#include "opm/parameterization.hpp"

namespace opm {

struct DefectCurve {
  int mode = 0;           // basis index
  VectorXd tau;
  VectorXd raw;           // mean |u_n - Phi_n|^2 over the window
  VectorXd normalized;    // raw / mean |u_n|^2
  double norm = 0.0;      // mean |u_n|^2
  int argmin = 0;
  double tau_star = 0.0;
  bool asymptotic = false;  // minimum at the largest tau
  // (Q(tau_max) - min Q) / Q(tau_max)
  double improvement = 0.0;
};

// mean |u - phi|^2 / mean |u|^2
double normalized_defect(const VectorXd& u, const VectorXd& phi);

// Grid minimum with ties (within 1e-12) broken toward the smallest tau.
void select_minimum(DefectCurve& c);

struct DefectWindow {
  double t_s = 10.0;
  double T = 40.0;
};

// Defect curve of spec slot p along a stored trajectory. Memory is
// re-initialized at the window start by quadrature for every tau and
// propagated with the trajectory.
DefectCurve compute_defect_curve(const Trajectory& traj, const ParameterizationSpec& tmpl, int p,
                                 const VectorXd& tau_grid, const DefectWindow& w, const BrownianPaths& paths);
DefectCurve compute_defect_curve(const Trajectory& traj, const ParameterizationSpec& tmpl, int p,
                                 const VectorXd& tau_grid, const DefectWindow& w, const JumpSignal& sig);

// Sets tau*_n and the asymptotic flag of every slot from its curve.
void optimize_tau(ParameterizationSpec& spec, const std::vector<DefectCurve>& curves);

VectorXd tau_grid(double step, double tau_max);

struct TrainingResult {
  ParameterizationSpec spec;
  std::vector<DefectCurve> curves;
  Trajectory trajectory;
};

// Noise realizations with the pre-history required by a tau grid.
BrownianPaths sace_paths(const SaceModel& model, std::uint64_t seed, double T, double tau_max);
JumpSignal jump_signal(const JumpModel& model, std::uint64_t seed, double T);
// Initial fluctuation for u_0 = 0.5 e_1, i.e. v_0 = 0.5 e_1 - U*.
VectorXd jump_initial_state(const JumpModel& model);

TrainingResult train_sace(const SaceModel& model, std::uint64_t seed, const DefectWindow& w, const VectorXd& grid);
TrainingResult train_jump(const JumpModel& model, std::uint64_t seed, const DefectWindow& w, const VectorXd& grid);

}  // namespace opm
