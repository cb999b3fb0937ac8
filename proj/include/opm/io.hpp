#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "opm/bifurcation.hpp"
#include "opm/defect.hpp"
#include "opm/ensemble.hpp"

namespace opm {

// Numbers are written with 17 significant digits so files round-trip and
// equal runs produce identical bytes.
std::string fmt(double v);

void write_text(const std::string& path, const std::string& body);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);
void ensure_dir(const std::string& dir);

// t, a_1, ..., a_n (columns may be renamed by `names`).
void write_trajectory_csv(const std::string& path, const Trajectory& tr, const std::vector<std::string>& names = {});
void write_defect_csv(const std::string& path, const std::vector<DefectCurve>& curves);
void write_branch_csv(const std::string& path, const std::vector<std::pair<std::string, const Branch*>>& branches);
void write_pdf_csv(const std::string& path, const PdfComparison& c, const std::string& a_name,
                   const std::string& b_name);
void write_profiles_csv(const std::string& path, const VectorXd& x, const ClassProfiles& a, const ClassProfiles& b);
void write_acf_csv(const std::string& path, const AcfSet& a, const AcfSet& b, double lag_time);
void write_seeds_csv(const std::string& path, const std::vector<std::uint64_t>& a,
                     const std::vector<std::uint64_t>& b);
void write_terminal_csv(const std::string& path, const EnsembleResult& r);

// Noise realizations (t, W_n per forced mode; t, f, zeta for the jump
// signal) so a run can replay an exported path.
void write_noise_csv(const std::string& path, const BrownianPaths& p);
BrownianPaths read_noise_csv(const std::string& path, const std::vector<int>& modes, const VectorXd& sigma,
                             double dt);
void write_signal_csv(const std::string& path, const JumpSignal& sig);
JumpSignal read_signal_csv(const std::string& path, double firing_rate, double block, double dt);

// Grid snapshots (t, x, u) of a trajectory.
void write_field_csv(const std::string& path, const EigenBasis& basis, const Trajectory& tr);
// x, e_1..e_n on the simulation grid.
void write_basis_csv(const std::string& path, const EigenBasis& basis);
// Nonzero interaction coefficients over resolved index tuples, 1-based.
void write_tensors_csv(const std::string& path, const InteractionTensors& t);

// Trained spec: per-slot mode, tau, Y, rate, sigma and the asymptotic flag.
nlohmann::json spec_to_json(const ParameterizationSpec& spec);
// Rebuilds the spec against a freshly built template (tensors come from the
// model) and checks that the stored rates agree with the template.
ParameterizationSpec spec_from_json(const nlohmann::json& j, ParameterizationSpec tmpl);

}  // namespace opm
