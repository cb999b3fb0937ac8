#pragma once

#include <string>
#include <vector>

#include "opm/forcing.hpp"
#include "opm/spde.hpp"
#include "opm/spectral.hpp"

namespace opm {

enum class NoiseKind { Gaussian, Jump };

// (1 - e^{-delta tau}) / delta, or tau when delta == 0. For |delta tau|
// below 1e-8 the two-term Taylor expansion is used.
double coeff_balance(double tau, double delta);
inline double coeff_D(double tau, double li, double lj, double ln) { return coeff_balance(tau, li + lj - ln); }
inline double coeff_E(double tau, double li, double lj, double lk, double ln) {
  return coeff_balance(tau, li + lj + lk - ln);
}

struct ModeParameterization {
  int mode = 0;         // 0-based basis index, >= q
  double tau = 0.0;
  double Y = 0.0;
  double rate = 0.0;    // lambda_n or beta_n
  double sigma = 0.0;   // Gaussian: sigma_n. Jump: sigma lambda (gain of J)
  bool asymptotic = false;
};

// Per-mode parameterizations
//   Phi_n = e^{rate tau} Y + noise_n(t) + sum D B X_i X_j + sum E C X_i X_j X_k
// with the quadratic/cubic interaction tensors scaled by quad_scale and
// cubic_scale (1 for the Allen-Cahn cubic, lambda eps for the fold system).
class ParameterizationSpec {
 public:
  ParameterizationSpec() = default;
  ParameterizationSpec(NoiseKind kind, int q, VectorXd resolved_rates, std::vector<ModeParameterization> modes,
                       InteractionTensors tensors, bool has_quad, double cubic_scale);

  NoiseKind kind() const { return kind_; }
  int q() const { return q_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const VectorXd& resolved_rates() const { return rates_; }
  const ModeParameterization& mode(int p) const { return modes_[p]; }
  const std::vector<ModeParameterization>& modes() const { return modes_; }
  const InteractionTensors& tensors() const { return tensors_; }
  bool has_quad() const { return has_quad_; }
  double cubic_scale() const { return cubic_scale_; }
  int slot_of(int basis_mode) const;

  void set_tau(int p, double tau);
  void set_asymptotic(int p, bool flag) { modes_[p].asymptotic = flag; }
  // Highest parameterized basis index + 1.
  int total() const;

  // Deterministic part: e^{rate tau} Y + quadratic + cubic terms.
  double polynomial(int p, const VectorXd& X) const;
  double quad_coeff(int p, int i, int j) const { return quad_[p][i * q_ + j]; }
  double cubic_coeff(int p, int i, int j, int k) const { return cubic_[p][(i * q_ + j) * q_ + k]; }

 private:
  void refresh(int p);

  NoiseKind kind_ = NoiseKind::Gaussian;
  int q_ = 0;
  VectorXd rates_;
  std::vector<ModeParameterization> modes_;
  InteractionTensors tensors_;
  bool has_quad_ = false;
  double cubic_scale_ = 1.0;
  std::vector<std::vector<double>> quad_;
  std::vector<std::vector<double>> cubic_;
};

// Modes q..N-1 of the sACE with Y = 0.
ParameterizationSpec make_sace_spec(const SaceModel& model, const VectorXd& taus);
// Forced modes of the fold system (e_3, e_5), q = 1.
ParameterizationSpec make_jump_spec(const JumpModel& model, const VectorXd& taus);

// Memory states for every slot of a spec, initialized by quadrature at step k.
MemoryState spec_memory(const ParameterizationSpec& spec, const BrownianPaths& paths, long k);
MemoryState spec_memory(const ParameterizationSpec& spec, const JumpSignal& sig, long k);
// Zero memory (no noise history) at step k.
MemoryState zero_memory(const ParameterizationSpec& spec, double dt, const BrownianPaths* paths, long k);

// sigma (W_t - e^{lambda tau} W_{t - tau}) + sigma lambda I(t), at t = mem.k dt.
double gaussian_noise_term(const ParameterizationSpec& spec, int p, const MemoryState& mem,
                           const BrownianPaths& paths);

double eval_phi_gaussian(const ParameterizationSpec& spec, const VectorXd& X, const MemoryState& mem,
                         const BrownianPaths& paths, int p);
double eval_phi_jump(const ParameterizationSpec& spec, double X, const MemoryState& mem, int p);

// xi_t: the noise terms alone, one per parameterized mode.
VectorXd memory_field(const ParameterizationSpec& spec, const MemoryState& mem, const BrownianPaths& paths);
double markovian_opm(const ParameterizationSpec& spec, const VectorXd& X, int p);

// u^opm coefficients (length `total_modes`): y on 0..q-1, Phi_n on the
// parameterized modes, zero elsewhere. `paths` is null for the jump kind.
VectorXd lift(const ParameterizationSpec& spec, const VectorXd& y, const MemoryState& mem,
              const BrownianPaths* paths, int total_modes);

struct Violation {
  int n = 0;
  std::vector<int> js;
  std::vector<int> noise_positions;  // K_z
  double value = 0.0;                // lambda_n - sum_{p not in K_z} lambda_{j_p}
};
struct NonresonanceReport {
  std::vector<Violation> violations;
  long checked = 0;
  bool all_clear() const { return violations.empty(); }
};
// Enumerates (j_1..j_k) in {0..q-1}^k and n in q..N-1 with nonzero
// interaction coefficient; K_z ranges over position subsets whose modes all
// carry noise. A violation is lambda_n - sum_{p not in K_z} lambda_{j_p} >= 0.
// `tensors` may be null, in which case every coefficient counts as nonzero.
NonresonanceReport check_nonresonance(const VectorXd& eigenvalues, const InteractionTensors* tensors, int q,
                                      const VectorXd& sigma, int k);

// Backward-forward oracle for Phi at step index k: resolved modes run
// backward exactly (linear), the unresolved mode forward from Y at t - tau
// by Euler(-Maruyama) on the path grid.
double integrate_bf_numeric(const ParameterizationSpec& spec, const VectorXd& X, int p, const BrownianPaths& paths,
                            long k);
double integrate_bf_numeric(const ParameterizationSpec& spec, const VectorXd& X, int p, const JumpSignal& sig,
                            long k);

}  // namespace opm
