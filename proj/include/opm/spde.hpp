#pragma once

#include <numbers>
#include <vector>

#include "opm/forcing.hpp"
#include "opm/spectral.hpp"

namespace opm {

struct SaceParams {
  double length = 3.9 * std::numbers::pi;
  int q = 4;            // resolved modes 1..q
  int n_forced = 8;     // forcing on modes q+1..n_forced
  double sigma = 0.2;
  double dt = 1e-2;
  int grid_intervals = 201;
  int n_modes = 32;
};

// Dirichlet fold problem and its jump-driven fluctuation equation around U*.
// Critical cubic coefficient of the fold system (p = 3).
inline constexpr double kEpsStar = 0.3103;

struct JumpParams {
  double length = 2.0;
  double lambda = 1.32;
  double eps = kEpsStar / 2.0;
  double sigma = 300.0;
  double firing_rate = 0.35;
  double block = 1.0;
  double dt = 1e-2;
  int grid_intervals = 257;
  int n_modes = 16;
  int cheb_points = 64;
  int galerkin_modes = 6;          // sine modes for the steady states
  std::vector<int> forced{2, 4};   // e_3 and e_5, 0-based
  ZetaCadence cadence = ZetaCadence::PerBlock;
};

// Snapshot sequence; row s of `coeffs` holds the mode coefficients at times[s].
struct Trajectory {
  VectorXd times;
  MatrixXd coeffs;
  int stride = 1;
  double dt = 0.0;

  long size() const { return times.size(); }
};

class SaceModel {
 public:
  explicit SaceModel(const SaceParams& p);

  const SaceParams& params() const { return p_; }
  const EigenBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  // Per-mode noise amplitude (zero outside the forced set).
  const VectorXd& sigma() const { return sigma_; }
  std::vector<int> forced_modes() const;

  // Projection of -u^3 onto all modes (pseudo-spectral).
  VectorXd nonlinear(const VectorXd& u) const;
  // u_n <- (u_n + dt N_n(u) + sigma_n dW^n) / (1 - dt lambda_n). dW has one
  // entry per mode and must vanish on the resolved modes.
  VectorXd step(const VectorXd& u, const VectorXd& dW) const;
  void step_inplace(VectorXd& u, const VectorXd& dW, VectorXd& work) const;

 private:
  SaceParams p_;
  BasisPtr basis_;
  VectorXd sigma_;
  VectorXd denom_;
};

class JumpModel {
 public:
  // `ustar` holds the sine-Galerkin coefficients of the unstable steady state.
  JumpModel(const JumpParams& p, VectorXd ustar);

  const JumpParams& params() const { return p_; }
  const EigenBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  const VectorXd& ustar_coeffs() const { return ustar_; }
  double ustar_at(double x) const;
  const VectorXd& ustar_grid() const { return ustar_grid_; }
  // a(x) = lambda - 3 lambda eps U*(x)
  const VectorXd& quad_weight() const { return weight_; }
  double cubic_scale() const { return p_.lambda * p_.eps; }
  double gain() const { return p_.sigma * p_.lambda; }

  // Projection of a v^2 - lambda eps v^3.
  VectorXd nonlinear(const VectorXd& v) const;
  // Linear part implicit; nonlinearity and lambda eta explicit. `g` is
  // zeta f on the current step.
  VectorXd step(const VectorXd& v, double g) const;
  void step_inplace(VectorXd& v, double g, VectorXd& work) const;

 private:
  JumpParams p_;
  VectorXd ustar_;
  BasisPtr basis_;
  VectorXd ustar_grid_;
  VectorXd weight_;
  VectorXd denom_;
};

Trajectory integrate_sace(const SaceModel& model, const VectorXd& u0, const BrownianPaths& paths, double T,
                          int stride);
Trajectory integrate_jump(const JumpModel& model, const VectorXd& v0, const JumpSignal& sig, double T, int stride,
                          double t0 = 0.0);

// Sine-series evaluation sum_n a_n sqrt(2/L) sin(n pi x / L).
double sine_series(const VectorXd& a, double length, double x);

}  // namespace opm
