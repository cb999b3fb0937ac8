#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace opm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Two-sided Brownian paths W^j sampled on t_k = k dt, k = k_min..k_max,
// pinned at W^j(0) = 0. Row r of `W` belongs to modes[r] (0-based basis
// index). Increments on [t_k, t_{k+1}] are drawn from the counter stream
// (seed, mode, k), so every value is a pure function of those three.
struct BrownianPaths {
  std::uint64_t seed = 0;
  double dt = 0.0;
  long k_min = 0;  // <= 0
  long k_max = 0;
  std::vector<int> modes;
  VectorXd sigma;
  MatrixXd W;

  double t_min() const { return k_min * dt; }
  double t_max() const { return k_max * dt; }
  long samples() const { return k_max - k_min + 1; }
  double time(long k) const { return k * dt; }
  // Value of row r at step index k (k may be negative).
  double at(int r, long k) const { return W(r, k - k_min); }
  // Row holding a basis mode, -1 if the mode is not forced.
  int row_of(int mode) const;
  // Steps spanned by a duration; throws unless it is a multiple of dt.
  long steps(double duration) const;
};

BrownianPaths sample_brownian(std::uint64_t seed, const std::vector<int>& modes, const VectorXd& sigma,
                              double dt, double t_min, double t_max);

// Subsample by an integer factor. The coarse path is the same realization
// seen on a coarser grid.
BrownianPaths coarsen(const BrownianPaths& paths, int factor);

enum class ZetaCadence { PerBlock, PerStep };

// Dichotomous jump signal: f = 1{xi_n <= f_r} on blocks [n Dt, (n+1) Dt),
// amplitude zeta uniform on (-1, 1), resampled per block by default.
struct JumpSignal {
  std::uint64_t seed = 0;
  double firing_rate = 0.0;
  double block = 0.0;
  double dt = 0.0;
  long k_min = 0;
  long k_max = 0;
  ZetaCadence cadence = ZetaCadence::PerBlock;
  VectorXd f;
  VectorXd zeta;

  double time(long k) const { return k * dt; }
  long samples() const { return k_max - k_min + 1; }
  // zeta f on [t_k, t_{k+1}).
  double at(long k) const { return zeta[k - k_min] * f[k - k_min]; }
  long steps(double duration) const;
};

JumpSignal sample_jump_signal(std::uint64_t seed, double firing_rate, double block, double dt, double t_min,
                              double t_max, ZetaCadence cadence = ZetaCadence::PerBlock);

// Running memory coefficients, one slot per parameterized mode.
//   Gaussian: I(t) = int_{t-tau}^t e^{kappa (t-s)} W_s ds
//   jump:     J(t) = sigma lambda int_{t-tau}^t e^{beta (t-s)} zeta_s f(s) ds
struct MemoryState {
  VectorXd value;
  VectorXd rate;
  VectorXd tau;
  std::vector<long> lag;   // tau / dt
  std::vector<int> row;    // Brownian row per slot (Gaussian only)
  VectorXd gain;           // sigma lambda per slot (jump only)
  VectorXd tail;           // e^{rate tau}
  long k = 0;              // current step index, t = k dt
  double dt = 0.0;

  double t() const { return k * dt; }
  int size() const { return static_cast<int>(value.size()); }
};

// Trapezoid rule for I on the path grid.
double memory_quadrature_I(const BrownianPaths& paths, int row, double kappa, double tau, long k);
// Trapezoid rule for J. The signal is constant on each step interval, so
// each interval uses its own constant value at both ends.
double memory_quadrature_J(const JumpSignal& sig, double beta, double tau, double gain, long k);

// Pre-history integral I(0) = int_{-tau}^0 e^{-kappa s} W_s ds.
double init_memory_I(const BrownianPaths& paths, int row, double kappa, double tau);

MemoryState init_memory_gaussian(const BrownianPaths& paths, const std::vector<int>& rows,
                                 const VectorXd& rates, const VectorXd& taus, long k);
MemoryState init_memory_jump(const JumpSignal& sig, const VectorXd& rates, const VectorXd& taus,
                             const VectorXd& gains, long k);

// One forward Euler step of the memory equations.
//   dI/dt = kappa I + W_t - e^{kappa tau} W_{t-tau}
//   dJ/dt = beta J + sigma lambda (zeta f(t) - e^{beta tau} zeta f(t - tau))
void step_memory_I(MemoryState& mem, const BrownianPaths& paths);
void step_memory_J(MemoryState& mem, const JumpSignal& sig);

// Euler-Maruyama sum for the stochastic convolution int_{t-tau}^t e^{kappa (t-s)} dW_s.
double stochastic_convolution(const BrownianPaths& paths, int row, double kappa, double tau, long k);

}  // namespace opm
