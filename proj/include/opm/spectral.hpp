#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace opm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Uniform grid on [0, L] with `intervals` cells (intervals + 1 nodes,
// boundary nodes included). Carries composite trapezoid weights.
struct UniformGrid {
  double length = 0.0;
  int intervals = 0;
  VectorXd x;
  VectorXd weights;

  UniformGrid() = default;
  UniformGrid(double length, int intervals);

  int nodes() const { return intervals + 1; }
  double spacing() const { return length / intervals; }
  double integrate(const VectorXd& f) const { return weights.dot(f); }
};

enum class BasisKind { AnalyticSine, Collocation };

// Ordered eigenpairs of a self-adjoint operator on (0, L) with Dirichlet
// conditions. Eigenvalues are strictly decreasing in index; modes are
// sampled on a uniform grid and orthonormal under its trapezoid rule.
// Indices are 0-based: mode k here is e_{k+1} in the usual labelling.
class EigenBasis {
 public:
  EigenBasis(UniformGrid grid, VectorXd eigenvalues, MatrixXd modes, BasisKind kind);

  int size() const { return static_cast<int>(eigenvalues_.size()); }
  double length() const { return grid_.length; }
  BasisKind kind() const { return kind_; }
  const UniformGrid& grid() const { return grid_; }
  const VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  // Rows are modes, columns grid nodes.
  const MatrixXd& modes() const { return modes_; }
  auto mode(int k) const { return modes_.row(k); }

  // Grid values of sum_k c_k e_k (c may be shorter than size()).
  VectorXd reconstruct(const VectorXd& coeffs) const;
  // Trapezoid projections <f, e_k> for the first `count` modes (all if < 0).
  VectorXd project(const VectorXd& values, int count = -1) const;
  double inner(const VectorXd& f, const VectorXd& g) const { return grid_.integrate(f.cwiseProduct(g)); }

  // Restriction to the leading `count` modes.
  EigenBasis truncated(int count) const;

 private:
  UniformGrid grid_;
  VectorXd eigenvalues_;
  MatrixXd modes_;
  MatrixXd weighted_modes_;  // modes_ scaled by trapezoid weights
  BasisKind kind_;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

// A state as coefficients over a basis with a resolved/unresolved split at q.
class SpectralField {
 public:
  SpectralField(BasisPtr basis, VectorXd coeffs, int split);

  const VectorXd& coeffs() const { return coeffs_; }
  VectorXd& coeffs() { return coeffs_; }
  int split() const { return split_; }
  const EigenBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }

  VectorXd resolved() const { return coeffs_.head(split_); }
  VectorXd unresolved() const { return coeffs_.tail(coeffs_.size() - split_); }
  VectorXd on_grid() const { return basis_->reconstruct(coeffs_); }

 private:
  BasisPtr basis_;
  VectorXd coeffs_;
  int split_;
};

// e_j(x) = sqrt(2/L) sin(j pi x / L) with lambda_j = 1 - j^2 pi^2 / L^2,
// the spectrum of d^2/dx^2 + 1 under Dirichlet conditions.
EigenBasis build_sine_basis(double length, int n_modes, int grid_intervals);

// Pure Dirichlet sine modes with eigenvalues -j^2 pi^2 / L^2 (no shift).
EigenBasis build_dirichlet_sine_basis(double length, int n_modes, int grid_intervals);

// Eigenpairs of psi'' + lambda (2 U* - 3 eps U*^2) psi = beta psi on (0, L),
// psi(0) = psi(L) = 0, via Chebyshev collocation. Modes are resampled to the
// uniform grid by barycentric interpolation, orthonormalized under the grid
// trapezoid rule in index order, and signed so the first significant grid
// value is positive.
struct LinearizedBasisOptions {
  double length = 2.0;
  double lambda = 1.32;
  double eps = 0.0;
  int cheb_points = 64;
  int n_modes = 16;
  int grid_intervals = 257;
};
EigenBasis build_linearized_basis(const std::function<double(double)>& steady_state,
                                  const LinearizedBasisOptions& opts);

// Raw Chebyshev eigenvalues (decreasing), exposed for diagnostics.
VectorXd linearized_spectrum(const std::function<double(double)>& steady_state,
                             const LinearizedBasisOptions& opts);

// Quadratic and cubic mode-interaction coefficients on the leading N modes:
//   quad(n, i, j)     = < w e_i e_j, e_n >
//   cubic(n, i, j, k) = - < e_i e_j e_k, e_n >
// computed by trapezoid quadrature on the basis grid. All indices 0-based.
class InteractionTensors {
 public:
  InteractionTensors() = default;
  InteractionTensors(int resolved, int total, std::vector<double> quad, std::vector<double> cubic);

  int resolved() const { return resolved_; }
  int total() const { return total_; }

  double quad(int n, int i, int j) const { return quad_[(n * total_ + i) * total_ + j]; }
  double cubic(int n, int i, int j, int k) const {
    return cubic_[((n * total_ + i) * total_ + j) * total_ + k];
  }

 private:
  int resolved_ = 0;
  int total_ = 0;
  std::vector<double> quad_;
  std::vector<double> cubic_;
};

// `weight` may be empty, meaning no quadratic nonlinearity (all quad = 0).
InteractionTensors interaction_tensors(const EigenBasis& basis, const VectorXd& weight, int resolved,
                                       int total);

// Ginzburg-Landau free energy  int |u_x|^2 / 2 + (u^2 - 1)^2 / 4 dx  of a
// field on an analytic sine basis.
double gl_energy(const SpectralField& u);

}  // namespace opm
