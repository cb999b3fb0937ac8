#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace opm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch).
void gauss_legendre(int n, double a, double b, VectorXd& x, VectorXd& w);

// Sine-Galerkin residual R_n(a) = k_n a_n - <f(u), e_n>, u = sum a_n e_n,
// e_n = sqrt(2/L) sin(n pi x / L), integrals by Gauss-Legendre. With this
// sign the gradient flow is a' = -R(a), so a steady state is stable when
// every eigenvalue of dR/da is positive.
class SineGalerkin {
 public:
  using Nonlinearity = std::function<double(double)>;
  SineGalerkin(double length, VectorXd stiffness, Nonlinearity f, int quad_points = 0);

  int size() const { return static_cast<int>(k_.size()); }
  double length() const { return length_; }
  VectorXd residual(const VectorXd& a) const;
  // Central finite differences.
  MatrixXd jacobian(const VectorXd& a) const;
  VectorXd on_nodes(const VectorXd& a) const { return modes_.transpose() * a; }

 private:
  double length_;
  VectorXd k_;
  Nonlinearity f_;
  VectorXd x_, w_;
  MatrixXd modes_;  // modes at quadrature nodes
};

// d^2 u / dx^2 + lambda (1 + u^2 - eps u^3) = 0, Dirichlet on (0, L).
SineGalerkin fold_problem(double length, double lambda, double eps, int n_modes);
VectorXd galerkin_residual(const VectorXd& a, double lambda, double eps, int n_modes, double length = 2.0);

// d^2 u / dx^2 + u - u^3 = 0, Dirichlet on (0, L).
SineGalerkin allen_cahn_problem(double length, int n_modes);

struct NewtonOptions {
  double tol = 1e-11;
  int max_iter = 60;
  double max_condition = 1e8;
};

struct NewtonResult {
  VectorXd a;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double condition = 0.0;
};

NewtonResult newton_solve(const SineGalerkin& prob, const VectorXd& a0, const NewtonOptions& opts = {});

struct BranchPoint {
  double lambda = 0.0;
  VectorXd a;
  bool stable = false;
  double condition = 0.0;
  double min_eig = 0.0;  // smallest eigenvalue of the symmetrized Jacobian
  double residual = 0.0;
};

struct Branch {
  std::vector<BranchPoint> points;
  bool turned = false;     // stopped at a (near-)singular Jacobian
  double fold_lambda = 0.0;
  std::string stop_reason;
};

struct ContinuationOptions {
  double step = 1e-3;
  double lambda_end = 2.0;
  double refine_to = 1e-7;    // smallest step when closing in on a turning point
  double max_jump = 0.25;     // coefficient change treated as a branch switch
  NewtonOptions newton;
};

// Natural continuation in lambda (step may be negative). On Newton failure
// or a branch switch the step is halved until `refine_to`; the last good
// lambda is then reported as the turning point.
Branch continue_branch(double eps, int n_modes, double length, double lambda0, const VectorXd& a0,
                       const ContinuationOptions& opts);

BranchPoint classify(const SineGalerkin& prob, double lambda, const VectorXd& a);

// Distinct converged solutions from random starts, deduplicated in sup norm
// and sorted by increasing a_1.
std::vector<VectorXd> multistart(const SineGalerkin& prob, int starts, std::uint64_t seed, double amp_max,
                                 double dedupe = 1e-6);

struct FoldSteadyStates {
  double lambda = 0.0;
  std::vector<VectorXd> solutions;  // increasing a_1: lower, middle, upper
};
FoldSteadyStates fold_steady_states(double length, double lambda, double eps, int n_modes, int starts = 200,
                                    std::uint64_t seed = 7);

struct BifurcationDiagram {
  Branch lower, middle_down, upper_down, upper_up;
  double fold_lower = 0.0;
  double seed_lambda = 0.0;
  int multiplicity_at_seed = 0;
};
BifurcationDiagram bifurcation_diagram(double length, double eps, int n_modes, const ContinuationOptions& opts,
                                       double lambda_start = 1.0);

struct AllenCahnState {
  std::string name;
  VectorXd a;
  VectorXd fractions;   // a_n^2 / |a|^2
  bool stable = false;
  double residual = 0.0;
};
std::vector<AllenCahnState> allen_cahn_steady_states(double length, int n_modes = 16);

}  // namespace opm
