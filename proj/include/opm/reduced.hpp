#pragma once

#include <array>
#include <map>
#include <vector>

#include "opm/parameterization.hpp"

namespace opm {

struct ReducedState {
  VectorXd y;
  MemoryState mem;
  long k = 0;
  double t(double dt) const { return k * dt; }
};

// q-mode closure of the Allen-Cahn equation with the unresolved modes
// replaced by Phi_n:  y' = Lambda y + P_c[-(y + Phi)^3].
class SaceClosure {
 public:
  SaceClosure(const SaceModel& model, ParameterizationSpec spec);

  const ParameterizationSpec& spec() const { return spec_; }
  int q() const { return spec_.q(); }
  int aux_equations() const { return spec_.size(); }
  int total() const { return total_; }
  double dt() const { return dt_; }
  const EigenBasis& basis() const { return basis_; }

  // Resolved projection of -(u^opm)^3 with u^opm = (y, phi) on modes 0..total-1.
  VectorXd nonlinear(const VectorXd& y, const VectorXd& phi) const;
  // The same term expanded through the cubic interaction tensor.
  VectorXd nonlinear_expanded(const VectorXd& y, const VectorXd& phi) const;
  VectorXd rhs(const VectorXd& y, const VectorXd& phi) const;
  // Galerkin truncation: Lambda y + sum C y y y.
  VectorXd galerkin_rhs(const VectorXd& y) const;

  VectorXd phi(const ReducedState& s, const BrownianPaths& paths) const;
  ReducedState initial(const VectorXd& y0, const BrownianPaths& paths, long k, bool zeroed_memory = false) const;
  void step(ReducedState& s, const BrownianPaths& paths) const;

 private:
  ParameterizationSpec spec_;
  EigenBasis basis_;
  InteractionTensors full_;
  int total_;
  double dt_;
  VectorXd denom_;
};

// Monomial c y^a J3^b J5^c.
struct Monomial {
  std::array<int, 3> exps{};
  double coeff = 0.0;
};

// 1-D closure of the fold system:
//   y' = beta_1 y + <a (y e_1 + P)^2, e_1> - lambda eps <(y e_1 + P)^3, e_1>
// expanded once into a polynomial in (y, J_3, J_5). With `ou` set,
// P = J_3 e_3 + J_5 e_5; otherwise P carries the full Phi_n.
class JumpClosure {
 public:
  JumpClosure(const JumpModel& model, ParameterizationSpec spec, bool ou);

  const ParameterizationSpec& spec() const { return spec_; }
  bool ou() const { return ou_; }
  double dt() const { return dt_; }
  const std::vector<Monomial>& monomials() const { return terms_; }
  double coefficient(int ey, int e3, int e5) const;
  int degree() const;

  double rhs(double y, const VectorXd& J) const;
  // Direct evaluation of the defining inner products on the grid.
  double rhs_quadrature(double y, const VectorXd& J) const;

  ReducedState initial(double y0, const JumpSignal& sig, long k) const;
  void step(ReducedState& s, const JumpSignal& sig) const;

 private:
  ParameterizationSpec spec_;
  bool ou_;
  double dt_;
  double beta1_;
  std::vector<Monomial> terms_;
  BasisPtr basis_;
  VectorXd weight_;
  double cubic_scale_;
};

// Reduced trajectories store y followed by the parameterized amplitudes.
Trajectory run_reduced_sace(const SaceClosure& c, const BrownianPaths& paths, const VectorXd& y0, double T, int stride,
                            bool zeroed_memory = false);
Trajectory run_reduced_jump(const JumpClosure& c, const JumpSignal& sig, double y0, double t0, double T, int stride);

// t_0 = max tau*_n
double jump_start_time(const ParameterizationSpec& spec);

}  // namespace opm
