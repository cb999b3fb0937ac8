#include "opm/spde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "opm/error.hpp"

namespace opm {

namespace {

void check_finite(const VectorXd& u, long step) {
  if (!u.allFinite()) throw NumericalError("non-finite state at step " + std::to_string(step));
}

long step_count(double T, double dt) {
  const long n = std::lround(T / dt);
  if (n < 0 || std::abs(n * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("horizon is not a multiple of dt");
  return n;
}

}  // namespace

double sine_series(const VectorXd& a, double length, double x) {
  const double amp = std::sqrt(2.0 / length);
  double s = 0.0;
  for (int n = 0; n < a.size(); ++n) s += a[n] * std::sin((n + 1) * std::numbers::pi * x / length);
  return amp * s;
}

SaceModel::SaceModel(const SaceParams& p) : p_(p) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("sace: dt must be positive");
  if (p.q < 0 || p.n_forced < p.q || p.n_forced > p.n_modes)
    throw std::invalid_argument("sace: forcing range must satisfy q <= N <= n_modes");
  basis_ = std::make_shared<const EigenBasis>(build_sine_basis(p.length, p.n_modes, p.grid_intervals));
  sigma_ = VectorXd::Zero(p.n_modes);
  for (int n = p.q; n < p.n_forced; ++n) sigma_[n] = p.sigma;
  denom_ = (1.0 - p.dt * basis_->eigenvalues().array()).matrix();
}

std::vector<int> SaceModel::forced_modes() const {
  std::vector<int> m;
  for (int n = p_.q; n < p_.n_forced; ++n) m.push_back(n);
  return m;
}

VectorXd SaceModel::nonlinear(const VectorXd& u) const {
  const VectorXd g = basis_->reconstruct(u);
  return basis_->project(-g.array().cube().matrix(), static_cast<int>(u.size()));
}

VectorXd SaceModel::step(const VectorXd& u, const VectorXd& dW) const {
  VectorXd out = u, work;
  step_inplace(out, dW, work);
  return out;
}

void SaceModel::step_inplace(VectorXd& u, const VectorXd& dW, VectorXd& work) const {
  if (u.size() != basis_->size() || dW.size() != u.size()) throw std::invalid_argument("step_sace: size mismatch");
  for (int n = 0; n < p_.q; ++n)
    if (dW[n] != 0.0) throw std::invalid_argument("step_sace: increment on a resolved mode");
  work = basis_->reconstruct(u);
  work = -work.array().cube().matrix();
  const VectorXd nl = basis_->project(work);
  u = ((u + p_.dt * nl + sigma_.cwiseProduct(dW)).array() / denom_.array()).matrix();
}

JumpModel::JumpModel(const JumpParams& p, VectorXd ustar) : p_(p), ustar_(std::move(ustar)) {
  if (!(p.dt > 0.0)) throw std::invalid_argument("jump: dt must be positive");
  LinearizedBasisOptions opts;
  opts.length = p.length;
  opts.lambda = p.lambda;
  opts.eps = p.eps;
  opts.cheb_points = p.cheb_points;
  opts.n_modes = p.n_modes;
  opts.grid_intervals = p.grid_intervals;
  const VectorXd a = ustar_;
  const double L = p.length;
  basis_ = std::make_shared<const EigenBasis>(
      build_linearized_basis([a, L](double x) { return sine_series(a, L, x); }, opts));
  for (int m : p.forced)
    if (m < 0 || m >= p.n_modes) throw std::invalid_argument("jump: forced mode outside the basis");
  const auto& grid = basis_->grid();
  ustar_grid_.resize(grid.nodes());
  for (int k = 0; k < grid.nodes(); ++k) ustar_grid_[k] = sine_series(ustar_, L, grid.x[k]);
  weight_ = (p.lambda * (1.0 - 3.0 * p.eps * ustar_grid_.array())).matrix();
  denom_ = (1.0 - p.dt * basis_->eigenvalues().array()).matrix();
}

double JumpModel::ustar_at(double x) const { return sine_series(ustar_, p_.length, x); }

VectorXd JumpModel::nonlinear(const VectorXd& v) const {
  const VectorXd g = basis_->reconstruct(v);
  const VectorXd f = (weight_.array() * g.array().square() - cubic_scale() * g.array().cube()).matrix();
  return basis_->project(f, static_cast<int>(v.size()));
}

VectorXd JumpModel::step(const VectorXd& v, double g) const {
  VectorXd out = v, work;
  step_inplace(out, g, work);
  return out;
}

void JumpModel::step_inplace(VectorXd& v, double g, VectorXd& work) const {
  if (v.size() != basis_->size()) throw std::invalid_argument("step_jump: size mismatch");
  work = basis_->reconstruct(v);
  work = (weight_.array() * work.array().square() - cubic_scale() * work.array().cube()).matrix();
  VectorXd rhs = v + p_.dt * basis_->project(work);
  for (int m : p_.forced) rhs[m] += p_.dt * gain() * g;
  v = (rhs.array() / denom_.array()).matrix();
}

Trajectory integrate_sace(const SaceModel& model, const VectorXd& u0, const BrownianPaths& paths, double T,
                          int stride) {
  const double dt = model.params().dt;
  if (std::abs(paths.dt - dt) > 1e-15) throw std::invalid_argument("integrate_sace: noise dt differs from model dt");
  if (stride < 1) throw std::invalid_argument("integrate_sace: stride must be positive");
  const long n = step_count(T, dt);
  if (paths.k_max < n) throw std::invalid_argument("integrate_sace: noise does not cover [0, T]");
  const int M = model.basis().size();
  std::vector<int> rows(M, -1);
  for (int m = 0; m < M; ++m) rows[m] = model.sigma()[m] != 0.0 ? paths.row_of(m) : -1;
  for (int m = 0; m < M; ++m)
    if (model.sigma()[m] != 0.0 && rows[m] < 0) throw std::invalid_argument("integrate_sace: forced mode without a path");

  Trajectory tr;
  tr.dt = dt;
  tr.stride = stride;
  const long snaps = n / stride + 1;
  tr.times.resize(snaps);
  tr.coeffs.resize(snaps, M);
  VectorXd u = u0, dW = VectorXd::Zero(M), work;
  tr.times[0] = 0.0;
  tr.coeffs.row(0) = u.transpose();
  for (long k = 0; k < n; ++k) {
    for (int m = 0; m < M; ++m)
      if (rows[m] >= 0) dW[m] = paths.at(rows[m], k + 1) - paths.at(rows[m], k);
    model.step_inplace(u, dW, work);
    check_finite(u, k + 1);
    if ((k + 1) % stride == 0) {
      const long s = (k + 1) / stride;
      tr.times[s] = (k + 1) * dt;
      tr.coeffs.row(s) = u.transpose();
    }
  }
  return tr;
}

Trajectory integrate_jump(const JumpModel& model, const VectorXd& v0, const JumpSignal& sig, double T, int stride,
                          double t0) {
  const double dt = model.params().dt;
  if (std::abs(sig.dt - dt) > 1e-15) throw std::invalid_argument("integrate_jump: signal dt differs from model dt");
  if (stride < 1) throw std::invalid_argument("integrate_jump: stride must be positive");
  const long n = step_count(T - t0, dt);
  const long k0 = step_count(t0, dt);
  if (sig.k_min > k0 || sig.k_max < k0 + n) throw std::invalid_argument("integrate_jump: signal does not cover the run");
  const int M = model.basis().size();
  Trajectory tr;
  tr.dt = dt;
  tr.stride = stride;
  const long snaps = n / stride + 1;
  tr.times.resize(snaps);
  tr.coeffs.resize(snaps, M);
  VectorXd v = v0, work;
  tr.times[0] = k0 * dt;
  tr.coeffs.row(0) = v.transpose();
  for (long k = 0; k < n; ++k) {
    model.step_inplace(v, sig.at(k0 + k), work);
    check_finite(v, k0 + k + 1);
    if ((k + 1) % stride == 0) {
      const long s = (k + 1) / stride;
      tr.times[s] = (k0 + k + 1) * dt;
      tr.coeffs.row(s) = v.transpose();
    }
  }
  return tr;
}

}  // namespace opm
