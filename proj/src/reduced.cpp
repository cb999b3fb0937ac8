#include "opm/reduced.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "opm/error.hpp"

namespace opm {

namespace {

long step_count(double T, double dt) {
  const long n = std::lround(T / dt);
  if (n < 0 || std::abs(n * dt - T) > 1e-9 * std::max(1.0, std::abs(T)))
    throw std::invalid_argument("time is not a multiple of dt");
  return n;
}

using Poly = std::map<std::array<int, 3>, double>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      const std::array<int, 3> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      out[e] += ca * cb;
    }
  return out;
}

void add_scaled(Poly& acc, const Poly& p, double s) {
  if (s == 0.0) return;
  for (const auto& [e, c] : p) acc[e] += s * c;
}

}  // namespace

SaceClosure::SaceClosure(const SaceModel& model, ParameterizationSpec spec)
    : spec_(std::move(spec)),
      basis_(model.basis().truncated(std::max(spec_.total(), spec_.q()))),
      total_(std::max(spec_.total(), spec_.q())),
      dt_(model.params().dt) {
  if (spec_.kind() != NoiseKind::Gaussian) throw std::invalid_argument("sace closure: needs a Gaussian spec");
  full_ = interaction_tensors(basis_, VectorXd(), spec_.q(), total_);
  denom_ = (1.0 - dt_ * basis_.eigenvalues().head(spec_.q()).array()).matrix();
}

VectorXd SaceClosure::nonlinear(const VectorXd& y, const VectorXd& phi) const {
  VectorXd u = VectorXd::Zero(total_);
  u.head(q()) = y;
  for (int p = 0; p < spec_.size(); ++p) u[spec_.mode(p).mode] = phi[p];
  const VectorXd g = basis_.reconstruct(u);
  return basis_.project(-g.array().cube().matrix(), q());
}

VectorXd SaceClosure::nonlinear_expanded(const VectorXd& y, const VectorXd& phi) const {
  VectorXd w = VectorXd::Zero(total_);
  w.head(q()) = y;
  for (int p = 0; p < spec_.size(); ++p) w[spec_.mode(p).mode] = phi[p];
  VectorXd out = VectorXd::Zero(q());
  for (int i = 0; i < q(); ++i)
    for (int a = 0; a < total_; ++a)
      for (int b = 0; b < total_; ++b)
        for (int c = 0; c < total_; ++c) out[i] += full_.cubic(i, a, b, c) * w[a] * w[b] * w[c];
  return out;
}

VectorXd SaceClosure::rhs(const VectorXd& y, const VectorXd& phi) const {
  return basis_.eigenvalues().head(q()).cwiseProduct(y) + nonlinear(y, phi);
}

VectorXd SaceClosure::galerkin_rhs(const VectorXd& y) const {
  return basis_.eigenvalues().head(q()).cwiseProduct(y) + nonlinear_expanded(y, VectorXd::Zero(spec_.size()));
}

VectorXd SaceClosure::phi(const ReducedState& s, const BrownianPaths& paths) const {
  VectorXd out(spec_.size());
  for (int p = 0; p < spec_.size(); ++p)
    out[p] = spec_.polynomial(p, s.y) + gaussian_noise_term(spec_, p, s.mem, paths);
  return out;
}

ReducedState SaceClosure::initial(const VectorXd& y0, const BrownianPaths& paths, long k, bool zeroed_memory) const {
  if (y0.size() != q()) throw std::invalid_argument("sace closure: y0 must have q entries");
  ReducedState s;
  s.y = y0;
  s.k = k;
  s.mem = zeroed_memory ? zero_memory(spec_, paths.dt, &paths, k) : spec_memory(spec_, paths, k);
  return s;
}

void SaceClosure::step(ReducedState& s, const BrownianPaths& paths) const {
  const VectorXd ph = phi(s, paths);
  const VectorXd nl = nonlinear(s.y, ph);
  s.y = ((s.y + dt_ * nl).array() / denom_.array()).matrix();
  step_memory_I(s.mem, paths);
  ++s.k;
  if (!s.y.allFinite()) throw NumericalError("sace closure: non-finite state at step " + std::to_string(s.k));
}

JumpClosure::JumpClosure(const JumpModel& model, ParameterizationSpec spec, bool ou)
    : spec_(std::move(spec)),
      ou_(ou),
      dt_(model.params().dt),
      beta1_(model.basis().eigenvalue(0)),
      basis_(model.basis_ptr()),
      weight_(model.quad_weight()),
      cubic_scale_(model.cubic_scale()) {
  if (spec_.kind() != NoiseKind::Jump || spec_.q() != 1 || spec_.size() != 2)
    throw std::invalid_argument("jump closure: needs a jump spec with q = 1 and two parameterized modes");
  const auto& T = spec_.tensors();
  const int m[3] = {0, spec_.mode(0).mode, spec_.mode(1).mode};

  Poly w[3];
  w[0][{1, 0, 0}] = 1.0;
  for (int p = 0; p < 2; ++p) {
    Poly& wp = w[p + 1];
    std::array<int, 3> e{0, 0, 0};
    e[p + 1] = 1;
    wp[e] = 1.0;
    const auto& mp = spec_.mode(p);
    if (mp.Y != 0.0) wp[{0, 0, 0}] += std::exp(mp.rate * mp.tau) * mp.Y;
    if (!ou_) {
      wp[{2, 0, 0}] += spec_.quad_coeff(p, 0, 0);
      wp[{3, 0, 0}] += spec_.cubic_coeff(p, 0, 0, 0);
    }
  }

  Poly rhs;
  rhs[{1, 0, 0}] = beta1_;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Poly ab = mul(w[a], w[b]);
      add_scaled(rhs, ab, T.quad(0, m[a], m[b]));
      for (int c = 0; c < 3; ++c) add_scaled(rhs, mul(ab, w[c]), spec_.cubic_scale() * T.cubic(0, m[a], m[b], m[c]));
    }
  for (const auto& [e, c] : rhs)
    if (c != 0.0) terms_.push_back({e, c});
}

double JumpClosure::coefficient(int ey, int e3, int e5) const {
  for (const auto& t : terms_)
    if (t.exps[0] == ey && t.exps[1] == e3 && t.exps[2] == e5) return t.coeff;
  return 0.0;
}

int JumpClosure::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.exps[0] + t.exps[1] + t.exps[2]);
  return d;
}

double JumpClosure::rhs(double y, const VectorXd& J) const {
  double py[10], p3[10], p5[10];
  py[0] = p3[0] = p5[0] = 1.0;
  for (int i = 1; i < 10; ++i) {
    py[i] = py[i - 1] * y;
    p3[i] = p3[i - 1] * J[0];
    p5[i] = p5[i - 1] * J[1];
  }
  double s = 0.0;
  for (const auto& t : terms_) s += t.coeff * py[t.exps[0]] * p3[t.exps[1]] * p5[t.exps[2]];
  return s;
}

double JumpClosure::rhs_quadrature(double y, const VectorXd& J) const {
  VectorXd u = VectorXd::Zero(basis_->size());
  u[0] = y;
  VectorXd x(1);
  x[0] = y;
  for (int p = 0; p < 2; ++p) {
    double v = J[p];
    if (!ou_) v += spec_.polynomial(p, x);
    else if (spec_.mode(p).Y != 0.0) v += std::exp(spec_.mode(p).rate * spec_.mode(p).tau) * spec_.mode(p).Y;
    u[spec_.mode(p).mode] = v;
  }
  const VectorXd g = basis_->reconstruct(u);
  const VectorXd f = (weight_.array() * g.array().square() - cubic_scale_ * g.array().cube()).matrix();
  return beta1_ * y + basis_->inner(f, basis_->mode(0).transpose());
}

ReducedState JumpClosure::initial(double y0, const JumpSignal& sig, long k) const {
  ReducedState s;
  s.y = VectorXd::Constant(1, y0);
  s.k = k;
  s.mem = spec_memory(spec_, sig, k);
  return s;
}

void JumpClosure::step(ReducedState& s, const JumpSignal& sig) const {
  s.y[0] += dt_ * rhs(s.y[0], s.mem.value);
  step_memory_J(s.mem, sig);
  ++s.k;
  if (!std::isfinite(s.y[0])) throw NumericalError("jump closure: non-finite state at step " + std::to_string(s.k));
}

Trajectory run_reduced_sace(const SaceClosure& c, const BrownianPaths& paths, const VectorXd& y0, double T, int stride,
                            bool zeroed_memory) {
  if (stride < 1) throw std::invalid_argument("run_reduced: stride must be positive");
  const double dt = c.dt();
  if (std::abs(paths.dt - dt) > 1e-15) throw std::invalid_argument("run_reduced: noise dt differs from closure dt");
  const long n = step_count(T, dt);
  ReducedState s = c.initial(y0, paths, 0, zeroed_memory);
  const int q = c.q(), P = c.aux_equations();
  Trajectory tr;
  tr.dt = dt;
  tr.stride = stride;
  tr.times.resize(n / stride + 1);
  tr.coeffs.resize(n / stride + 1, q + P);
  auto record = [&](long row) {
    tr.times[row] = s.k * dt;
    tr.coeffs.row(row).head(q) = s.y.transpose();
    tr.coeffs.row(row).tail(P) = c.phi(s, paths).transpose();
  };
  record(0);
  for (long k = 0; k < n; ++k) {
    c.step(s, paths);
    if ((k + 1) % stride == 0) record((k + 1) / stride);
  }
  return tr;
}

Trajectory run_reduced_jump(const JumpClosure& c, const JumpSignal& sig, double y0, double t0, double T, int stride) {
  if (stride < 1) throw std::invalid_argument("run_reduced: stride must be positive");
  const double dt = c.dt();
  const long k0 = step_count(t0, dt);
  const long n = step_count(T - t0, dt);
  ReducedState s = c.initial(y0, sig, k0);
  Trajectory tr;
  tr.dt = dt;
  tr.stride = stride;
  tr.times.resize(n / stride + 1);
  tr.coeffs.resize(n / stride + 1, 3);
  VectorXd x(1);
  auto record = [&](long row) {
    tr.times[row] = s.k * dt;
    tr.coeffs(row, 0) = s.y[0];
    x[0] = s.y[0];
    for (int p = 0; p < 2; ++p)
      tr.coeffs(row, p + 1) = s.mem.value[p] + (c.ou() ? 0.0 : c.spec().polynomial(p, x));
  };
  record(0);
  for (long k = 0; k < n; ++k) {
    c.step(s, sig);
    if ((k + 1) % stride == 0) record((k + 1) / stride);
  }
  return tr;
}

double jump_start_time(const ParameterizationSpec& spec) {
  double t0 = 0.0;
  for (const auto& m : spec.modes()) t0 = std::max(t0, m.tau);
  return t0;
}

}  // namespace opm
