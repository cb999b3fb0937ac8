#include "opm/parameterization.hpp"

#include <cmath>
#include <stdexcept>

namespace opm {

double coeff_balance(double tau, double delta) {
  if (tau < 0.0) throw std::invalid_argument("coefficient: tau must be non-negative");
  if (delta == 0.0) return tau;
  if (std::abs(delta * tau) < 1e-8) return tau - 0.5 * delta * tau * tau;
  return -std::expm1(-delta * tau) / delta;
}

ParameterizationSpec::ParameterizationSpec(NoiseKind kind, int q, VectorXd resolved_rates,
                                           std::vector<ModeParameterization> modes, InteractionTensors tensors,
                                           bool has_quad, double cubic_scale)
    : kind_(kind),
      q_(q),
      rates_(std::move(resolved_rates)),
      modes_(std::move(modes)),
      tensors_(std::move(tensors)),
      has_quad_(has_quad),
      cubic_scale_(cubic_scale) {
  if (rates_.size() != q_) throw std::invalid_argument("spec: one rate per resolved mode");
  for (const auto& m : modes_) {
    if (m.mode < q_ || m.mode >= tensors_.total())
      throw std::invalid_argument("spec: parameterized mode outside the tensor range");
    if (m.tau < 0.0) throw std::invalid_argument("spec: tau must be non-negative");
  }
  quad_.resize(modes_.size());
  cubic_.resize(modes_.size());
  for (int p = 0; p < size(); ++p) refresh(p);
}

int ParameterizationSpec::slot_of(int basis_mode) const {
  for (int p = 0; p < size(); ++p)
    if (modes_[p].mode == basis_mode) return p;
  return -1;
}

int ParameterizationSpec::total() const {
  int t = q_;
  for (const auto& m : modes_) t = std::max(t, m.mode + 1);
  return t;
}

void ParameterizationSpec::set_tau(int p, double tau) {
  if (tau < 0.0) throw std::invalid_argument("spec: tau must be non-negative");
  modes_[p].tau = tau;
  refresh(p);
}

void ParameterizationSpec::refresh(int p) {
  const auto& m = modes_[p];
  const int n = m.mode;
  const double tau = m.tau;
  quad_[p].assign(static_cast<std::size_t>(q_ * q_), 0.0);
  cubic_[p].assign(static_cast<std::size_t>(q_ * q_ * q_), 0.0);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      if (has_quad_) quad_[p][i * q_ + j] = coeff_D(tau, rates_[i], rates_[j], m.rate) * tensors_.quad(n, i, j);
      for (int k = 0; k < q_; ++k)
        cubic_[p][(i * q_ + j) * q_ + k] =
            coeff_E(tau, rates_[i], rates_[j], rates_[k], m.rate) * cubic_scale_ * tensors_.cubic(n, i, j, k);
    }
}

double ParameterizationSpec::polynomial(int p, const VectorXd& X) const {
  if (X.size() != q_) throw std::invalid_argument("spec: X must have q entries");
  const auto& m = modes_[p];
  double s = m.Y != 0.0 ? std::exp(m.rate * m.tau) * m.Y : 0.0;
  const auto& Q = quad_[p];
  const auto& C = cubic_[p];
  for (int i = 0; i < q_; ++i) {
    for (int j = 0; j < q_; ++j) {
      const double xij = X[i] * X[j];
      if (has_quad_) s += Q[i * q_ + j] * xij;
      const double* c = &C[(i * q_ + j) * q_];
      for (int k = 0; k < q_; ++k) s += c[k] * xij * X[k];
    }
  }
  return s;
}

ParameterizationSpec make_sace_spec(const SaceModel& model, const VectorXd& taus) {
  const auto& p = model.params();
  const int N = p.n_forced;
  if (taus.size() != N - p.q) throw std::invalid_argument("sace spec: one tau per parameterized mode");
  const EigenBasis& b = model.basis();
  InteractionTensors t = interaction_tensors(b, VectorXd(), p.q, N);
  std::vector<ModeParameterization> modes;
  for (int n = p.q; n < N; ++n) {
    ModeParameterization m;
    m.mode = n;
    m.tau = taus[n - p.q];
    m.rate = b.eigenvalue(n);
    m.sigma = model.sigma()[n];
    modes.push_back(m);
  }
  return ParameterizationSpec(NoiseKind::Gaussian, p.q, b.eigenvalues().head(p.q), std::move(modes), std::move(t),
                              false, 1.0);
}

ParameterizationSpec make_jump_spec(const JumpModel& model, const VectorXd& taus) {
  const auto& p = model.params();
  if (taus.size() != static_cast<Eigen::Index>(p.forced.size()))
    throw std::invalid_argument("jump spec: one tau per forced mode");
  const EigenBasis& b = model.basis();
  int total = 1;
  for (int m : p.forced) total = std::max(total, m + 1);
  InteractionTensors t = interaction_tensors(b, model.quad_weight(), 1, total);
  std::vector<ModeParameterization> modes;
  for (std::size_t i = 0; i < p.forced.size(); ++i) {
    ModeParameterization m;
    m.mode = p.forced[i];
    m.tau = taus[static_cast<Eigen::Index>(i)];
    m.rate = b.eigenvalue(m.mode);
    m.sigma = model.gain();
    modes.push_back(m);
  }
  return ParameterizationSpec(NoiseKind::Jump, 1, b.eigenvalues().head(1), std::move(modes), std::move(t), true,
                              model.cubic_scale());
}

MemoryState spec_memory(const ParameterizationSpec& spec, const BrownianPaths& paths, long k) {
  std::vector<int> rows;
  VectorXd rates(spec.size()), taus(spec.size());
  for (int p = 0; p < spec.size(); ++p) {
    const int r = paths.row_of(spec.mode(p).mode);
    if (r < 0) throw std::invalid_argument("spec memory: parameterized mode has no Brownian path");
    rows.push_back(r);
    rates[p] = spec.mode(p).rate;
    taus[p] = spec.mode(p).tau;
  }
  return init_memory_gaussian(paths, rows, rates, taus, k);
}

MemoryState spec_memory(const ParameterizationSpec& spec, const JumpSignal& sig, long k) {
  VectorXd rates(spec.size()), taus(spec.size()), gains(spec.size());
  for (int p = 0; p < spec.size(); ++p) {
    rates[p] = spec.mode(p).rate;
    taus[p] = spec.mode(p).tau;
    gains[p] = spec.mode(p).sigma;
  }
  return init_memory_jump(sig, rates, taus, gains, k);
}

MemoryState zero_memory(const ParameterizationSpec& spec, double dt, const BrownianPaths* paths, long k) {
  MemoryState m;
  const int n = spec.size();
  m.value = VectorXd::Zero(n);
  m.rate.resize(n);
  m.tau.resize(n);
  m.gain.resize(n);
  m.lag.resize(n);
  m.dt = dt;
  m.k = k;
  for (int p = 0; p < n; ++p) {
    m.rate[p] = spec.mode(p).rate;
    m.tau[p] = spec.mode(p).tau;
    m.gain[p] = spec.mode(p).sigma;
    m.lag[p] = std::lround(m.tau[p] / dt);
    if (paths) m.row.push_back(paths->row_of(spec.mode(p).mode));
  }
  m.tail = (m.rate.array() * m.tau.array()).exp().matrix();
  return m;
}

double gaussian_noise_term(const ParameterizationSpec& spec, int p, const MemoryState& mem,
                           const BrownianPaths& paths) {
  const auto& m = spec.mode(p);
  if (m.sigma == 0.0) return 0.0;
  const int r = mem.row[p];
  const double w = paths.at(r, mem.k) - mem.tail[p] * paths.at(r, mem.k - mem.lag[p]);
  return m.sigma * (w + m.rate * mem.value[p]);
}

double eval_phi_gaussian(const ParameterizationSpec& spec, const VectorXd& X, const MemoryState& mem,
                         const BrownianPaths& paths, int p) {
  if (spec.kind() != NoiseKind::Gaussian) throw std::invalid_argument("eval_phi_gaussian: jump spec");
  if (std::abs(mem.tau[p] - spec.mode(p).tau) > 1e-12) throw std::invalid_argument("eval_phi_gaussian: memory tau mismatch");
  return spec.polynomial(p, X) + gaussian_noise_term(spec, p, mem, paths);
}

double eval_phi_jump(const ParameterizationSpec& spec, double X, const MemoryState& mem, int p) {
  if (spec.kind() != NoiseKind::Jump) throw std::invalid_argument("eval_phi_jump: Gaussian spec");
  if (p < 0 || p >= spec.size()) throw std::invalid_argument("eval_phi_jump: unsupported mode");
  VectorXd x(1);
  x[0] = X;
  return spec.polynomial(p, x) + mem.value[p];
}

VectorXd memory_field(const ParameterizationSpec& spec, const MemoryState& mem, const BrownianPaths& paths) {
  VectorXd xi(spec.size());
  for (int p = 0; p < spec.size(); ++p) xi[p] = gaussian_noise_term(spec, p, mem, paths);
  return xi;
}

double markovian_opm(const ParameterizationSpec& spec, const VectorXd& X, int p) { return spec.polynomial(p, X); }

VectorXd lift(const ParameterizationSpec& spec, const VectorXd& y, const MemoryState& mem,
              const BrownianPaths* paths, int total_modes) {
  if (y.size() != spec.q() || total_modes < spec.total()) throw std::invalid_argument("lift: size mismatch");
  VectorXd u = VectorXd::Zero(total_modes);
  u.head(spec.q()) = y;
  for (int p = 0; p < spec.size(); ++p) {
    double v = spec.polynomial(p, y);
    if (spec.kind() == NoiseKind::Gaussian) {
      if (!paths) throw std::invalid_argument("lift: Gaussian spec needs the Brownian paths");
      v += gaussian_noise_term(spec, p, mem, *paths);
    } else {
      v += mem.value[p];
    }
    u[spec.mode(p).mode] = v;
  }
  return u;
}

NonresonanceReport check_nonresonance(const VectorXd& eigenvalues, const InteractionTensors* tensors, int q,
                                      const VectorXd& sigma, int k) {
  if (k < 2 || k > 3) throw std::invalid_argument("nonresonance: only quadratic or cubic leading order");
  const int N = static_cast<int>(eigenvalues.size());
  if (sigma.size() != N || q < 1 || q > N) throw std::invalid_argument("nonresonance: size mismatch");
  NonresonanceReport rep;
  std::vector<int> js(k, 0);
  long combos = 1;
  for (int p = 0; p < k; ++p) combos *= q;
  for (int n = q; n < N; ++n) {
    for (long c = 0; c < combos; ++c) {
      long r = c;
      for (int p = 0; p < k; ++p) {
        js[p] = static_cast<int>(r % q);
        r /= q;
      }
      if (tensors) {
        if (n >= tensors->total()) continue;
        const double g = (k == 3) ? tensors->cubic(n, js[0], js[1], js[2]) : tensors->quad(n, js[0], js[1]);
        if (std::abs(g) < 1e-12) continue;
      }
      for (int mask = 0; mask < (1 << k); ++mask) {
        bool noisy = true;
        double s = eigenvalues[n];
        std::vector<int> kz;
        for (int p = 0; p < k; ++p) {
          if (mask & (1 << p)) {
            kz.push_back(p);
            if (sigma[js[p]] == 0.0) noisy = false;
          } else {
            s -= eigenvalues[js[p]];
          }
        }
        if (!noisy) continue;
        ++rep.checked;
        if (s >= 0.0) rep.violations.push_back({n, js, kz, s});
      }
    }
  }
  return rep;
}

namespace {

double bf_forcing(const ParameterizationSpec& spec, int n, const VectorXd& p) {
  const auto& T = spec.tensors();
  const int q = spec.q();
  double f = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      if (spec.has_quad()) f += T.quad(n, i, j) * p[i] * p[j];
      for (int k = 0; k < q; ++k) f += spec.cubic_scale() * T.cubic(n, i, j, k) * p[i] * p[j] * p[k];
    }
  return f;
}

template <class Drive>
double bf_forward(const ParameterizationSpec& spec, const VectorXd& X, int p, long m, double dt, Drive drive) {
  const auto& mp = spec.mode(p);
  double qv = mp.Y;
  VectorXd pb(spec.q());
  for (long j = 0; j < m; ++j) {
    const double back = -(m - j) * dt;  // s - t
    for (int i = 0; i < spec.q(); ++i) pb[i] = std::exp(spec.resolved_rates()[i] * back) * X[i];
    qv += dt * (mp.rate * qv + bf_forcing(spec, mp.mode, pb)) + drive(j);
  }
  return qv;
}

}  // namespace

double integrate_bf_numeric(const ParameterizationSpec& spec, const VectorXd& X, int p, const BrownianPaths& paths,
                            long k) {
  const auto& mp = spec.mode(p);
  const long m = paths.steps(mp.tau);
  if (k - m < paths.k_min || k > paths.k_max) throw std::invalid_argument("bf oracle: path does not cover [t - tau, t]");
  const int r = mp.sigma != 0.0 ? paths.row_of(mp.mode) : -1;
  if (mp.sigma != 0.0 && r < 0) throw std::invalid_argument("bf oracle: forced mode without a path");
  return bf_forward(spec, X, p, m, paths.dt, [&](long j) {
    if (r < 0) return 0.0;
    const long s = k - m + j;
    return mp.sigma * (paths.at(r, s + 1) - paths.at(r, s));
  });
}

double integrate_bf_numeric(const ParameterizationSpec& spec, const VectorXd& X, int p, const JumpSignal& sig,
                            long k) {
  const auto& mp = spec.mode(p);
  const long m = sig.steps(mp.tau);
  if (k - m < sig.k_min || k > sig.k_max) throw std::invalid_argument("bf oracle: signal does not cover [t - tau, t]");
  return bf_forward(spec, X, p, m, sig.dt, [&](long j) { return sig.dt * mp.sigma * sig.at(k - m + j); });
}

}  // namespace opm
