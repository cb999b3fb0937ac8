#include "opm/defect.hpp"

#include <cmath>
#include <stdexcept>

namespace opm {

double normalized_defect(const VectorXd& u, const VectorXd& phi) {
  if (u.size() != phi.size() || u.size() == 0) throw std::invalid_argument("defect: series size mismatch");
  const double den = u.squaredNorm();
  if (!(den > 0.0)) throw std::invalid_argument("defect: mode carries no energy on the window");
  return (u - phi).squaredNorm() / den;
}

void select_minimum(DefectCurve& c) {
  if (c.normalized.size() == 0) throw std::invalid_argument("defect: empty tau grid");
  const double m = c.normalized.minCoeff();
  int idx = 0;
  while (c.normalized[idx] > m + 1e-12) ++idx;
  c.argmin = idx;
  c.tau_star = c.tau[idx];
  const auto last = c.normalized.size() - 1;
  c.asymptotic = idx == last;
  const double qmax = c.normalized[last];
  c.improvement = qmax > 0.0 ? (qmax - m) / qmax : 0.0;
}

namespace {

struct WindowIndex {
  std::vector<long> snaps;  // trajectory rows in the window
  long k_start = 0;         // step index of the first row
};

WindowIndex window_rows(const Trajectory& traj, const DefectWindow& w) {
  if (w.T > traj.times[traj.size() - 1] + 1e-9 || w.t_s < traj.times[0] - 1e-9 || w.t_s >= w.T)
    throw std::invalid_argument("defect: window outside the trajectory");
  WindowIndex wi;
  for (long s = 0; s < traj.size(); ++s)
    if (traj.times[s] >= w.t_s - 1e-9 && traj.times[s] <= w.T + 1e-9) wi.snaps.push_back(s);
  wi.k_start = std::lround(traj.times[wi.snaps.front()] / traj.dt);
  return wi;
}

template <class Init, class Noise, class Step>
DefectCurve sweep(const Trajectory& traj, const ParameterizationSpec& tmpl, int p, const VectorXd& grid,
                  const DefectWindow& w, Init init, Noise noise, Step step) {
  const WindowIndex wi = window_rows(traj, w);
  const int n = tmpl.mode(p).mode;
  const int q = tmpl.q();
  const auto ns = static_cast<Eigen::Index>(wi.snaps.size());
  VectorXd un(ns);
  for (Eigen::Index s = 0; s < ns; ++s) un[s] = traj.coeffs(wi.snaps[s], n);

  DefectCurve c;
  c.mode = n;
  c.tau = grid;
  c.raw.resize(grid.size());
  c.normalized.resize(grid.size());
  c.norm = un.squaredNorm() / static_cast<double>(ns);
  if (!(c.norm > 0.0)) throw std::invalid_argument("defect: mode carries no energy on the window");

  ParameterizationSpec spec = tmpl;
  VectorXd phi(ns), X(q);
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    spec.set_tau(p, grid[g]);
    MemoryState mem = init(spec, wi.k_start);
    for (Eigen::Index s = 0; s < ns; ++s) {
      const long row = wi.snaps[s];
      X = traj.coeffs.row(row).head(q).transpose();
      phi[s] = spec.polynomial(p, X) + noise(spec, mem, p);
      if (s + 1 < ns)
        for (int j = 0; j < traj.stride; ++j) step(mem);
    }
    c.raw[g] = (un - phi).squaredNorm() / static_cast<double>(ns);
    c.normalized[g] = c.raw[g] / c.norm;
  }
  select_minimum(c);
  return c;
}

}  // namespace

DefectCurve compute_defect_curve(const Trajectory& traj, const ParameterizationSpec& tmpl, int p,
                                 const VectorXd& grid, const DefectWindow& w, const BrownianPaths& paths) {
  if (tmpl.kind() != NoiseKind::Gaussian) throw std::invalid_argument("defect: spec is not Gaussian");
  if (grid.size() > 0 && w.t_s - grid.maxCoeff() < paths.t_min() - 1e-9)
    throw std::invalid_argument("defect: tau exceeds the pre-history");
  return sweep(
      traj, tmpl, p, grid, w, [&](const ParameterizationSpec& s, long k) { return spec_memory(s, paths, k); },
      [&](const ParameterizationSpec& s, const MemoryState& m, int slot) {
        return gaussian_noise_term(s, slot, m, paths);
      },
      [&](MemoryState& m) { step_memory_I(m, paths); });
}

DefectCurve compute_defect_curve(const Trajectory& traj, const ParameterizationSpec& tmpl, int p,
                                 const VectorXd& grid, const DefectWindow& w, const JumpSignal& sig) {
  if (tmpl.kind() != NoiseKind::Jump) throw std::invalid_argument("defect: spec is not a jump spec");
  return sweep(
      traj, tmpl, p, grid, w, [&](const ParameterizationSpec& s, long k) { return spec_memory(s, sig, k); },
      [](const ParameterizationSpec&, const MemoryState& m, int slot) { return m.value[slot]; },
      [&](MemoryState& m) { step_memory_J(m, sig); });
}

void optimize_tau(ParameterizationSpec& spec, const std::vector<DefectCurve>& curves) {
  for (const auto& c : curves) {
    if (c.tau.size() == 0) throw std::invalid_argument("optimize_tau: empty grid");
    const int p = spec.slot_of(c.mode);
    if (p < 0) throw std::invalid_argument("optimize_tau: curve for an unparameterized mode");
    spec.set_tau(p, c.tau_star);
    spec.set_asymptotic(p, c.asymptotic);
  }
}

VectorXd tau_grid(double step, double tau_max) {
  if (!(step > 0.0) || tau_max < 0.0) throw std::invalid_argument("tau grid: step must be positive");
  const long n = std::lround(tau_max / step);
  VectorXd g(n + 1);
  for (long i = 0; i <= n; ++i) g[i] = i * step;
  return g;
}

BrownianPaths sace_paths(const SaceModel& model, std::uint64_t seed, double T, double tau_max) {
  const auto modes = model.forced_modes();
  VectorXd sig(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) sig[static_cast<Eigen::Index>(i)] = model.sigma()[modes[i]];
  return sample_brownian(seed, modes, sig, model.params().dt, -1.25 * tau_max, T);
}

JumpSignal jump_signal(const JumpModel& model, std::uint64_t seed, double T) {
  const auto& p = model.params();
  return sample_jump_signal(seed, p.firing_rate, p.block, p.dt, 0.0, T, p.cadence);
}

VectorXd jump_initial_state(const JumpModel& model) {
  const EigenBasis& b = model.basis();
  VectorXd v0 = -b.project(model.ustar_grid());
  v0[0] += 0.5;
  return v0;
}

TrainingResult train_sace(const SaceModel& model, std::uint64_t seed, const DefectWindow& w, const VectorXd& grid) {
  const double tau_max = grid.size() ? grid.maxCoeff() : 0.0;
  const BrownianPaths paths = sace_paths(model, seed, w.T, tau_max);
  TrainingResult r;
  r.trajectory = integrate_sace(model, VectorXd::Zero(model.basis().size()), paths, w.T, 1);
  r.spec = make_sace_spec(model, VectorXd::Zero(model.params().n_forced - model.params().q));
  for (int p = 0; p < r.spec.size(); ++p)
    r.curves.push_back(compute_defect_curve(r.trajectory, r.spec, p, grid, w, paths));
  optimize_tau(r.spec, r.curves);
  return r;
}

TrainingResult train_jump(const JumpModel& model, std::uint64_t seed, const DefectWindow& w, const VectorXd& grid) {
  const JumpSignal sig = jump_signal(model, seed, w.T);
  TrainingResult r;
  r.trajectory = integrate_jump(model, jump_initial_state(model), sig, w.T, 1);
  r.spec = make_jump_spec(model, VectorXd::Zero(static_cast<Eigen::Index>(model.params().forced.size())));
  if (grid.size() && w.t_s < grid.maxCoeff() - 1e-9)
    throw std::invalid_argument("train_jump: window must start after the largest tau");
  for (int p = 0; p < r.spec.size(); ++p)
    r.curves.push_back(compute_defect_curve(r.trajectory, r.spec, p, grid, w, sig));
  optimize_tau(r.spec, r.curves);
  return r;
}

}  // namespace opm
