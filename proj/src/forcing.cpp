#include "opm/forcing.hpp"

#include <cmath>
#include <stdexcept>

#include "opm/rng.hpp"

namespace opm {

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long steps_of(double duration, double dt) {
  const double r = duration / dt;
  const long n = std::lround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-6 || n < 0)
    throw std::invalid_argument("duration is not a non-negative multiple of dt");
  return n;
}

void check_rate(double rate) {
  if (!(rate < 0.0)) throw std::invalid_argument("memory equation needs a negative decay rate");
}

constexpr std::uint64_t kStreamF = 1;
constexpr std::uint64_t kStreamZeta = 2;

}  // namespace

int BrownianPaths::row_of(int mode) const {
  for (std::size_t r = 0; r < modes.size(); ++r)
    if (modes[r] == mode) return static_cast<int>(r);
  return -1;
}

long BrownianPaths::steps(double duration) const { return steps_of(duration, dt); }
long JumpSignal::steps(double duration) const { return steps_of(duration, dt); }

BrownianPaths sample_brownian(std::uint64_t seed, const std::vector<int>& modes, const VectorXd& sigma,
                              double dt, double t_min, double t_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian: dt must be positive");
  if (t_min > 0.0) throw std::invalid_argument("sample_brownian: t_min must be <= 0 (pre-history required)");
  if (t_max < 0.0) throw std::invalid_argument("sample_brownian: t_max must be >= 0");
  if (static_cast<Eigen::Index>(modes.size()) != sigma.size())
    throw std::invalid_argument("sample_brownian: one amplitude per forced mode");
  BrownianPaths p;
  p.seed = seed;
  p.dt = dt;
  p.k_min = -static_cast<long>(std::ceil(-t_min / dt - 1e-9));
  p.k_max = static_cast<long>(std::ceil(t_max / dt - 1e-9));
  p.modes = modes;
  p.sigma = sigma;
  p.W.setZero(static_cast<Eigen::Index>(modes.size()), p.samples());

  const CounterRng rng(seed);
  const double sq = std::sqrt(dt);
  const long zero = -p.k_min;
  for (std::size_t r = 0; r < modes.size(); ++r) {
    const auto stream = static_cast<std::uint64_t>(modes[r]) + 1;
    auto row = p.W.row(static_cast<Eigen::Index>(r));
    for (long k = 0; k < p.k_max; ++k) row[zero + k + 1] = row[zero + k] + sq * rng.normal(stream, k);
    for (long k = -1; k >= p.k_min; --k) row[zero + k] = row[zero + k + 1] - sq * rng.normal(stream, k);
  }
  return p;
}

BrownianPaths coarsen(const BrownianPaths& paths, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be positive");
  BrownianPaths c;
  c.seed = paths.seed;
  c.dt = paths.dt * factor;
  c.k_min = -floor_div(-paths.k_min, factor);
  c.k_max = floor_div(paths.k_max, factor);
  c.modes = paths.modes;
  c.sigma = paths.sigma;
  c.W.resize(paths.W.rows(), c.samples());
  for (long k = c.k_min; k <= c.k_max; ++k) c.W.col(k - c.k_min) = paths.W.col(k * factor - paths.k_min);
  return c;
}

JumpSignal sample_jump_signal(std::uint64_t seed, double firing_rate, double block, double dt, double t_min,
                              double t_max, ZetaCadence cadence) {
  if (!(firing_rate >= 0.0 && firing_rate <= 1.0))
    throw std::invalid_argument("sample_jump_signal: firing rate must lie in [0, 1]");
  if (!(dt > 0.0) || !(block > 0.0)) throw std::invalid_argument("sample_jump_signal: dt and block must be positive");
  if (t_min > t_max) throw std::invalid_argument("sample_jump_signal: empty time range");
  const long spb = steps_of(block, dt);
  if (spb < 1) throw std::invalid_argument("sample_jump_signal: block shorter than dt");

  JumpSignal s;
  s.seed = seed;
  s.firing_rate = firing_rate;
  s.block = block;
  s.dt = dt;
  s.cadence = cadence;
  s.k_min = static_cast<long>(std::floor(t_min / dt + 1e-9));
  s.k_max = static_cast<long>(std::ceil(t_max / dt - 1e-9));
  s.f.resize(s.samples());
  s.zeta.resize(s.samples());
  const CounterRng rng(seed);
  for (long k = s.k_min; k <= s.k_max; ++k) {
    const long n = floor_div(k, spb);
    const double xi = rng.uniform(kStreamF, n);
    s.f[k - s.k_min] = (xi <= firing_rate) ? 1.0 : 0.0;
    const long zc = (cadence == ZetaCadence::PerBlock) ? n : k;
    s.zeta[k - s.k_min] = 2.0 * rng.uniform(kStreamZeta, zc) - 1.0;
  }
  return s;
}

double memory_quadrature_I(const BrownianPaths& paths, int row, double kappa, double tau, long k) {
  const long m = paths.steps(tau);
  if (k - m < paths.k_min || k > paths.k_max)
    throw std::invalid_argument("memory quadrature: path does not cover [t - tau, t]");
  if (m == 0) return 0.0;
  double acc = 0.0;
  for (long j = 0; j <= m; ++j) {
    const double w = (j == 0 || j == m) ? 0.5 : 1.0;
    acc += w * std::exp(kappa * (m - j) * paths.dt) * paths.at(row, k - m + j);
  }
  return acc * paths.dt;
}

double memory_quadrature_J(const JumpSignal& sig, double beta, double tau, double gain, long k) {
  const long m = sig.steps(tau);
  if (k - m < sig.k_min || k > sig.k_max)
    throw std::invalid_argument("memory quadrature: signal does not cover [t - tau, t]");
  double acc = 0.0;
  for (long j = 0; j < m; ++j) {
    const double left = std::exp(beta * (m - j) * sig.dt);
    const double right = std::exp(beta * (m - j - 1) * sig.dt);
    acc += 0.5 * (left + right) * sig.at(k - m + j);
  }
  return gain * acc * sig.dt;
}

double init_memory_I(const BrownianPaths& paths, int row, double kappa, double tau) {
  if (tau > -paths.t_min() + 1e-12) throw std::invalid_argument("init_memory_I: tau exceeds the pre-history");
  return memory_quadrature_I(paths, row, kappa, tau, 0);
}

MemoryState init_memory_gaussian(const BrownianPaths& paths, const std::vector<int>& rows, const VectorXd& rates,
                                 const VectorXd& taus, long k) {
  const int n = static_cast<int>(rows.size());
  if (rates.size() != n || taus.size() != n) throw std::invalid_argument("init_memory_gaussian: size mismatch");
  MemoryState m;
  m.value.resize(n);
  m.rate = rates;
  m.tau = taus;
  m.row = rows;
  m.lag.resize(n);
  m.tail = (rates.array() * taus.array()).exp().matrix();
  m.k = k;
  m.dt = paths.dt;
  for (int i = 0; i < n; ++i) {
    check_rate(rates[i]);
    m.lag[i] = paths.steps(taus[i]);
    m.value[i] = memory_quadrature_I(paths, rows[i], rates[i], taus[i], k);
  }
  return m;
}

MemoryState init_memory_jump(const JumpSignal& sig, const VectorXd& rates, const VectorXd& taus,
                             const VectorXd& gains, long k) {
  const auto n = rates.size();
  if (taus.size() != n || gains.size() != n) throw std::invalid_argument("init_memory_jump: size mismatch");
  MemoryState m;
  m.value.resize(n);
  m.rate = rates;
  m.tau = taus;
  m.gain = gains;
  m.lag.resize(n);
  m.tail = (rates.array() * taus.array()).exp().matrix();
  m.k = k;
  m.dt = sig.dt;
  for (Eigen::Index i = 0; i < n; ++i) {
    check_rate(rates[i]);
    m.lag[i] = sig.steps(taus[i]);
    m.value[i] = memory_quadrature_J(sig, rates[i], taus[i], gains[i], k);
  }
  return m;
}

void step_memory_I(MemoryState& mem, const BrownianPaths& paths) {
  const double dt = mem.dt;
  for (int i = 0; i < mem.size(); ++i) {
    const double kappa = mem.rate[i];
    check_rate(kappa);
    const double drive = paths.at(mem.row[i], mem.k) - mem.tail[i] * paths.at(mem.row[i], mem.k - mem.lag[i]);
    mem.value[i] += dt * (kappa * mem.value[i] + drive);
  }
  ++mem.k;
}

void step_memory_J(MemoryState& mem, const JumpSignal& sig) {
  const double dt = mem.dt;
  for (int i = 0; i < mem.size(); ++i) {
    const double beta = mem.rate[i];
    check_rate(beta);
    const double drive = sig.at(mem.k) - mem.tail[i] * sig.at(mem.k - mem.lag[i]);
    mem.value[i] += dt * (beta * mem.value[i] + mem.gain[i] * drive);
  }
  ++mem.k;
}

double stochastic_convolution(const BrownianPaths& paths, int row, double kappa, double tau, long k) {
  const long m = paths.steps(tau);
  if (k - m < paths.k_min || k > paths.k_max)
    throw std::invalid_argument("stochastic convolution: path does not cover [t - tau, t]");
  double acc = 0.0;
  for (long j = 0; j < m; ++j) {
    const long s = k - m + j;
    acc += std::exp(kappa * (m - j) * paths.dt) * (paths.at(row, s + 1) - paths.at(row, s));
  }
  return acc;
}

}  // namespace opm
