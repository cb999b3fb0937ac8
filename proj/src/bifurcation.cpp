#include "opm/bifurcation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "opm/rng.hpp"

namespace opm {

using std::numbers::pi;

void gauss_legendre(int n, double a, double b, VectorXd& x, VectorXd& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  MatrixXd J = MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  const double half = 0.5 * (b - a);
  x = (half * (es.eigenvalues().array() + 1.0) + a).matrix();
  w = (2.0 * half * es.eigenvectors().row(0).array().square()).matrix().transpose();
}

SineGalerkin::SineGalerkin(double length, VectorXd stiffness, Nonlinearity f, int quad_points)
    : length_(length), k_(std::move(stiffness)), f_(std::move(f)) {
  if (!(length > 0.0)) throw std::invalid_argument("galerkin: length must be positive");
  if (k_.size() < 1) throw std::invalid_argument("galerkin: need at least one mode");
  const int N = size();
  const int Q = quad_points > 0 ? quad_points : std::max(64, 8 * N + 16);
  gauss_legendre(Q, 0.0, length, x_, w_);
  modes_.resize(N, Q);
  const double amp = std::sqrt(2.0 / length);
  for (int n = 0; n < N; ++n)
    for (int j = 0; j < Q; ++j) modes_(n, j) = amp * std::sin((n + 1) * pi * x_[j] / length);
}

VectorXd SineGalerkin::residual(const VectorXd& a) const {
  if (a.size() != size()) throw std::invalid_argument("galerkin: coefficient size mismatch");
  const VectorXd u = modes_.transpose() * a;
  VectorXd fw(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) fw[j] = w_[j] * f_(u[j]);
  return k_.cwiseProduct(a) - modes_ * fw;
}

MatrixXd SineGalerkin::jacobian(const VectorXd& a) const {
  const int N = size();
  MatrixXd J(N, N);
  VectorXd ap = a, am = a;
  for (int j = 0; j < N; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(a[j]));
    ap[j] = a[j] + h;
    am[j] = a[j] - h;
    J.col(j) = (residual(ap) - residual(am)) / (2.0 * h);
    ap[j] = am[j] = a[j];
  }
  return J;
}

SineGalerkin fold_problem(double length, double lambda, double eps, int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("fold problem: need at least one mode");
  VectorXd k(n_modes);
  for (int n = 0; n < n_modes; ++n) k[n] = std::pow((n + 1) * pi / length, 2);
  return SineGalerkin(length, k, [lambda, eps](double u) { return lambda * (1.0 + u * u - eps * u * u * u); });
}

VectorXd galerkin_residual(const VectorXd& a, double lambda, double eps, int n_modes, double length) {
  return fold_problem(length, lambda, eps, n_modes).residual(a);
}

SineGalerkin allen_cahn_problem(double length, int n_modes) {
  VectorXd k(n_modes);
  for (int n = 0; n < n_modes; ++n) k[n] = std::pow((n + 1) * pi / length, 2) - 1.0;
  return SineGalerkin(length, k, [](double u) { return -u * u * u; });
}

namespace {

double condition_of(const MatrixXd& J) {
  Eigen::JacobiSVD<MatrixXd> svd(J);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

NewtonResult newton_solve(const SineGalerkin& prob, const VectorXd& a0, const NewtonOptions& opts) {
  NewtonResult res;
  res.a = a0;
  VectorXd r = prob.residual(res.a);
  double rn = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < opts.max_iter; ++it) {
    if (!std::isfinite(rn)) break;
    if (rn < opts.tol) {
      res.converged = true;
      res.iterations = it;
      break;
    }
    const MatrixXd J = prob.jacobian(res.a);
    const VectorXd delta = J.fullPivLu().solve(-r);
    double alpha = 1.0;
    VectorXd trial;
    VectorXd rt;
    double rtn = 0.0;
    for (int bt = 0; bt < 30; ++bt) {
      trial = res.a + alpha * delta;
      rt = prob.residual(trial);
      rtn = rt.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rtn) && rtn < (1.0 - 1e-4 * alpha) * rn) break;
      alpha *= 0.5;
    }
    if (!std::isfinite(rtn)) break;
    res.a = trial;
    r = rt;
    rn = rtn;
    res.iterations = it + 1;
  }
  if (!res.converged && rn < opts.tol) res.converged = true;
  res.residual = rn;
  res.condition = condition_of(prob.jacobian(res.a));
  return res;
}

BranchPoint classify(const SineGalerkin& prob, double lambda, const VectorXd& a) {
  BranchPoint p;
  p.lambda = lambda;
  p.a = a;
  const MatrixXd J = prob.jacobian(a);
  const MatrixXd S = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  p.min_eig = es.eigenvalues()[0];
  p.stable = p.min_eig > 0.0;
  p.condition = condition_of(J);
  p.residual = prob.residual(a).lpNorm<Eigen::Infinity>();
  return p;
}

Branch continue_branch(double eps, int n_modes, double length, double lambda0, const VectorXd& a0,
                       const ContinuationOptions& opts) {
  Branch br;
  auto solve = [&](double lam, const VectorXd& guess) {
    return newton_solve(fold_problem(length, lam, eps, n_modes), guess, opts.newton);
  };
  NewtonResult first = solve(lambda0, a0);
  if (!first.converged) {
    br.stop_reason = "no convergence at the starting point";
    return br;
  }
  br.points.push_back(classify(fold_problem(length, lambda0, eps, n_modes), lambda0, first.a));

  const double dir = opts.step > 0.0 ? 1.0 : -1.0;
  double h = std::abs(opts.step);
  while (true) {
    const BranchPoint& last = br.points.back();
    if (dir * (opts.lambda_end - last.lambda) <= 1e-12) {
      br.stop_reason = "reached end of parameter range";
      break;
    }
    const double lam = last.lambda + dir * std::min(h, std::abs(opts.lambda_end - last.lambda));
    NewtonResult r = solve(lam, last.a);
    const bool jumped = r.converged && (r.a - last.a).lpNorm<Eigen::Infinity>() > opts.max_jump;
    const bool singular = r.converged && r.condition > opts.newton.max_condition;
    if (r.converged && !jumped && !singular) {
      br.points.push_back(classify(fold_problem(length, lam, eps, n_modes), lam, r.a));
      continue;
    }
    if (h * 0.5 < opts.refine_to) {
      br.turned = true;
      br.fold_lambda = last.lambda;
      br.stop_reason = singular ? "jacobian nearly singular" : (jumped ? "branch switch" : "newton failure");
      break;
    }
    h *= 0.5;
  }
  return br;
}

std::vector<VectorXd> multistart(const SineGalerkin& prob, int starts, std::uint64_t seed, double amp_max,
                                 double dedupe) {
  const CounterRng rng(seed);
  const int N = prob.size();
  std::vector<VectorXd> found;
  for (int s = 0; s < starts; ++s) {
    VectorXd a0(N);
    a0[0] = amp_max * rng.uniform(0, s);
    for (int n = 1; n < N; ++n) a0[n] = a0[0] * 0.4 * (rng.uniform(n, s) - 0.5) / (n + 1);
    const NewtonResult r = newton_solve(prob, a0);
    if (!r.converged) continue;
    bool dup = false;
    for (const auto& f : found)
      if ((f - r.a).lpNorm<Eigen::Infinity>() < dedupe) dup = true;
    if (!dup) found.push_back(r.a);
  }
  std::sort(found.begin(), found.end(), [](const VectorXd& x, const VectorXd& y) { return x[0] < y[0]; });
  return found;
}

FoldSteadyStates fold_steady_states(double length, double lambda, double eps, int n_modes, int starts,
                                    std::uint64_t seed) {
  FoldSteadyStates out;
  out.lambda = lambda;
  out.solutions = multistart(fold_problem(length, lambda, eps, n_modes), starts, seed, 12.0);
  return out;
}

BifurcationDiagram bifurcation_diagram(double length, double eps, int n_modes, const ContinuationOptions& opts,
                                       double lambda_start) {
  BifurcationDiagram d;
  const auto start = fold_steady_states(length, lambda_start, eps, n_modes);
  if (start.solutions.empty()) return d;
  d.lower = continue_branch(eps, n_modes, length, lambda_start, start.solutions.front(), opts);
  d.fold_lower = d.lower.fold_lambda;
  if (!d.lower.turned) return d;

  d.seed_lambda = d.fold_lower - 5.0 * std::abs(opts.step);
  const auto seeds = fold_steady_states(length, d.seed_lambda, eps, n_modes);
  d.multiplicity_at_seed = static_cast<int>(seeds.solutions.size());
  if (seeds.solutions.size() < 3) return d;
  ContinuationOptions down = opts;
  down.step = -std::abs(opts.step);
  down.lambda_end = 0.0;
  d.middle_down = continue_branch(eps, n_modes, length, d.seed_lambda, seeds.solutions[1], down);
  d.upper_down = continue_branch(eps, n_modes, length, d.seed_lambda, seeds.solutions[2], down);
  ContinuationOptions up = opts;
  up.step = std::abs(opts.step);
  d.upper_up = continue_branch(eps, n_modes, length, d.seed_lambda, seeds.solutions[2], up);
  return d;
}

std::vector<AllenCahnState> allen_cahn_steady_states(double length, int n_modes) {
  const SineGalerkin prob = allen_cahn_problem(length, n_modes);
  struct Guess {
    const char* name;
    int mode;
    double amp;
  };
  const Guess guesses[] = {{"phi1+", 0, 4.0}, {"phi1-", 0, -4.0}, {"phi2a", 1, 3.0}, {"phi2b", 1, -3.0},
                           {"phi3a", 2, 1.5}, {"phi3b", 2, -1.5}, {"zero", 0, 0.0}};
  std::vector<AllenCahnState> out;
  for (const auto& g : guesses) {
    VectorXd a0 = VectorXd::Zero(n_modes);
    a0[g.mode] = g.amp;
    const NewtonResult r = newton_solve(prob, a0);
    AllenCahnState s;
    s.name = g.name;
    s.a = r.a;
    s.residual = r.residual;
    const double e = r.a.squaredNorm();
    s.fractions = e > 0.0 ? VectorXd(r.a.array().square() / e) : VectorXd(VectorXd::Zero(n_modes));
    s.stable = r.converged && classify(prob, 0.0, r.a).stable;
    if (!r.converged) s.residual = std::numeric_limits<double>::infinity();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace opm
