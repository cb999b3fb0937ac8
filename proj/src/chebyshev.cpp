#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "opm/error.hpp"
#include "opm/spectral.hpp"

namespace opm {

namespace {

using std::numbers::pi;

// Chebyshev-Gauss-Lobatto nodes x_j = cos(j pi / n) and the standard
// differentiation matrix on [-1, 1].
void cheb(int n, VectorXd& x, MatrixXd& d) {
  x.resize(n + 1);
  for (int j = 0; j <= n; ++j) x[j] = std::cos(pi * j / n);
  VectorXd c = VectorXd::Ones(n + 1);
  c[0] = c[n] = 2.0;
  d.resize(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = (c[i] / c[j]) * sign / (x[i] - x[j]);
    }
  }
  // negative-sum trick for the diagonal
  for (int i = 0; i <= n; ++i) d(i, i) = -(d.row(i).sum() - d(i, i) * 0.0);
  for (int i = 0; i <= n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j)
      if (j != i) s += d(i, j);
    d(i, i) = -s;
  }
}

struct Collocation {
  VectorXd nodes;          // physical nodes on [0, L], Chebyshev order
  VectorXd eigenvalues;    // decreasing
  MatrixXd eigenvectors;   // columns, full length incl. boundary zeros
};

Collocation solve_collocation(const std::function<double(double)>& steady_state,
                              const LinearizedBasisOptions& opts) {
  if (opts.cheb_points < 32) throw std::invalid_argument("linearized basis: need at least 32 Chebyshev points");
  if (!(opts.length > 0.0)) throw std::invalid_argument("linearized basis: domain length must be positive");
  const int n = opts.cheb_points;
  VectorXd x;
  MatrixXd d;
  cheb(n, x, d);
  const double L = opts.length;
  // x in [-1, 1] -> X = L (1 - x) / 2 in [0, L]; d/dX = -(2 / L) d/dx
  VectorXd nodes = (L * 0.5) * (VectorXd::Ones(n + 1) - x);
  MatrixXd d2 = (4.0 / (L * L)) * (d * d);

  const int m = n - 1;
  MatrixXd op = d2.block(1, 1, m, m);
  for (int i = 0; i < m; ++i) {
    const double u = steady_state(nodes[i + 1]);
    op(i, i) += opts.lambda * (2.0 * u - 3.0 * opts.eps * u * u);
  }

  Eigen::EigenSolver<MatrixXd> es(op, true);
  if (es.info() != Eigen::Success) throw NumericalError("linearized basis: eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  const auto& evec = es.eigenvectors();

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ev[a].real() > ev[b].real(); });

  Collocation out;
  out.nodes = nodes;
  const int keep = std::min(opts.n_modes, m);
  out.eigenvalues.resize(m);
  out.eigenvectors.setZero(n + 1, keep);
  for (int r = 0; r < m; ++r) out.eigenvalues[r] = ev[order[r]].real();
  for (int r = 0; r < keep; ++r) {
    const auto lam = ev[order[r]];
    if (std::abs(lam.imag()) > 1e-8 * std::max(1.0, std::abs(lam.real())))
      throw NumericalError("linearized basis: complex eigenvalue in a self-adjoint problem");
    const auto v = evec.col(order[r]);
    double vmax = v.cwiseAbs().maxCoeff();
    if (v.imag().cwiseAbs().maxCoeff() > 1e-6 * vmax) {
      // Rotate the phase to make the vector real (eigenvectors are defined
      // up to a complex scalar).
      int imax = 0;
      v.cwiseAbs().maxCoeff(&imax);
      const auto phase = v[imax] / std::abs(v[imax]);
      const Eigen::VectorXcd w = v / phase;
      if (w.imag().cwiseAbs().maxCoeff() > 1e-6 * vmax)
        throw NumericalError("linearized basis: complex eigenvector in a self-adjoint problem");
      out.eigenvectors.col(r).segment(1, m) = w.real();
    } else {
      out.eigenvectors.col(r).segment(1, m) = v.real();
    }
  }
  return out;
}

// Barycentric interpolation from Chebyshev-Lobatto nodes.
VectorXd barycentric(const VectorXd& nodes, const VectorXd& values, const VectorXd& targets) {
  const int n = static_cast<int>(nodes.size()) - 1;
  VectorXd w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
  VectorXd out(targets.size());
  for (int t = 0; t < targets.size(); ++t) {
    double num = 0.0, den = 0.0;
    bool exact = false;
    for (int j = 0; j <= n; ++j) {
      const double diff = targets[t] - nodes[j];
      if (diff == 0.0) {
        out[t] = values[j];
        exact = true;
        break;
      }
      const double c = w[j] / diff;
      num += c * values[j];
      den += c;
    }
    if (!exact) out[t] = num / den;
  }
  return out;
}

}  // namespace

VectorXd linearized_spectrum(const std::function<double(double)>& steady_state,
                             const LinearizedBasisOptions& opts) {
  return solve_collocation(steady_state, opts).eigenvalues;
}

EigenBasis build_linearized_basis(const std::function<double(double)>& steady_state,
                                  const LinearizedBasisOptions& opts) {
  if (opts.n_modes < 1) throw std::invalid_argument("linearized basis: need at least one mode");
  if (opts.n_modes > opts.cheb_points / 2)
    throw std::invalid_argument("linearized basis: more modes requested than the collocation resolves");
  const Collocation col = solve_collocation(steady_state, opts);
  UniformGrid grid(opts.length, opts.grid_intervals);

  const int m = opts.n_modes;
  MatrixXd modes(m, grid.nodes());
  for (int r = 0; r < m; ++r) {
    VectorXd v = barycentric(col.nodes, col.eigenvectors.col(r), grid.x);
    v[0] = v[grid.intervals] = 0.0;
    // Gram-Schmidt against already accepted modes under the grid inner product
    for (int p = 0; p < r; ++p) {
      const VectorXd ep = modes.row(p).transpose();
      v -= grid.integrate(v.cwiseProduct(ep)) * ep;
    }
    const double nrm = std::sqrt(grid.integrate(v.cwiseProduct(v)));
    if (!(nrm > 0.0)) throw NumericalError("linearized basis: degenerate resampled mode");
    v /= nrm;
    const double vmax = v.cwiseAbs().maxCoeff();
    for (int k = 0; k < v.size(); ++k) {
      if (std::abs(v[k]) > 1e-8 * vmax) {
        if (v[k] < 0.0) v = -v;
        break;
      }
    }
    modes.row(r) = v.transpose();
  }
  return EigenBasis(std::move(grid), col.eigenvalues.head(m), std::move(modes), BasisKind::Collocation);
}

}  // namespace opm
