#include "opm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace opm {

using std::numbers::pi;

UniformGrid::UniformGrid(double length_, int intervals_) : length(length_), intervals(intervals_) {
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
  if (intervals < 2) throw std::invalid_argument("grid needs at least two intervals");
  const double h = length / intervals;
  x.resize(intervals + 1);
  weights.setConstant(intervals + 1, h);
  for (int k = 0; k <= intervals; ++k) x[k] = k * h;
  x[intervals] = length;
  weights[0] = weights[intervals] = 0.5 * h;
}

EigenBasis::EigenBasis(UniformGrid grid, VectorXd eigenvalues, MatrixXd modes, BasisKind kind)
    : grid_(std::move(grid)), eigenvalues_(std::move(eigenvalues)), modes_(std::move(modes)), kind_(kind) {
  if (modes_.rows() != eigenvalues_.size() || modes_.cols() != grid_.nodes())
    throw std::invalid_argument("EigenBasis: mode matrix does not match eigenvalues/grid");
  for (int k = 1; k < size(); ++k)
    if (!(eigenvalues_[k] < eigenvalues_[k - 1]))
      throw std::invalid_argument("EigenBasis: eigenvalues must be strictly decreasing");
  weighted_modes_ = modes_ * grid_.weights.asDiagonal();
}

VectorXd EigenBasis::reconstruct(const VectorXd& coeffs) const {
  const auto m = coeffs.size();
  if (m > size()) throw std::invalid_argument("reconstruct: more coefficients than modes");
  return modes_.topRows(m).transpose() * coeffs;
}

VectorXd EigenBasis::project(const VectorXd& values, int count) const {
  if (values.size() != grid_.nodes()) throw std::invalid_argument("project: grid size mismatch");
  const int m = count < 0 ? size() : count;
  return weighted_modes_.topRows(m) * values;
}

EigenBasis EigenBasis::truncated(int count) const {
  if (count < 1 || count > size()) throw std::invalid_argument("truncated: bad mode count");
  return EigenBasis(grid_, eigenvalues_.head(count), modes_.topRows(count), kind_);
}

SpectralField::SpectralField(BasisPtr basis, VectorXd coeffs, int split)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)), split_(split) {
  if (!basis_) throw std::invalid_argument("SpectralField: null basis");
  if (coeffs_.size() > basis_->size()) throw std::invalid_argument("SpectralField: too many coefficients");
  if (split_ < 0 || split_ > coeffs_.size()) throw std::invalid_argument("SpectralField: bad split index");
}

namespace {

MatrixXd sine_modes(const UniformGrid& grid, int n_modes) {
  MatrixXd modes(n_modes, grid.nodes());
  const double L = grid.length;
  const double amp = std::sqrt(2.0 / L);
  for (int j = 0; j < n_modes; ++j)
    for (int k = 0; k < grid.nodes(); ++k) modes(j, k) = amp * std::sin((j + 1) * pi * grid.x[k] / L);
  // Dirichlet nodes are exactly zero.
  modes.col(0).setZero();
  modes.col(grid.intervals).setZero();
  return modes;
}

void check_sine_args(double length, int n_modes, int grid_intervals) {
  if (!(length > 0.0)) throw std::invalid_argument("sine basis: domain length must be positive");
  if (n_modes < 1) throw std::invalid_argument("sine basis: need at least one mode");
  if (grid_intervals < 4 * n_modes)
    throw std::invalid_argument("sine basis: grid must have at least 4 points per mode");
}

}  // namespace

EigenBasis build_sine_basis(double length, int n_modes, int grid_intervals) {
  check_sine_args(length, n_modes, grid_intervals);
  UniformGrid grid(length, grid_intervals);
  VectorXd lam(n_modes);
  for (int j = 0; j < n_modes; ++j) lam[j] = 1.0 - (j + 1) * (j + 1) * pi * pi / (length * length);
  MatrixXd modes = sine_modes(grid, n_modes);
  return EigenBasis(std::move(grid), std::move(lam), std::move(modes), BasisKind::AnalyticSine);
}

EigenBasis build_dirichlet_sine_basis(double length, int n_modes, int grid_intervals) {
  check_sine_args(length, n_modes, grid_intervals);
  UniformGrid grid(length, grid_intervals);
  VectorXd lam(n_modes);
  for (int j = 0; j < n_modes; ++j) lam[j] = -(j + 1) * (j + 1) * pi * pi / (length * length);
  MatrixXd modes = sine_modes(grid, n_modes);
  return EigenBasis(std::move(grid), std::move(lam), std::move(modes), BasisKind::AnalyticSine);
}

InteractionTensors::InteractionTensors(int resolved, int total, std::vector<double> quad,
                                       std::vector<double> cubic)
    : resolved_(resolved), total_(total), quad_(std::move(quad)), cubic_(std::move(cubic)) {
  const auto n = static_cast<std::size_t>(total);
  if (quad_.size() != n * n * n || cubic_.size() != n * n * n * n)
    throw std::invalid_argument("InteractionTensors: storage size mismatch");
}

InteractionTensors interaction_tensors(const EigenBasis& basis, const VectorXd& weight, int resolved,
                                       int total) {
  if (total < 1 || total > basis.size() || resolved < 0 || resolved > total)
    throw std::invalid_argument("interaction_tensors: index range outside the basis");
  const auto& grid = basis.grid();
  if (weight.size() != 0 && weight.size() != grid.nodes())
    throw std::invalid_argument("interaction_tensors: weight not sampled on the basis grid");

  const std::size_t n = static_cast<std::size_t>(total);
  std::vector<double> quad(n * n * n, 0.0);
  std::vector<double> cubic(n * n * n * n, 0.0);
  const MatrixXd& e = basis.modes();
  const VectorXd& w = grid.weights;

  auto at3 = [n](std::size_t a, std::size_t b, std::size_t c) { return (a * n + b) * n + c; };

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const VectorXd ab = e.row(a).transpose().cwiseProduct(e.row(b).transpose()).cwiseProduct(w);
      if (weight.size() != 0) {
        const VectorXd wab = ab.cwiseProduct(weight);
        for (std::size_t c = 0; c < n; ++c) {
          const double v = wab.dot(e.row(c).transpose());
          // quad(n, i, j): symmetric in (i, j) only
          quad[at3(c, a, b)] = v;
          quad[at3(c, b, a)] = v;
        }
      }
      for (std::size_t c = b; c < n; ++c) {
        const VectorXd abc = ab.cwiseProduct(e.row(c).transpose());
        for (std::size_t d = c; d < n; ++d) {
          const double v = -abc.dot(e.row(d).transpose());
          // Fully symmetric integrand: scatter to all orderings of (a, b, c, d).
          const std::size_t idx[4] = {a, b, c, d};
          int perm[4] = {0, 1, 2, 3};
          do {
            cubic[((idx[perm[0]] * n + idx[perm[1]]) * n + idx[perm[2]]) * n + idx[perm[3]]] = v;
          } while (std::next_permutation(perm, perm + 4));
        }
      }
    }
  }
  return InteractionTensors(resolved, total, std::move(quad), std::move(cubic));
}

double gl_energy(const SpectralField& u) {
  const EigenBasis& basis = u.basis();
  if (basis.kind() != BasisKind::AnalyticSine)
    throw std::invalid_argument("gl_energy: requires an analytic sine basis");
  const auto& grid = basis.grid();
  const double L = grid.length;
  const VectorXd& c = u.coeffs();

  // u_x from the cosine derivatives of the sine modes
  VectorXd ux = VectorXd::Zero(grid.nodes());
  const double amp = std::sqrt(2.0 / L);
  for (int j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    const double kj = (j + 1) * pi / L;
    for (int k = 0; k < grid.nodes(); ++k) ux[k] += c[j] * amp * kj * std::cos(kj * grid.x[k]);
  }
  const VectorXd ug = u.on_grid();
  const VectorXd v = ((ug.array().square() - 1.0).square() * 0.25).matrix();
  return grid.integrate(0.5 * ux.cwiseProduct(ux) + v);
}

}  // namespace opm
