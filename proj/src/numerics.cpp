#include "derivfpca/numerics.hpp"

#include <cmath>
#include <string>

#include "derivfpca/errors.hpp"

namespace derivfpca {

namespace {

// Shared backend: symmetrize, decompose, sort descending, fix signs.
SymEigen decompose(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("sym_eigen requires a square matrix");
  }
  if (!M.allFinite()) {
    throw NumericError("sym_eigen input has non-finite entries");
  }
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-8 * scale) {
    throw std::invalid_argument("sym_eigen input asymmetric beyond 1e-8 relative");
  }
  const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed to converge");
  }

  const Eigen::Index n = M.rows();
  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()[n - 1 - k];
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1 - k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    out.vectors.col(k) = v;
  }
  return out;
}

}  // namespace

SymEigen sym_eigen(const Eigen::MatrixXd& M) { return decompose(M); }

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& M) {
  const SymEigen e = decompose(M);
  const double max_ev = e.values[0];
  const double threshold = 1e-10 * max_ev;
  if (!(max_ev > 0.0)) {
    throw NumericError("sym_inv_sqrt: matrix not positive definite (max eigenvalue " +
                       std::to_string(max_ev) + ")");
  }
  Eigen::VectorXd inv_sqrt(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] < threshold) {
      throw NumericError("sym_inv_sqrt: matrix nearly singular, eigenvalue " +
                         std::to_string(e.values[k]) + " below threshold " +
                         std::to_string(threshold));
    }
    inv_sqrt[k] = 1.0 / std::sqrt(e.values[k]);
  }
  return e.vectors * inv_sqrt.asDiagonal() * e.vectors.transpose();
}

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& M) {
  const SymEigen e = decompose(M);
  const double tol = 1e-10 * std::abs(M.trace());
  Eigen::VectorXd root(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    double v = e.values[k];
    if (v < 0.0) {
      if (v < -tol) {
        throw NumericError("sym_sqrt: eigenvalue " + std::to_string(v) +
                           " too negative for a PSD matrix");
      }
      v = 0.0;
    }
    root[k] = std::sqrt(v);
  }
  return e.vectors * root.asDiagonal() * e.vectors.transpose();
}

Eigen::MatrixXd sym_pinv_sqrt(const Eigen::MatrixXd& M, double rcond) {
  const SymEigen e = decompose(M);
  const double max_ev = e.values.size() > 0 ? e.values[0] : 0.0;
  if (!(max_ev > 0.0)) {
    throw NumericError("sym_pinv_sqrt: matrix has no positive eigenvalues");
  }
  const double threshold = rcond * max_ev;
  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > threshold) inv_sqrt[k] = 1.0 / std::sqrt(e.values[k]);
  }
  return e.vectors * inv_sqrt.asDiagonal() * e.vectors.transpose();
}

double grid_quadrature(const Eigen::VectorXd& values, const Eigen::VectorXd& grid) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("grid_quadrature: length mismatch (" +
                                std::to_string(values.size()) + " values vs " +
                                std::to_string(grid.size()) + " grid points)");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < grid.size(); ++j) {
    const double dt = grid[j + 1] - grid[j];
    if (!(dt > 0.0)) {
      throw std::invalid_argument("grid_quadrature: grid must be strictly increasing");
    }
    sum += 0.5 * dt * (values[j] + values[j + 1]);
  }
  return sum;
}

}  // namespace derivfpca
