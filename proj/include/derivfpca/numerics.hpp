#pragma once

#include <Eigen/Dense>

namespace derivfpca {

/// Dense symmetric eigendecomposition, eigenvalues sorted descending.
/// Sign convention: in each eigenvector the entry of largest magnitude is
/// positive (first such entry on ties), so repeated runs are bit-identical.
struct SymEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Decompose (M + M^T)/2. M must be symmetric to 1e-8 relative; non-finite
/// entries raise NumericError.
SymEigen sym_eigen(const Eigen::MatrixXd& M);

/// M^{-1/2} for symmetric positive definite M. Eigenvalues below
/// 1e-10 * max eigenvalue raise a NumericError naming the offending value.
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& M);

/// M^{1/2} for symmetric PSD M; eigenvalues in (-1e-10 * trace, 0) are
/// clamped to zero, anything more negative raises NumericError.
Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& M);

/// Pseudo-inverse square root: eigenvalues <= rcond * max eigenvalue are
/// treated as exact zeros and dropped instead of inverted. Used where the
/// matrix has a structural null space (the derivative-basis Gram matrix).
Eigen::MatrixXd sym_pinv_sqrt(const Eigen::MatrixXd& M, double rcond = 1e-10);

/// Composite trapezoid rule over a strictly increasing grid.
double grid_quadrature(const Eigen::VectorXd& values, const Eigen::VectorXd& grid);

}  // namespace derivfpca
