#pragma once

#include <Eigen/Dense>

#include "derivfpca/face.hpp"
#include "derivfpca/splinebasis.hpp"

namespace derivfpca {

/// Derivative-based eigencomponents: eigenvalues nu of G^{1/2} Theta G^{1/2},
/// coefficient vectors alpha_k = G^{-1/2} Q_k (pseudo-inverse square root;
/// see gram_matrix on the null space of G for d >= 1), the smallest K whose
/// eigenvalues cover the variance threshold, and the noise variance.
/// Eigenfunctions evaluate as phi_k(t) = B_der(t)^T alpha_k.
struct DerivEigenSystem {
  int d = 1;
  Eigen::VectorXd nu;     // length c, descending, >= 0
  Eigen::MatrixXd alpha;  // c x c, column k = alpha_k
  int K = 0;              // truncation at the variance threshold
  double sigma2 = 0.0;
  BSplineBasis basis;
  GramMatrix G;
};

/// Per-curve smoothed derivative trajectories Y_i^d on the fit grid.
struct DerivCurves {
  Eigen::VectorXd grid;
  Eigen::MatrixXd curves;  // J x n
};

/// Scores xi (n x K) from the mixed-model equations, with the eigenvalues
/// and noise variance they were computed under.
struct ScoreSet {
  Eigen::MatrixXd xi;
  Eigen::VectorXd nu_used;
  double sigma2 = 0.0;
};

/// Eigendecompose G^{1/2} Theta G^{1/2} instead of the J x J derivative
/// surface; the spectrum of the smoothed derivative-covariance operator is
/// obtained without ever forming its eigendecomposition. sigma2 is left at
/// zero here and filled in from noise_variance by the caller.
DerivEigenSystem eigensystem(const SmootherFit& fit, int d, double threshold = 0.95);

/// Smooth each curve (theta_i = A0 Sigma_s A0^T B^T Y_i) and evaluate the
/// derivative basis: Y_i^d = B_der theta_i, vectorized over curves.
DerivCurves curve_derivatives(const FunctionalSample& sample, const SmootherFit& fit, int d);

/// sigma^2 = integral over the grid of the difference between the diagonals
/// of the raw derivative covariance n^{-1} Y^d (Y^d)^T and the smoothed
/// surface B_der^T Theta B_der, clamped at zero. When clamping occurred and
/// `clamped` is non-null it is set to true.
double noise_variance(const DerivCurves& derivs, const SmootherFit& fit, int d,
                      bool* clamped = nullptr);

/// Eigenfunctions evaluated on a grid: column k = phi_k(grid), k < count.
Eigen::MatrixXd eigenfunction_values(const DerivEigenSystem& eig, const Eigen::VectorXd& grid,
                                     int count);

/// Mixed-model score estimates xi_i = (Phi^T Phi + sigma^2 V^{-1})^{-1} Phi^T Y_i^d
/// with Phi the first K eigenfunctions on the grid and V = diag(nu_1..nu_K)
/// (floored at 1e-12 nu_1 inside the inverse). Inner products are plain sums
/// over grid points. At sigma^2 = 0 this is ordinary least squares onto Phi.
ScoreSet scores(const DerivCurves& derivs, const DerivEigenSystem& eig,
                const Eigen::VectorXd& grid);

/// Truncated Karhunen-Loeve reconstruction: Y^d_i(t) = sum_k xi_ik phi_k(t).
DerivCurves reconstruct(const ScoreSet& score_set, const DerivEigenSystem& eig,
                        const Eigen::VectorXd& grid);

/// End-to-end options for one univariate component.
struct DfpcaOptions {
  int c = 38;
  int q = 3;
  int d = 1;
  int l1 = 2;
  int l2 = 3;
  LambdaGridSpec lambda_grid;
  WGridSpec w_grid;
  double threshold = 0.95;
  int jobs = 1;
};

/// Everything produced by one univariate derivative-FPCA fit.
struct DfpcaResult {
  BSplineBasis basis;
  FunctionalSample centered;
  GcvGrid gcv;
  SmootherFit fit;
  DerivEigenSystem eig;
  DerivCurves derivs;
  ScoreSet score_set;
  bool sigma2_clamped = false;
};

/// Center, select (lambda_plus, w) by GCV, estimate Theta, extract the
/// derivative eigensystem, noise variance and scores.
DfpcaResult fit_dfpca(const Eigen::VectorXd& grid, const Eigen::MatrixXd& Y,
                      const DfpcaOptions& options = DfpcaOptions{});

}  // namespace derivfpca
