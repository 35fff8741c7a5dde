#pragma once

#include <Eigen/Dense>
#include <optional>

#include "derivfpca/splinebasis.hpp"

namespace derivfpca {

/// Functional data on a common grid. Column i of Y is curve i evaluated at
/// the grid points.
struct FunctionalSample {
  Eigen::VectorXd grid;  // length J, strictly increasing
  Eigen::MatrixXd Y;     // J x n
  bool centered = false;
  std::optional<Eigen::VectorXd> mean_coeffs;  // spline coefficients of the removed mean
};

/// Fitted smoother components for one dataset at a given (lambda_plus, w):
/// the eigendecomposition U diag(s) U^T of
///   (B^T B)^{-1/2} (w P1 + (1-w) P2) (B^T B)^{-1/2},
/// the factor A0 = (B^T B)^{-1/2} U, the orthonormal-column matrix
/// As = B A0, the shrinkage weights Sigma_s = 1/(1 + lambda_plus s), and
/// (once estimated) the covariance coefficient matrix Theta, so that the
/// smoothed covariance surface is B(s)^T Theta B(t).
struct SmootherFit {
  BSplineBasis basis;
  Eigen::VectorXd grid;
  int d = 1;  // derivative order this fit is intended for
  double lambda_plus = 0.0;
  double w = 1.0;
  Eigen::MatrixXd U;        // c x c eigenvectors
  Eigen::VectorXd s;        // c eigenvalues, descending, >= 0
  Eigen::MatrixXd A0;       // c x c
  Eigen::MatrixXd As;       // J x c, orthonormal columns
  Eigen::VectorXd Sigma_s;  // c shrinkage factors in (0, 1]
  Eigen::MatrixXd Theta;    // c x c, symmetric PSD; empty until estimated
  bool theta_set = false;
};

struct LambdaGridSpec {
  double min = 1e-6;
  double max = 1e6;
  int count = 25;  // log-spaced
};

struct WGridSpec {
  int count = 11;  // uniform on [0, 1]
};

/// GCV scores over the (lambda_plus, w) grid; scores(i, j) corresponds to
/// lambda_values[i] and w_values[j]. Ties are broken toward larger
/// lambda_plus, then larger w.
struct GcvGrid {
  Eigen::VectorXd lambda_values;
  Eigen::VectorXd w_values;
  Eigen::MatrixXd scores;
  double lambda_opt = 0.0;
  double w_opt = 0.0;
};

/// Fit the pointwise mean curve with a single-penalty P-spline (order-2
/// difference penalty, lambda chosen by 1-D GCV), subtract it from every
/// column, and record the mean coefficients.
FunctionalSample center_sample(const FunctionalSample& sample, const BSplineBasis& basis,
                               const LambdaGridSpec& lambdas = LambdaGridSpec{});

/// K_hat = Y Y^T / n for a centered sample.
Eigen::MatrixXd sample_covariance(const FunctionalSample& sample);

/// Smoother components at one (lambda_plus, w); Theta left unset.
SmootherFit lemma1_components(const BSplineBasis& basis, const PenaltyMatrix& P1,
                              const PenaltyMatrix& P2, double lambda_plus, double w,
                              const Eigen::VectorXd& grid);

/// Fast GCV evaluation from precomputed Ys = As^T Y:
///
///   [ sum_k C_kk (l s_k)^2/(1 + l s_k)^2 - |Ys|_F^2 + |Y|_F^2 ]
///   / [ 1 - J^{-1} sum_k (1 + l s_k)^{-1} ]^2
///
/// which equals sum_i |Y_i - S Y_i|^2 / (1 - tr(S)/J)^2 exactly. Raises
/// NumericError when tr(S) >= J (degenerate smoother).
double gcv_score(const SmootherFit& fit, const Eigen::MatrixXd& Ys, double Y_frobsq,
                 int J, double lambda_plus);

/// Grid search of the GCV over (lambda_plus, w). One eigendecomposition is
/// shared by all lambda values at a fixed w; with jobs > 1 the w columns are
/// evaluated on separate threads.
GcvGrid select_smoothing(const FunctionalSample& sample, const BSplineBasis& basis,
                         const PenaltyMatrix& P1, const PenaltyMatrix& P2,
                         const LambdaGridSpec& lambdas = LambdaGridSpec{},
                         const WGridSpec& ws = WGridSpec{}, int jobs = 1);

/// Theta = A0 Sigma_s A0^T B^T K_hat B A0 Sigma_s A0^T, symmetrized, with
/// slightly negative eigenvalues (above -1e-10 * trace) clamped to zero.
SmootherFit estimate_theta(SmootherFit fit, const Eigen::MatrixXd& Khat);

/// Smoothed covariance surface K~(s, t) = B(s)^T Theta B(t).
Eigen::MatrixXd covariance_surface(const SmootherFit& fit, const Eigen::VectorXd& s_grid,
                                   const Eigen::VectorXd& t_grid);

/// Derivative surface d^d d^d K~(s, t) = B_der(s)^T Theta B_der(t).
Eigen::MatrixXd derivative_covariance_surface(const SmootherFit& fit, int d,
                                              const Eigen::VectorXd& s_grid,
                                              const Eigen::VectorXd& t_grid);

}  // namespace derivfpca
