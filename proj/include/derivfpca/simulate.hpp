#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "derivfpca/face.hpp"

namespace derivfpca {

enum class Setting { DenseClean, DenseNoisy, SparseNoisy };

Setting parse_setting(const std::string& name);
std::string setting_name(Setting setting);

/// One curve's random coefficients: a ~ N(0,1), b ~ N(0.5, 0.0196),
/// c ~ N(3.75, 0.49), all pairwise correlations 0.2.
struct CoefficientDraw {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Correlated trivariate normal draws through the Cholesky factor of the
/// stated covariance; deterministic given the seed.
std::vector<CoefficientDraw> draw_coefficients(int n, std::uint64_t seed);

/// Closed-form curve and derivative values at one time point.
struct CurvePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double dx1 = 0.0;
  double dx2 = 0.0;
};

/// Evaluate both curve families and their analytic first derivatives.
/// Raises NumericError when the denominator of the first family drops below
/// 1e-8 in magnitude (degenerate draw).
CurvePoint eval_curves(const CoefficientDraw& coeffs, double t);

/// One simulated dataset: two components on [0,1], their observations
/// (NaN marks a missing entry in the sparse setting), the analytic
/// derivative curves, and the coefficient draws that generated them.
struct SimReplicate {
  Setting setting = Setting::DenseClean;
  std::vector<Eigen::VectorXd> grids;
  std::vector<Eigen::MatrixXd> Y;        // per component, J x n
  std::vector<Eigen::MatrixXd> dX_true;  // per component, J x n, always dense
  std::vector<CoefficientDraw> coeffs;
  std::uint64_t seed = 0;
  int components = 2;
};

/// Generate a replicate: n curves on J equidistant points of [0,1].
/// Noisy settings add N(0, 0.25) measurement error; the sparse setting
/// removes a uniformly drawn 40-50% of each curve's observations completely
/// at random. Coefficient draws whose first-family denominator degenerates
/// anywhere on the grid are rejected and redrawn.
SimReplicate make_replicate(Setting setting, int n = 100, int J = 101,
                            std::uint64_t seed = 1, int components = 2);

/// Replace missing entries curve by curve with a penalized-spline
/// interpolant (order-2 difference penalty, lambda by 1-D GCV on the
/// observed points); observed entries are kept as-is. Curves with fewer
/// than q+2 observations raise DataError.
SimReplicate fill_sparse(const SimReplicate& replicate, int c = 38, int q = 3,
                         const LambdaGridSpec& lambdas = LambdaGridSpec{});

}  // namespace derivfpca
