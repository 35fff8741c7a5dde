#pragma once

#include <Eigen/Dense>

namespace derivfpca {

/// Uniform B-spline basis of degree q with c basis functions on
/// [domain_lo, domain_hi]. Knots are equally spaced with step h and extended
/// q intervals beyond each endpoint (c + q + 1 knots in total), so every
/// basis function restricted to the domain is a full polynomial piece and
/// the discrete derivative identity below holds exactly.
struct BSplineBasis {
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  int c = 0;  // number of basis functions
  int q = 0;  // polynomial degree
  Eigen::VectorXd knots;
  double h = 0.0;  // knot spacing
};

BSplineBasis make_basis(double domain_lo, double domain_hi, int c, int q);

/// Basis vector B(t), length c. Nonnegative, at most q+1 nonzero entries,
/// sums to one for t inside the domain.
Eigen::VectorXd eval_basis(const BSplineBasis& basis, double t);

/// Forward difference operator of order l, shape (c-l) x c, integer entries.
/// Row r carries the signed binomial coefficients of order l.
struct DifferenceOperator {
  int l = 0;
  int c = 0;
  Eigen::MatrixXi entries;
  Eigen::MatrixXd dense() const { return entries.cast<double>(); }
};

DifferenceOperator difference_matrix(int l, int c);

/// P = D_l^T D_l. Symmetric PSD with rank c - l; annihilates sequences that
/// are polynomial in the coefficient index of degree < l.
struct PenaltyMatrix {
  int l = 0;
  Eigen::MatrixXd matrix;
};

PenaltyMatrix penalty_matrix(int l, int c);

/// Derivative basis vector B_der(t) = h^{-d} D_d^T B(t; q-d), length c, so
/// that the d-th derivative of a spline with coefficients theta is
/// B_der(t)^T theta. B(.; q-d) is the reduced-degree basis on the same knot
/// vector (the c-d functions that are nonzero on the domain). Requires
/// q >= d + 2 so the derivative of the smoothed covariance stays continuous.
Eigen::VectorXd derivative_basis(const BSplineBasis& basis, int d, double t);

/// Gram matrix G = \int B_der(t) B_der(t)^T dt over the domain, computed
/// exactly by per-interval Gauss-Legendre quadrature (the integrand is a
/// piecewise polynomial of degree 2(q-d)).
///
/// For d = 0 this is positive definite. For d >= 1 it is PSD with nullity d:
/// the derivative basis functions sum to zero pointwise, so coefficient
/// vectors polynomial in the index of degree < d span an exact null space.
struct GramMatrix {
  int d = 0;
  Eigen::MatrixXd matrix;
};

GramMatrix gram_matrix(const BSplineBasis& basis, int d);

/// Row j = B(grid[j])^T; shape J x c.
Eigen::MatrixXd design_matrix(const BSplineBasis& basis, const Eigen::VectorXd& grid);

/// Row j = B_der(grid[j])^T for derivative order d; shape J x c.
Eigen::MatrixXd derivative_design_matrix(const BSplineBasis& basis, int d,
                                         const Eigen::VectorXd& grid);

}  // namespace derivfpca
