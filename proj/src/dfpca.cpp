#include "derivfpca/dfpca.hpp"

#include <cmath>
#include <string>

#include "derivfpca/errors.hpp"
#include "derivfpca/numerics.hpp"

namespace derivfpca {

namespace {

void check_grid_match(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || (a - b).cwiseAbs().maxCoeff() > 1e-12) {
    throw DataError("grid mismatch between sample and fit");
  }
}

int minimal_truncation(const Eigen::VectorXd& nu, double threshold) {
  const double total = nu.sum();
  double cum = 0.0;
  for (Eigen::Index k = 0; k < nu.size(); ++k) {
    cum += nu[k];
    if (cum / total >= threshold) return static_cast<int>(k) + 1;
  }
  return static_cast<int>(nu.size());
}

}  // namespace

DerivEigenSystem eigensystem(const SmootherFit& fit, int d, double threshold) {
  if (!fit.theta_set) throw std::invalid_argument("eigensystem: Theta not estimated");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("variance threshold must lie in (0, 1]");
  }

  const GramMatrix G = gram_matrix(fit.basis, d);
  const Eigen::MatrixXd Ghalf = sym_sqrt(G.matrix);
  const Eigen::MatrixXd Gpinvhalf = sym_pinv_sqrt(G.matrix);

  Eigen::MatrixXd M = Ghalf * fit.Theta * Ghalf;
  M = 0.5 * (M + M.transpose()).eval();
  SymEigen eig = sym_eigen(M);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] < 0.0) eig.values[k] = 0.0;
  }
  if (!(eig.values.sum() > 0.0)) {
    throw NumericError("eigensystem: degenerate covariance, all eigenvalues zero");
  }

  DerivEigenSystem out;
  out.d = d;
  out.nu = eig.values;
  out.alpha = Gpinvhalf * eig.vectors;
  out.K = minimal_truncation(eig.values, threshold);
  out.sigma2 = 0.0;
  out.basis = fit.basis;
  out.G = G;
  return out;
}

DerivCurves curve_derivatives(const FunctionalSample& sample, const SmootherFit& fit, int d) {
  if (!sample.centered) {
    throw std::invalid_argument("curve_derivatives expects a centered sample");
  }
  check_grid_match(sample.grid, fit.grid);
  const Eigen::MatrixXd B = design_matrix(fit.basis, fit.grid);
  const Eigen::MatrixXd Bder = derivative_design_matrix(fit.basis, d, fit.grid);
  // theta_i = A0 Sigma_s A0^T B^T Y_i, all curves at once.
  const Eigen::MatrixXd coeffs =
      fit.A0 * (fit.Sigma_s.asDiagonal() * (fit.A0.transpose() * (B.transpose() * sample.Y)));
  DerivCurves out;
  out.grid = fit.grid;
  out.curves = Bder * coeffs;
  return out;
}

double noise_variance(const DerivCurves& derivs, const SmootherFit& fit, int d, bool* clamped) {
  check_grid_match(derivs.grid, fit.grid);
  const Eigen::Index J = derivs.grid.size();
  const Eigen::Index n = derivs.curves.cols();
  const Eigen::MatrixXd Bder = derivative_design_matrix(fit.basis, d, fit.grid);

  Eigen::VectorXd diff(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    const double raw = derivs.curves.row(j).squaredNorm() / static_cast<double>(n);
    const double smooth = Bder.row(j) * fit.Theta * Bder.row(j).transpose();
    diff[j] = raw - smooth;
  }
  double sigma2 = grid_quadrature(diff, derivs.grid);
  if (clamped) *clamped = false;
  if (sigma2 < 0.0) {
    sigma2 = 0.0;
    if (clamped) *clamped = true;
  }
  return sigma2;
}

Eigen::MatrixXd eigenfunction_values(const DerivEigenSystem& eig, const Eigen::VectorXd& grid,
                                     int count) {
  if (count < 1 || count > eig.alpha.cols()) {
    throw std::invalid_argument("eigenfunction_values: count out of range");
  }
  const Eigen::MatrixXd Bder = derivative_design_matrix(eig.basis, eig.d, grid);
  return Bder * eig.alpha.leftCols(count);
}

ScoreSet scores(const DerivCurves& derivs, const DerivEigenSystem& eig,
                const Eigen::VectorXd& grid) {
  const int K = eig.K;
  if (K < 1) throw std::invalid_argument("scores: truncation K must be >= 1");
  check_grid_match(derivs.grid, grid);

  const Eigen::MatrixXd Phi = eigenfunction_values(eig, grid, K);
  const Eigen::VectorXd nu = eig.nu.head(K);

  Eigen::MatrixXd normal = Phi.transpose() * Phi;
  if (eig.sigma2 > 0.0) {
    const double floor = 1e-12 * eig.nu[0];
    for (int k = 0; k < K; ++k) {
      normal(k, k) += eig.sigma2 / std::max(nu[k], floor);
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> solver(normal);
  if (solver.info() != Eigen::Success || !solver.isPositive()) {
    throw NumericError("scores: singular normal matrix in the mixed-model solve");
  }

  ScoreSet out;
  out.xi = solver.solve(Phi.transpose() * derivs.curves).transpose();
  out.nu_used = nu;
  out.sigma2 = eig.sigma2;
  return out;
}

DerivCurves reconstruct(const ScoreSet& score_set, const DerivEigenSystem& eig,
                        const Eigen::VectorXd& grid) {
  const int K = static_cast<int>(score_set.xi.cols());
  const Eigen::MatrixXd Phi = eigenfunction_values(eig, grid, K);
  DerivCurves out;
  out.grid = grid;
  out.curves = Phi * score_set.xi.transpose();
  return out;
}

DfpcaResult fit_dfpca(const Eigen::VectorXd& grid, const Eigen::MatrixXd& Y,
                      const DfpcaOptions& options) {
  if (options.q < options.d + 2) {
    throw std::invalid_argument("fit_dfpca requires q >= d + 2, got q=" +
                                std::to_string(options.q) + ", d=" + std::to_string(options.d));
  }
  if (grid.size() != Y.rows()) {
    throw DataError("fit_dfpca: grid length must match rows of Y");
  }

  DfpcaResult res;
  res.basis = make_basis(grid[0], grid[grid.size() - 1], options.c, options.q);
  const PenaltyMatrix P1 = penalty_matrix(options.l1, options.c);
  const PenaltyMatrix P2 = penalty_matrix(options.l2, options.c);

  FunctionalSample sample;
  sample.grid = grid;
  sample.Y = Y;
  res.centered = center_sample(sample, res.basis, options.lambda_grid);

  res.gcv = select_smoothing(res.centered, res.basis, P1, P2, options.lambda_grid,
                             options.w_grid, options.jobs);
  res.fit = lemma1_components(res.basis, P1, P2, res.gcv.lambda_opt, res.gcv.w_opt, grid);
  res.fit.d = options.d;
  res.fit = estimate_theta(std::move(res.fit), sample_covariance(res.centered));

  res.eig = eigensystem(res.fit, options.d, options.threshold);
  res.derivs = curve_derivatives(res.centered, res.fit, options.d);
  res.eig.sigma2 = noise_variance(res.derivs, res.fit, options.d, &res.sigma2_clamped);
  res.score_set = scores(res.derivs, res.eig, grid);
  return res;
}

}  // namespace derivfpca
