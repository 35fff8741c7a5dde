#include "derivfpca/face.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "derivfpca/errors.hpp"
#include "derivfpca/numerics.hpp"

namespace derivfpca {

namespace {

Eigen::VectorXd log_spaced(const LambdaGridSpec& spec) {
  if (spec.count < 1 || !(spec.min > 0.0) || !(spec.max >= spec.min)) {
    throw std::invalid_argument("lambda grid requires 0 < min <= max and count >= 1");
  }
  Eigen::VectorXd values(spec.count);
  if (spec.count == 1) {
    values[0] = spec.min;
    return values;
  }
  const double step = (std::log(spec.max) - std::log(spec.min)) / (spec.count - 1);
  for (int i = 0; i < spec.count; ++i) values[i] = std::exp(std::log(spec.min) + i * step);
  return values;
}

Eigen::VectorXd uniform_w(const WGridSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("w grid requires count >= 1");
  Eigen::VectorXd values(spec.count);
  if (spec.count == 1) {
    values[0] = 1.0;
    return values;
  }
  for (int i = 0; i < spec.count; ++i) values[i] = static_cast<double>(i) / (spec.count - 1);
  return values;
}

// Eigendecomposition of (B^T B)^{-1/2} (w P1 + (1-w) P2) (B^T B)^{-1/2} and
// the derived factors; shared by every lambda at a fixed w.
struct PenaltyEigenParts {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd A0;
  Eigen::MatrixXd As;
};

PenaltyEigenParts penalty_eigen(const Eigen::MatrixXd& B, const Eigen::MatrixXd& btb_inv_sqrt,
                                const PenaltyMatrix& P1, const PenaltyMatrix& P2, double w) {
  const Eigen::MatrixXd penalty = w * P1.matrix + (1.0 - w) * P2.matrix;
  Eigen::MatrixXd M = btb_inv_sqrt * penalty * btb_inv_sqrt;
  M = 0.5 * (M + M.transpose()).eval();
  SymEigen eig = sym_eigen(M);
  // The penalty is PSD; tiny negative eigenvalues are rounding.
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] < 0.0) eig.values[k] = 0.0;
  }
  PenaltyEigenParts parts;
  parts.U = eig.vectors;
  parts.s = eig.values;
  parts.A0 = btb_inv_sqrt * eig.vectors;
  parts.As = B * parts.A0;
  return parts;
}

Eigen::VectorXd shrinkage(const Eigen::VectorXd& s, double lambda_plus) {
  return (1.0 + lambda_plus * s.array()).inverse().matrix();
}

Eigen::MatrixXd btb_inv_sqrt_for_grid(const Eigen::MatrixXd& B) {
  try {
    return sym_inv_sqrt(B.transpose() * B);
  } catch (const NumericError& e) {
    throw NumericError(std::string("B^T B singular (grid too sparse for c): ") + e.what());
  }
}

void check_params(double lambda_plus, double w) {
  if (!(lambda_plus >= 0.0)) throw std::invalid_argument("lambda_plus must be >= 0");
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in [0, 1]");
}

}  // namespace

FunctionalSample center_sample(const FunctionalSample& sample, const BSplineBasis& basis,
                               const LambdaGridSpec& lambdas) {
  if (sample.centered) {
    throw std::invalid_argument("center_sample expects an uncentered sample");
  }
  if (sample.Y.cols() < 1) throw std::invalid_argument("center_sample: empty sample");

  const Eigen::VectorXd mean = sample.Y.rowwise().mean();
  const Eigen::MatrixXd B = design_matrix(basis, sample.grid);
  const Eigen::MatrixXd R = btb_inv_sqrt_for_grid(B);
  const PenaltyMatrix P = penalty_matrix(2, basis.c);
  const PenaltyEigenParts parts = penalty_eigen(B, R, P, P, 1.0);

  // 1-D GCV over lambda for the mean curve (a single-column sample).
  const Eigen::VectorXd lambda_values = log_spaced(lambdas);
  const Eigen::MatrixXd ys = parts.As.transpose() * mean;
  const double frobsq = mean.squaredNorm();
  const int J = static_cast<int>(sample.grid.size());

  SmootherFit probe;
  probe.s = parts.s;
  double best = std::numeric_limits<double>::infinity();
  double lambda_opt = lambda_values[0];
  for (Eigen::Index i = 0; i < lambda_values.size(); ++i) {
    double score;
    try {
      score = gcv_score(probe, ys, frobsq, J, lambda_values[i]);
    } catch (const NumericError&) {
      continue;
    }
    if (score <= best) {
      best = score;
      lambda_opt = lambda_values[i];
    }
  }
  if (!std::isfinite(best)) {
    throw NumericError("center_sample: GCV degenerate at every lambda");
  }

  const Eigen::VectorXd sigma = shrinkage(parts.s, lambda_opt);
  const Eigen::VectorXd coeffs =
      parts.A0 * (sigma.asDiagonal() * (parts.A0.transpose() * (B.transpose() * mean)));
  const Eigen::VectorXd mean_curve = B * coeffs;

  FunctionalSample out = sample;
  out.Y.colwise() -= mean_curve;
  out.centered = true;
  out.mean_coeffs = coeffs;
  return out;
}

Eigen::MatrixXd sample_covariance(const FunctionalSample& sample) {
  if (!sample.centered) {
    throw std::invalid_argument("sample_covariance expects a centered sample");
  }
  const Eigen::Index n = sample.Y.cols();
  if (n == 0) throw std::invalid_argument("sample_covariance: n = 0");
  return (sample.Y * sample.Y.transpose()) / static_cast<double>(n);
}

SmootherFit lemma1_components(const BSplineBasis& basis, const PenaltyMatrix& P1,
                              const PenaltyMatrix& P2, double lambda_plus, double w,
                              const Eigen::VectorXd& grid) {
  check_params(lambda_plus, w);
  const Eigen::MatrixXd B = design_matrix(basis, grid);
  const Eigen::MatrixXd R = btb_inv_sqrt_for_grid(B);
  const PenaltyEigenParts parts = penalty_eigen(B, R, P1, P2, w);

  SmootherFit fit;
  fit.basis = basis;
  fit.grid = grid;
  fit.lambda_plus = lambda_plus;
  fit.w = w;
  fit.U = parts.U;
  fit.s = parts.s;
  fit.A0 = parts.A0;
  fit.As = parts.As;
  fit.Sigma_s = shrinkage(parts.s, lambda_plus);
  return fit;
}

double gcv_score(const SmootherFit& fit, const Eigen::MatrixXd& Ys, double Y_frobsq,
                 int J, double lambda_plus) {
  const Eigen::VectorXd& s = fit.s;
  double numerator = Y_frobsq - Ys.squaredNorm();
  double trace_S = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double ls = lambda_plus * s[k];
    const double c_kk = Ys.row(k).squaredNorm();
    numerator += c_kk * (ls * ls) / ((1.0 + ls) * (1.0 + ls));
    trace_S += 1.0 / (1.0 + ls);
  }
  const double margin = 1.0 - trace_S / J;
  if (!(margin > 0.0)) {
    throw NumericError("degenerate smoother: tr(S) = " + std::to_string(trace_S) +
                       " >= J = " + std::to_string(J));
  }
  return numerator / (margin * margin);
}

GcvGrid select_smoothing(const FunctionalSample& sample, const BSplineBasis& basis,
                         const PenaltyMatrix& P1, const PenaltyMatrix& P2,
                         const LambdaGridSpec& lambdas, const WGridSpec& ws, int jobs) {
  if (!sample.centered) {
    throw std::invalid_argument("select_smoothing expects a centered sample");
  }
  GcvGrid grid;
  grid.lambda_values = log_spaced(lambdas);
  grid.w_values = uniform_w(ws);
  const Eigen::Index nl = grid.lambda_values.size();
  const Eigen::Index nw = grid.w_values.size();
  grid.scores.setConstant(nl, nw, std::numeric_limits<double>::quiet_NaN());

  const Eigen::MatrixXd B = design_matrix(basis, sample.grid);
  const Eigen::MatrixXd R = btb_inv_sqrt_for_grid(B);
  const double frobsq = sample.Y.squaredNorm();
  const int J = static_cast<int>(sample.grid.size());

  auto scan_w = [&](Eigen::Index j) {
    const PenaltyEigenParts parts = penalty_eigen(B, R, P1, P2, grid.w_values[j]);
    const Eigen::MatrixXd Ys = parts.As.transpose() * sample.Y;
    SmootherFit probe;
    probe.s = parts.s;
    for (Eigen::Index i = 0; i < nl; ++i) {
      try {
        grid.scores(i, j) = gcv_score(probe, Ys, frobsq, J, grid.lambda_values[i]);
      } catch (const NumericError&) {
        // degenerate cell, left as NaN
      }
    }
  };

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(nw)));
  if (workers == 1) {
    for (Eigen::Index j = 0; j < nw; ++j) scan_w(j);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t]() {
        for (Eigen::Index j = t; j < nw; j += workers) scan_w(j);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Minimize; ties resolved toward larger lambda_plus, then larger w.
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (Eigen::Index i = 0; i < nl; ++i) {
    for (Eigen::Index j = 0; j < nw; ++j) {
      const double v = grid.scores(i, j);
      if (std::isnan(v)) continue;
      if (!found || v <= best) {
        best = v;
        grid.lambda_opt = grid.lambda_values[i];
        grid.w_opt = grid.w_values[j];
        found = true;
      }
    }
  }
  if (!found) throw NumericError("select_smoothing: all grid points degenerate");
  return grid;
}

SmootherFit estimate_theta(SmootherFit fit, const Eigen::MatrixXd& Khat) {
  const Eigen::MatrixXd B = design_matrix(fit.basis, fit.grid);
  if (Khat.rows() != B.rows() || Khat.cols() != B.rows()) {
    throw std::invalid_argument("estimate_theta: K_hat must be J x J on the fit grid");
  }
  const Eigen::MatrixXd W = fit.A0 * fit.Sigma_s.asDiagonal() * fit.A0.transpose();
  Eigen::MatrixXd theta = W * (B.transpose() * Khat * B) * W;
  theta = 0.5 * (theta + theta.transpose()).eval();

  // Kill rounding-level negative spectrum so the surface stays PSD.
  SymEigen eig = sym_eigen(theta);
  const double tol = 1e-10 * std::abs(theta.trace());
  bool clamped = false;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] < 0.0) {
      if (eig.values[k] < -tol) {
        throw NumericError("estimate_theta: eigenvalue " + std::to_string(eig.values[k]) +
                           " too negative for a PSD coefficient matrix");
      }
      eig.values[k] = 0.0;
      clamped = true;
    }
  }
  if (clamped) {
    theta = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    theta = 0.5 * (theta + theta.transpose()).eval();
  }

  fit.Theta = theta;
  fit.theta_set = true;
  return fit;
}

Eigen::MatrixXd covariance_surface(const SmootherFit& fit, const Eigen::VectorXd& s_grid,
                                   const Eigen::VectorXd& t_grid) {
  if (!fit.theta_set) throw std::invalid_argument("covariance_surface: Theta not estimated");
  const Eigen::MatrixXd Bs = design_matrix(fit.basis, s_grid);
  const Eigen::MatrixXd Bt = design_matrix(fit.basis, t_grid);
  return Bs * fit.Theta * Bt.transpose();
}

Eigen::MatrixXd derivative_covariance_surface(const SmootherFit& fit, int d,
                                              const Eigen::VectorXd& s_grid,
                                              const Eigen::VectorXd& t_grid) {
  if (!fit.theta_set) {
    throw std::invalid_argument("derivative_covariance_surface: Theta not estimated");
  }
  const Eigen::MatrixXd Bs = derivative_design_matrix(fit.basis, d, s_grid);
  const Eigen::MatrixXd Bt = derivative_design_matrix(fit.basis, d, t_grid);
  return Bs * fit.Theta * Bt.transpose();
}

}  // namespace derivfpca
