#pragma once

#include <Eigen/Dense>
#include <vector>

#include "derivfpca/dfpca.hpp"

namespace derivfpca {

/// Stacked score matrix: row i concatenates the univariate derivative-based
/// scores of curve i across components, p-major.
struct ScoreStack {
  Eigen::MatrixXd Xi;  // n x K_plus

  struct Block {
    int component = 0;  // 0-based
    int offset = 0;
    int K = 0;
  };
  std::vector<Block> blocks;

  int K_plus() const { return static_cast<int>(Xi.cols()); }
};

/// Eigendecomposition of Z = Xi^T Xi / (n - 1). The full spectrum and
/// eigenvector matrix are kept; M is the minimal truncation covering the
/// variance threshold, and the per-component univariate eigensystems are
/// carried along so the multivariate eigenfunctions can be evaluated.
struct MultivarEigenSystem {
  Eigen::VectorXd v;   // K_plus eigenvalues, descending
  Eigen::MatrixXd C;   // K_plus x K_plus eigenvectors
  int M = 0;
  std::vector<ScoreStack::Block> blocks;
  std::vector<DerivEigenSystem> per_component;
};

/// Concatenate per-component score sets; all components must share n.
ScoreStack stack_scores(const std::vector<ScoreSet>& components);

MultivarEigenSystem multivariate_eigensystem(const ScoreStack& stack,
                                             const std::vector<DerivEigenSystem>& per_component,
                                             double threshold = 0.95);

/// Multivariate eigenfunctions on per-component grids:
/// psi_k^{[p]}(t) = sum_l (c_k^{[p]})_l phi_l^{[p]}(t). Element p of the
/// result has shape J_p x M.
std::vector<Eigen::MatrixXd> dmfpcs(const MultivarEigenSystem& sys,
                                    const std::vector<Eigen::VectorXd>& t_grids);

/// rho = Xi C_M (n x M); columns have sample variance v_k by construction.
Eigen::MatrixXd dmfpc_scores(const MultivarEigenSystem& sys, const ScoreStack& stack);

/// Per-component Karhunen-Loeve sums sum_k rho_ik psi_k^{[p]}(t).
std::vector<Eigen::MatrixXd> reconstruct_multivariate(const MultivarEigenSystem& sys,
                                                      const Eigen::MatrixXd& rho,
                                                      const std::vector<Eigen::VectorXd>& t_grids);

/// One multivariate fit: per-component univariate fits plus the combine step.
struct DmfpcaResult {
  std::vector<DfpcaResult> components;
  ScoreStack stack;
  MultivarEigenSystem sys;
  Eigen::MatrixXd rho;  // n x M
};

DmfpcaResult fit_dmfpca(const std::vector<Eigen::VectorXd>& grids,
                        const std::vector<Eigen::MatrixXd>& Ys,
                        const DfpcaOptions& options = DfpcaOptions{});

}  // namespace derivfpca
