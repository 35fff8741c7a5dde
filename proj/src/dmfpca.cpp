#include "derivfpca/dmfpca.hpp"

#include <string>

#include "derivfpca/errors.hpp"
#include "derivfpca/numerics.hpp"

namespace derivfpca {

ScoreStack stack_scores(const std::vector<ScoreSet>& components) {
  if (components.empty()) throw std::invalid_argument("stack_scores: no components");
  const Eigen::Index n = components[0].xi.rows();
  int k_plus = 0;
  for (const auto& sc : components) {
    if (sc.xi.rows() != n) {
      throw std::invalid_argument("stack_scores: components disagree on the number of curves");
    }
    k_plus += static_cast<int>(sc.xi.cols());
  }

  ScoreStack stack;
  stack.Xi.resize(n, k_plus);
  int offset = 0;
  for (int p = 0; p < static_cast<int>(components.size()); ++p) {
    const int kp = static_cast<int>(components[p].xi.cols());
    stack.Xi.middleCols(offset, kp) = components[p].xi;
    stack.blocks.push_back({p, offset, kp});
    offset += kp;
  }
  return stack;
}

MultivarEigenSystem multivariate_eigensystem(const ScoreStack& stack,
                                             const std::vector<DerivEigenSystem>& per_component,
                                             double threshold) {
  const Eigen::Index n = stack.Xi.rows();
  if (n < 2) throw std::invalid_argument("multivariate_eigensystem requires n >= 2");
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("variance threshold must lie in (0, 1]");
  }
  if (per_component.size() != stack.blocks.size()) {
    throw std::invalid_argument("multivariate_eigensystem: component count mismatch");
  }

  const Eigen::MatrixXd Z =
      (stack.Xi.transpose() * stack.Xi) / static_cast<double>(n - 1);
  SymEigen eig = sym_eigen(Z);
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] < 0.0) eig.values[k] = 0.0;
  }
  const double total = eig.values.sum();
  if (!(total > 0.0)) throw NumericError("multivariate_eigensystem: zero score covariance");

  MultivarEigenSystem sys;
  sys.v = eig.values;
  sys.C = eig.vectors;
  sys.blocks = stack.blocks;
  sys.per_component = per_component;
  double cum = 0.0;
  sys.M = static_cast<int>(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    cum += eig.values[k];
    if (cum / total >= threshold) {
      sys.M = static_cast<int>(k) + 1;
      break;
    }
  }
  return sys;
}

std::vector<Eigen::MatrixXd> dmfpcs(const MultivarEigenSystem& sys,
                                    const std::vector<Eigen::VectorXd>& t_grids) {
  if (t_grids.size() != sys.per_component.size()) {
    throw std::invalid_argument("dmfpcs: one grid per component required");
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sys.blocks.size());
  for (std::size_t p = 0; p < sys.blocks.size(); ++p) {
    const auto& block = sys.blocks[p];
    const Eigen::MatrixXd phi =
        eigenfunction_values(sys.per_component[p], t_grids[p], block.K);
    out.push_back(phi * sys.C.block(block.offset, 0, block.K, sys.M));
  }
  return out;
}

Eigen::MatrixXd dmfpc_scores(const MultivarEigenSystem& sys, const ScoreStack& stack) {
  if (stack.K_plus() != sys.C.rows()) {
    throw std::invalid_argument("dmfpc_scores: stack and eigensystem dimensions disagree");
  }
  return stack.Xi * sys.C.leftCols(sys.M);
}

std::vector<Eigen::MatrixXd> reconstruct_multivariate(const MultivarEigenSystem& sys,
                                                      const Eigen::MatrixXd& rho,
                                                      const std::vector<Eigen::VectorXd>& t_grids) {
  if (rho.cols() != sys.M) {
    throw std::invalid_argument("reconstruct_multivariate: score count must equal M");
  }
  const std::vector<Eigen::MatrixXd> psis = dmfpcs(sys, t_grids);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(psis.size());
  for (const auto& psi : psis) out.push_back(psi * rho.transpose());
  return out;
}

DmfpcaResult fit_dmfpca(const std::vector<Eigen::VectorXd>& grids,
                        const std::vector<Eigen::MatrixXd>& Ys,
                        const DfpcaOptions& options) {
  if (grids.size() != Ys.size() || grids.empty()) {
    throw std::invalid_argument("fit_dmfpca: one grid per component required");
  }
  DmfpcaResult res;
  res.components.reserve(grids.size());
  for (std::size_t p = 0; p < grids.size(); ++p) {
    res.components.push_back(fit_dfpca(grids[p], Ys[p], options));
  }

  std::vector<ScoreSet> score_sets;
  std::vector<DerivEigenSystem> systems;
  for (const auto& comp : res.components) {
    score_sets.push_back(comp.score_set);
    systems.push_back(comp.eig);
  }
  res.stack = stack_scores(score_sets);
  res.sys = multivariate_eigensystem(res.stack, systems, options.threshold);
  res.rho = dmfpc_scores(res.sys, res.stack);
  return res;
}

}  // namespace derivfpca
