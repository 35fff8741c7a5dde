#include "derivfpca/splinebasis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "derivfpca/errors.hpp"

namespace derivfpca {

namespace {

constexpr int kMaxDegree = 30;

// Index j of the knot interval [knots[j], knots[j+1]) containing t, clamped so
// the right domain endpoint falls into the last interior interval.
int find_span(const BSplineBasis& basis, double t) {
  int j = basis.q + static_cast<int>(std::floor((t - basis.domain_lo) / basis.h));
  return std::clamp(j, basis.q, basis.c - 1);
}

// Cox-de Boor triangle: on exit N[0..p] hold the values of the p+1 degree-p
// basis functions that are nonzero on the span interval (spline indices
// span-p .. span).
void deboor(const Eigen::VectorXd& knots, int span, int p, double t, double* N) {
  double left[kMaxDegree + 1];
  double right[kMaxDegree + 1];
  N[0] = 1.0;
  for (int deg = 1; deg <= p; ++deg) {
    left[deg] = t - knots[span + 1 - deg];
    right[deg] = knots[span + deg] - t;
    double saved = 0.0;
    for (int r = 0; r < deg; ++r) {
      const double tmp = N[r] / (right[r + 1] + left[deg - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[deg - r] * tmp;
    }
    N[deg] = saved;
  }
}

void check_domain(const BSplineBasis& basis, double t) {
  if (!(t >= basis.domain_lo && t <= basis.domain_hi)) {
    throw std::domain_error("evaluation point " + std::to_string(t) +
                            " outside basis domain [" + std::to_string(basis.domain_lo) +
                            ", " + std::to_string(basis.domain_hi) + "]");
  }
}

// Reduced-degree basis vector B(t; q-d): the c-d degree-(q-d) functions on the
// same knot vector that are nonzero somewhere on the domain (spline indices
// d .. c-1).
Eigen::VectorXd eval_reduced(const BSplineBasis& basis, int d, double t) {
  const int p = basis.q - d;
  const int span = find_span(basis, t);
  double N[kMaxDegree + 1];
  deboor(basis.knots, span, p, t, N);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.c - d);
  for (int r = 0; r <= p; ++r) {
    out[span - p + r - d] = N[r];
  }
  return out;
}

// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(m, 0.0);
  weights.assign(m, 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[m - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[m - 1 - i] = w;
  }
}

}  // namespace

BSplineBasis make_basis(double domain_lo, double domain_hi, int c, int q) {
  if (q < 0 || c <= q) {
    throw std::invalid_argument("make_basis requires c > q >= 0, got c=" +
                                std::to_string(c) + ", q=" + std::to_string(q));
  }
  if (!(domain_hi > domain_lo)) {
    throw std::invalid_argument("make_basis requires domain_hi > domain_lo");
  }
  if (q > kMaxDegree) {
    throw std::invalid_argument("spline degree above supported maximum");
  }
  BSplineBasis basis;
  basis.domain_lo = domain_lo;
  basis.domain_hi = domain_hi;
  basis.c = c;
  basis.q = q;
  basis.h = (domain_hi - domain_lo) / (c - q);
  basis.knots.resize(c + q + 1);
  for (int i = 0; i <= c + q; ++i) {
    basis.knots[i] = domain_lo + (i - q) * basis.h;
  }
  return basis;
}

Eigen::VectorXd eval_basis(const BSplineBasis& basis, double t) {
  check_domain(basis, t);
  const int span = find_span(basis, t);
  double N[kMaxDegree + 1];
  deboor(basis.knots, span, basis.q, t, N);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.c);
  for (int r = 0; r <= basis.q; ++r) {
    out[span - basis.q + r] = N[r];
  }
  return out;
}

DifferenceOperator difference_matrix(int l, int c) {
  if (l < 1 || l >= c) {
    throw std::invalid_argument("difference_matrix requires 1 <= l < c, got l=" +
                                std::to_string(l) + ", c=" + std::to_string(c));
  }
  DifferenceOperator op;
  op.l = l;
  op.c = c;
  op.entries = Eigen::MatrixXi::Zero(c - l, c);
  // Signed binomial coefficients: row r has (-1)^{l-j} C(l, j) at column r+j.
  std::vector<long long> binom(l + 1, 0);
  binom[0] = 1;
  for (int k = 1; k <= l; ++k) {
    for (int j = k; j > 0; --j) binom[j] += binom[j - 1];
  }
  for (int r = 0; r < c - l; ++r) {
    for (int j = 0; j <= l; ++j) {
      const int sign = ((l - j) % 2 == 0) ? 1 : -1;
      op.entries(r, r + j) = sign * static_cast<int>(binom[j]);
    }
  }
  return op;
}

PenaltyMatrix penalty_matrix(int l, int c) {
  const DifferenceOperator d = difference_matrix(l, c);
  PenaltyMatrix p;
  p.l = l;
  const Eigen::MatrixXd dd = d.dense();
  p.matrix = dd.transpose() * dd;
  return p;
}

Eigen::VectorXd derivative_basis(const BSplineBasis& basis, int d, double t) {
  if (d < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (d == 0) return eval_basis(basis, t);
  if (basis.q < d + 2) {
    throw std::invalid_argument("derivative_basis requires degree q >= d + 2, got q=" +
                                std::to_string(basis.q) + ", d=" + std::to_string(d));
  }
  check_domain(basis, t);
  const Eigen::VectorXd reduced = eval_reduced(basis, d, t);
  const DifferenceOperator diff = difference_matrix(d, basis.c);
  const double scale = std::pow(basis.h, -d);
  return scale * (diff.dense().transpose() * reduced);
}

GramMatrix gram_matrix(const BSplineBasis& basis, int d) {
  if (d < 0) throw std::invalid_argument("derivative order must be nonnegative");
  if (d > 0 && basis.q < d + 2) {
    throw std::invalid_argument("gram_matrix requires degree q >= d + 2, got q=" +
                                std::to_string(basis.q) + ", d=" + std::to_string(d));
  }
  // Integrand has piecewise degree 2(q-d); the rule below is exact with
  // margin on every interior knot interval.
  const int m = (basis.q - d) + 2;
  std::vector<double> nodes, weights;
  gauss_legendre(m, nodes, weights);

  GramMatrix g;
  g.d = d;
  g.matrix = Eigen::MatrixXd::Zero(basis.c, basis.c);
  for (int interval = basis.q; interval < basis.c; ++interval) {
    const double a = basis.knots[interval];
    const double b = basis.knots[interval + 1];
    const double mid = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);
    for (int k = 0; k < m; ++k) {
      const double t = mid + halfw * nodes[k];
      const Eigen::VectorXd bd = derivative_basis(basis, d, t);
      g.matrix.noalias() += (halfw * weights[k]) * (bd * bd.transpose());
    }
  }
  g.matrix = 0.5 * (g.matrix + g.matrix.transpose()).eval();
  return g;
}

Eigen::MatrixXd design_matrix(const BSplineBasis& basis, const Eigen::VectorXd& grid) {
  Eigen::MatrixXd B(grid.size(), basis.c);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    B.row(j) = eval_basis(basis, grid[j]).transpose();
  }
  return B;
}

Eigen::MatrixXd derivative_design_matrix(const BSplineBasis& basis, int d,
                                         const Eigen::VectorXd& grid) {
  Eigen::MatrixXd B(grid.size(), basis.c);
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    B.row(j) = derivative_basis(basis, d, grid[j]).transpose();
  }
  return B;
}

}  // namespace derivfpca
