#include "core/linear_theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/decomp.hpp"
#include "core/errors.hpp"

namespace nrc {

namespace {

// X X^T + N lambda I, the Gram matrix of the augmented problem.
Matrix gram_lambda(const RidgeProblem& p) {
  Matrix g = multiply_a_bt(p.x, p.x);
  const double shift = static_cast<double>(p.n) * p.lambda;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += shift;
  return g;
}

}  // namespace

RidgeProblem::RidgeProblem(Matrix x_in, Matrix y_in, double lambda_in)
    : x(std::move(x_in)), y(std::move(y_in)), lambda(lambda_in), n(x.cols()) {
  require(x.cols() == y.cols(), ErrorCode::Mismatch, "X and Y column counts disagree");
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
  require(n >= 1, ErrorCode::InvalidArgument, "ridge problem needs at least one sample");
  if (lambda == 0.0) {
    const SymEig e = sym_eig(multiply_a_bt(x, x));
    const double top = e.values.front();
    const double bottom = e.values.back();
    require(top > 0.0 && bottom > 1e-10 * top, ErrorCode::NotPositiveDefinite,
            "lambda = 0 requires X X^T to be numerically full rank");
  }
}

std::pair<Matrix, Matrix> augment(const RidgeProblem& p) {
  const std::size_t d = p.x.rows();
  const std::size_t c = p.y.rows();
  const double s = std::sqrt(static_cast<double>(p.n) * p.lambda);
  Matrix block(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) block(i, i) = s;
  return {hstack(p.x, block), hstack(p.y, Matrix(c, d, 0.0))};
}

Matrix q_matrix(const RidgeProblem& p) {
  return multiply(multiply_a_bt(p.y, p.x), spd_inv_sqrt(gram_lambda(p)));
}

Matrix ridge_minimizer(const RidgeProblem& p) {
  // Theta = Y X^T G^{-1} computed as (G^{-1} X Y^T)^T through an SPD solve.
  return transpose(spd_solve(gram_lambda(p), multiply_a_bt(p.x, p.y)));
}

Matrix rank_constrained_minimizer(const RidgeProblem& p, std::size_t k) {
  require(k >= 1, ErrorCode::Precondition, "rank_constrained_minimizer needs k >= 1");
  return multiply(truncate_rank(q_matrix(p), k), spd_inv_sqrt(gram_lambda(p)));
}

CriticalPoint critical_point(const RidgeProblem& p, const std::vector<std::size_t>& indices) {
  const Matrix q = q_matrix(p);
  const SvdResult dec = svd(q);
  const std::size_t rank_q = numerical_rank(q, 1e-12);
  for (std::size_t idx : indices)
    require(idx < rank_q, ErrorCode::Precondition,
            "singular triple index " + std::to_string(idx) + " outside rank(Q) = " +
                std::to_string(rank_q));

  // Sum of selected triples, assembled as U diag(mask * sigma) V^T.
  std::vector<double> masked(dec.singular_values.size(), 0.0);
  double sel_sq = 0.0;
  for (std::size_t idx : indices) {
    masked[idx] = dec.singular_values[idx];
    sel_sq += masked[idx] * masked[idx];
  }
  SvdResult sel = dec;
  sel.singular_values = masked;

  CriticalPoint out;
  out.theta = multiply(svd_reconstruct(sel), spd_inv_sqrt(gram_lambda(p)));
  const auto [xl, yl] = augment(p);
  const double energy = frobenius_norm_sq(yl);
  out.loss_half = 0.5 * (energy - sel_sq);
  out.loss_over_n = (energy - sel_sq) / static_cast<double>(p.n);
  return out;
}

double ridge_loss(const Matrix& theta, const RidgeProblem& p) {
  const Matrix r = subtract(p.y, multiply(theta, p.x));
  return frobenius_norm_sq(r) / static_cast<double>(p.n) +
         p.lambda * frobenius_norm_sq(theta);
}

double tangent_residual(const Matrix& theta, const RidgeProblem& p, std::size_t rank) {
  // Ambient gradient of the augmented loss: (2/N)(Theta G - Y X^T).
  Matrix g = subtract(multiply(theta, gram_lambda(p)), multiply_a_bt(p.y, p.x));
  g = scale(g, 2.0 / static_cast<double>(p.n));

  const std::size_t r = rank > 0 ? rank : numerical_rank(theta, 1e-12);
  if (r == 0) return frobenius_norm(g);  // rank-0 manifold is the point {0}

  SvdResult dec = svd(theta);
  std::vector<std::size_t> keep(r);
  for (std::size_t i = 0; i < r; ++i) keep[i] = i;
  const Matrix u = select_cols(dec.u, keep);         // m x r
  const Matrix v = transpose(dec.vt);                // n x full
  const Matrix vr = select_cols(v, keep);            // n x r

  const Matrix utg = multiply_at_b(u, g);            // r x n
  const Matrix gv = multiply(g, vr);                 // m x r
  const Matrix utgv = multiply(utg, vr);             // r x r

  // P(G) = U U^T G + G V V^T - U U^T G V V^T
  Matrix proj = multiply(u, utg);
  add_scaled_in_place(proj, 1.0, multiply_a_bt(gv, vr));
  add_scaled_in_place(proj, -1.0, multiply(u, multiply_a_bt(utgv, vr)));
  return frobenius_norm(proj);
}

CentroidProblem centroid_problem(const Matrix& x, const Matrix& y, const Partition& p) {
  require(p.centroids_z.rows() == x.rows() && p.centroids_y.rows() == y.rows(),
          ErrorCode::Mismatch, "partition centroids do not match (x, y)");
  CentroidProblem cp;
  cp.partition = p;
  const std::size_t n = p.assignments.size();
  cp.x_bar = Matrix(x.rows(), n);
  cp.y_bar = Matrix(y.rows(), n);
  std::size_t col = 0;
  for (std::size_t c = 0; c < p.k; ++c) {
    for (std::size_t i = 0; i < p.sizes[c]; ++i, ++col) {
      for (std::size_t r = 0; r < x.rows(); ++r) cp.x_bar(r, col) = p.centroids_z(r, c);
      for (std::size_t r = 0; r < y.rows(); ++r) cp.y_bar(r, col) = p.centroids_y(r, c);
    }
  }
  return cp;
}

Matrix centroid_minimizer(const CentroidProblem& cp, double lambda, std::size_t n) {
  require(lambda > 0.0, ErrorCode::Precondition, "centroid_minimizer needs lambda > 0");
  require(cp.x_bar.cols() == n, ErrorCode::Mismatch,
          "centroid problem size disagrees with n");
  Matrix g = multiply_a_bt(cp.x_bar, cp.x_bar);
  const double shift = static_cast<double>(n) * lambda;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += shift;
  return transpose(spd_solve(g, multiply_a_bt(cp.x_bar, cp.y_bar)));
}

double thm53_bound(double tcv, double lambda, std::size_t d, std::size_t n, double xbar_norm,
                   double ybar_norm) {
  require(lambda > 0.0, ErrorCode::Precondition, "thm53_bound needs lambda > 0");
  const double dd = static_cast<double>(d);
  return (tcv / lambda) *
         ((dd / (static_cast<double>(n) * lambda)) * ybar_norm * xbar_norm + std::sqrt(dd));
}

double thm54_bound(std::size_t d, std::size_t c, double lambda, double label_tcv) {
  require(lambda > 0.0, ErrorCode::Precondition, "thm54_bound needs lambda > 0");
  const double dd = static_cast<double>(d);
  const double mm = static_cast<double>(std::min(d, c));
  return std::sqrt(dd * mm * label_tcv / lambda);
}

}  // namespace nrc
