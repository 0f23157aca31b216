#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "core/clustering.hpp"
#include "core/matrix.hpp"

namespace nrc {

// Regularized linear least-squares problem min (1/N)||Y - Theta X||^2
// + lambda ||Theta||^2. With lambda = 0, X X^T must be numerically full rank
// (smallest eigenvalue above 1e-10 of the largest) or construction fails.
struct RidgeProblem {
  Matrix x;  // d x N
  Matrix y;  // c x N
  double lambda = 0.0;
  std::size_t n = 0;

  RidgeProblem(Matrix x_in, Matrix y_in, double lambda_in);
};

// Augmented pair X_lambda = [X, sqrt(N lambda) I] (d x (N+d)),
// Y_lambda = [Y, 0] (c x (N+d)); the unregularized loss on the pair equals
// the regularized loss on (X, Y).
std::pair<Matrix, Matrix> augment(const RidgeProblem& p);

// Q_lambda = Y_lambda X_lambda^T (X_lambda X_lambda^T)^{-1/2}
//          = Y X^T (X X^T + N lambda I)^{-1/2}.
Matrix q_matrix(const RidgeProblem& p);

// Theta* = Y X^T (X X^T + N lambda I)^{-1}; the unique minimizer.
Matrix ridge_minimizer(const RidgeProblem& p);

// Minimizer over matrices of rank <= k: the top-k SVD truncation of
// Q_lambda times (X_lambda X_lambda^T)^{-1/2}.
Matrix rank_constrained_minimizer(const RidgeProblem& p, std::size_t k);

// Critical point built from an arbitrary subset of singular triples of
// Q_lambda (0-based indices into the non-increasing singular values; the
// empty set gives Theta = 0). The loss at such a point is reported under
// both conventions in circulation: (1/2)(Tr(YY^T) - sum sigma^2) and the
// (1/N)-normalized value this artifact trains against.
struct CriticalPoint {
  Matrix theta;
  double loss_half = 0.0;
  double loss_over_n = 0.0;
};
CriticalPoint critical_point(const RidgeProblem& p, const std::vector<std::size_t>& indices);

// Norm of the full-space loss gradient projected onto the tangent space of
// the fixed-rank manifold at theta: P(G) = U U^T G + G V V^T - U U^T G V V^T.
// Vanishes at manifold critical points even where the ambient gradient does
// not. `rank` <= 0 uses the numerical rank of theta.
double tangent_residual(const Matrix& theta, const RidgeProblem& p, std::size_t rank = 0);

// Full regularized loss (1/N)||Y - Theta X||^2 + lambda ||Theta||^2.
double ridge_loss(const Matrix& theta, const RidgeProblem& p);

// Centroid surrogate: each column replaced by its cluster centroid
// (repeated N_k times, cluster blocks in order).
struct CentroidProblem {
  Matrix x_bar;
  Matrix y_bar;
  Partition partition;
};
CentroidProblem centroid_problem(const Matrix& x, const Matrix& y, const Partition& p);

// Theta^{*,C} = Ybar_lambda Xbar_lambda^T (Xbar_lambda Xbar_lambda^T)^{-1};
// rank is at most the number of clusters.
Matrix centroid_minimizer(const CentroidProblem& cp, double lambda, std::size_t n);

// (tcv / lambda) * ((d / (N lambda)) ||Ybar|| ||Xbar|| + sqrt(d)).
double thm53_bound(double tcv, double lambda, std::size_t d, std::size_t n, double xbar_norm,
                   double ybar_norm);

// sqrt(d * min(d, c) * label_tcv / lambda).
double thm54_bound(std::size_t d, std::size_t c, double lambda, double label_tcv);

}  // namespace nrc
