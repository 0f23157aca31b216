#pragma once

#include <cstddef>
#include <vector>

#include "core/matrix.hpp"

namespace nrc {

// Thin SVD a = u * diag(singular_values) * vt with r = min(rows, cols).
// u has orthonormal columns (rows x r), vt orthonormal rows (r x cols),
// singular values sorted non-increasing. Left singular vectors are signed so
// that their first nonzero entry is non-negative, which makes decompositions
// reproducible run to run.
struct SvdResult {
  Matrix u;
  std::vector<double> singular_values;
  Matrix vt;
};

// One-sided Jacobi (Hestenes) SVD. Dense, double precision, intended for
// matrices up to ~1024x1024. Throws ErrorCode::NoConvergence if the sweep
// cap is exceeded (message carries the sweep count).
SvdResult svd(const Matrix& a);

// Reconstruct u * diag(s) * vt.
Matrix svd_reconstruct(const SvdResult& r);

// Best rank-<=k approximation in Frobenius norm (Eckart-Young).
Matrix truncate_rank(const Matrix& a, std::size_t k);

// Frobenius distance to the set of matrices with rank <= k:
// sqrt(sum_{i>k} sigma_i^2).
double dist_to_rank_k(const Matrix& a, std::size_t k);

// Number of singular values above rel_tol * sigma_max; the zero matrix has
// rank 0. rel_tol must lie in (0, 1).
std::size_t numerical_rank(const Matrix& a, double rel_tol);

// Symmetric eigendecomposition a = vectors * diag(values) * vectors^T via
// cyclic Jacobi rotations; eigenvalues sorted non-increasing.
struct SymEig {
  std::vector<double> values;
  Matrix vectors;  // columns are eigenvectors
};
SymEig sym_eig(const Matrix& a);

// Solve a * x = b for symmetric positive definite a (Cholesky). Rejects
// matrices that are asymmetric beyond 1e-10 or have a non-positive pivot.
Matrix spd_solve(const Matrix& a, const Matrix& b);

// Unique symmetric positive definite inverse square root: r with
// r * a * r = I.
Matrix spd_inv_sqrt(const Matrix& a);

// Unique symmetric positive semi-definite square root (tolerates zero
// eigenvalues; negative ones beyond tolerance are rejected).
Matrix spd_sqrt(const Matrix& a);

}  // namespace nrc
