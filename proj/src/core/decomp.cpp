#include "core/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/errors.hpp"

namespace nrc {

namespace {

constexpr int kMaxSvdSweeps = 60;
constexpr int kMaxEigSweeps = 100;

// Jacobi rotation coefficients zeroing the (i,j) dot product, given
// alpha = <ai,ai>, beta = <aj,aj>, gamma = <ai,aj>.
void jacobi_coeffs(double alpha, double beta, double gamma, double& c, double& s) {
  const double zeta = (beta - alpha) / (2.0 * gamma);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  c = 1.0 / std::sqrt(1.0 + t * t);
  s = c * t;
}

void rotate_rows(Matrix& m, std::size_t i, std::size_t j, double c, double s) {
  double* ri = m.row_ptr(i);
  double* rj = m.row_ptr(j);
  const std::size_t n = m.cols();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = ri[k];
    const double b = rj[k];
    ri[k] = c * a - s * b;
    rj[k] = s * a + c * b;
  }
}

// Fix signs so the first nonzero entry of each u column is non-negative,
// flipping the matching vt row to keep the product unchanged.
void canonicalize_signs(Matrix& u, Matrix& vt) {
  for (std::size_t k = 0; k < u.cols(); ++k) {
    double first = 0.0;
    for (std::size_t i = 0; i < u.rows(); ++i) {
      if (u(i, k) != 0.0) {
        first = u(i, k);
        break;
      }
    }
    if (first < 0.0) {
      for (std::size_t i = 0; i < u.rows(); ++i) u(i, k) = -u(i, k);
      for (std::size_t j = 0; j < vt.cols(); ++j) vt(k, j) = -vt(k, j);
    }
  }
}

SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  // Work on transposed storage so the columns of `a` are contiguous rows.
  Matrix wt = transpose(a);   // n x m, row k holds column k of a
  Matrix vt = Matrix::identity(n);

  const double norm = frobenius_norm(a);
  if (norm > 0.0) {
    const double pair_tol = 5e-14;
    const double dead_col = (1e-17 * norm) * (1e-17 * norm);
    bool converged = false;
    int sweep = 0;
    for (; sweep < kMaxSvdSweeps; ++sweep) {
      bool rotated = false;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double* ri = wt.row_ptr(i);
          const double* rj = wt.row_ptr(j);
          double alpha = 0.0, beta = 0.0, gamma = 0.0;
          for (std::size_t k = 0; k < m; ++k) {
            alpha += ri[k] * ri[k];
            beta += rj[k] * rj[k];
            gamma += ri[k] * rj[k];
          }
          if (alpha <= dead_col || beta <= dead_col) continue;
          if (std::abs(gamma) <= pair_tol * std::sqrt(alpha * beta)) continue;
          double c, s;
          jacobi_coeffs(alpha, beta, gamma, c, s);
          rotate_rows(wt, i, j, c, s);
          rotate_rows(vt, i, j, c, s);
          rotated = true;
        }
      }
      if (!rotated) {
        converged = true;
        break;
      }
    }
    require(converged, ErrorCode::NoConvergence,
            "svd: one-sided Jacobi did not converge after " + std::to_string(sweep) + " sweeps");
  }

  // Column norms are the singular values; sort them non-increasing.
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = vector_norm(std::span<const double>(wt.row_ptr(i), m));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  SvdResult out;
  out.singular_values.resize(n);
  out.u = Matrix(m, n);
  out.vt = Matrix(n, n);
  const double synth_tol = norm * 1e-17;
  std::vector<std::size_t> synth;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.singular_values[k] = sigma[src];
    for (std::size_t j = 0; j < n; ++j) out.vt(k, j) = vt(src, j);
    if (sigma[src] > synth_tol) {
      const double inv = 1.0 / sigma[src];
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = wt(src, i) * inv;
    } else {
      out.singular_values[k] = 0.0;
      synth.push_back(k);
    }
  }

  // Numerically dead columns carry no direction; complete u to an
  // orthonormal set by Gram-Schmidt over the coordinate basis.
  for (std::size_t k : synth) {
    std::vector<double> cand(m);
    bool done = false;
    for (std::size_t e = 0; e < m && !done; ++e) {
      std::fill(cand.begin(), cand.end(), 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t kk = 0; kk < n; ++kk) {
          if (kk == k) continue;  // later synthesized columns are still zero; projecting is a no-op
          double proj = 0.0;
          for (std::size_t i = 0; i < m; ++i) proj += cand[i] * out.u(i, kk);
          for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * out.u(i, kk);
        }
      }
      const double nrm = vector_norm(cand);
      if (nrm > 0.5) {  // e_i was not (nearly) in the span
        for (std::size_t i = 0; i < m; ++i) out.u(i, k) = cand[i] / nrm;
        done = true;
      }
    }
    require(done, ErrorCode::Internal, "svd: failed to complete orthonormal basis");
  }

  canonicalize_signs(out.u, out.vt);
  return out;
}

}  // namespace

SvdResult svd(const Matrix& a) {
  require(!a.empty(), ErrorCode::InvalidArgument, "svd of empty matrix");
  require(a.all_finite(), ErrorCode::NotFinite, "svd input must be finite");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(transpose(a));
  SvdResult out;
  out.singular_values = std::move(t.singular_values);
  out.u = transpose(t.vt);
  out.vt = transpose(t.u);
  canonicalize_signs(out.u, out.vt);
  return out;
}

Matrix svd_reconstruct(const SvdResult& r) {
  Matrix us = r.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= r.singular_values[k];
  return multiply(us, r.vt);
}

Matrix truncate_rank(const Matrix& a, std::size_t k) {
  require(k >= 1, ErrorCode::Precondition, "truncate_rank needs k >= 1");
  SvdResult r = svd(a);
  for (std::size_t i = k; i < r.singular_values.size(); ++i) r.singular_values[i] = 0.0;
  return svd_reconstruct(r);
}

double dist_to_rank_k(const Matrix& a, std::size_t k) {
  require(k >= 1, ErrorCode::Precondition, "dist_to_rank_k needs k >= 1");
  const SvdResult r = svd(a);
  double acc = 0.0;
  for (std::size_t i = k; i < r.singular_values.size(); ++i)
    acc += r.singular_values[i] * r.singular_values[i];
  return std::sqrt(acc);
}

std::size_t numerical_rank(const Matrix& a, double rel_tol) {
  require(rel_tol > 0.0 && rel_tol < 1.0, ErrorCode::Precondition,
          "numerical_rank rel_tol must lie in (0,1)");
  const SvdResult r = svd(a);
  if (r.singular_values.empty() || r.singular_values[0] == 0.0) return 0;
  const double cut = rel_tol * r.singular_values[0];
  std::size_t count = 0;
  for (double s : r.singular_values)
    if (s > cut) ++count;
  return count;
}

SymEig sym_eig(const Matrix& a) {
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument, "sym_eig needs a square matrix");
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix v = Matrix::identity(n);
  const double norm = frobenius_norm(a);
  const double tol = 1e-14 * (norm > 0.0 ? norm : 1.0);

  bool converged = false;
  int sweep = 0;
  for (; sweep < kMaxEigSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * w(i, j) * w(i, j);
    if (std::sqrt(off) <= tol) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = w(p, p);
        const double aqq = w(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < n; ++k) {
          const double wkp = w(k, p);
          const double wkq = w(k, q);
          w(k, p) = c * wkp - s * wkq;
          w(k, q) = s * wkp + c * wkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double wpk = w(p, k);
          const double wqk = w(q, k);
          w(p, k) = c * wpk - s * wqk;
          w(q, k) = s * wpk + c * wqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  require(converged, ErrorCode::NoConvergence,
          "sym_eig: Jacobi did not converge after " + std::to_string(sweep) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });
  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = w(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace {

void check_symmetric(const Matrix& a, const char* who) {
  require(a.rows() == a.cols(), ErrorCode::InvalidArgument,
          std::string(who) + " needs a square matrix");
  const double tol = 1e-10 * std::max(1.0, max_abs(a));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      require(std::abs(a(i, j) - a(j, i)) <= tol, ErrorCode::InvalidArgument,
              std::string(who) + ": matrix is not symmetric");
}

Matrix symmetrized(const Matrix& a) {
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

}  // namespace

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  check_symmetric(a, "spd_solve");
  require(a.cols() == b.rows(), ErrorCode::Mismatch, "spd_solve shapes disagree");
  const std::size_t n = a.rows();
  Matrix l = symmetrized(a);

  // In-place Cholesky, lower triangle.
  for (std::size_t j = 0; j < n; ++j) {
    double diag = l(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    require(diag > 0.0 && std::isfinite(diag), ErrorCode::NotPositiveDefinite,
            "spd_solve: non-positive pivot at index " + std::to_string(j));
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = l(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }

  Matrix x = b;
  const std::size_t m = b.cols();
  // Forward substitution L z = b.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      for (std::size_t c = 0; c < m; ++c) x(i, c) -= lik * x(k, c);
    }
    const double inv = 1.0 / l(i, i);
    for (std::size_t c = 0; c < m; ++c) x(i, c) *= inv;
  }
  // Back substitution L^T x = z.
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      for (std::size_t c = 0; c < m; ++c) x(ii, c) -= lki * x(k, c);
    }
    const double inv = 1.0 / l(ii, ii);
    for (std::size_t c = 0; c < m; ++c) x(ii, c) *= inv;
  }
  return x;
}

namespace {

Matrix spd_power(const Matrix& a, double (*f)(double), const char* who, bool allow_zero) {
  check_symmetric(a, who);
  const SymEig e = sym_eig(symmetrized(a));
  const double top = e.values.empty() ? 0.0 : std::max(e.values[0], 0.0);
  const double tol = 1e-12 * std::max(top, 1e-300);
  std::vector<double> mapped(e.values.size());
  for (std::size_t i = 0; i < e.values.size(); ++i) {
    if (allow_zero && std::abs(e.values[i]) <= tol) {
      mapped[i] = 0.0;
      continue;
    }
    require(e.values[i] > tol, ErrorCode::NotPositiveDefinite,
            std::string(who) + ": eigenvalue " + std::to_string(e.values[i]) +
                " at or below tolerance");
    mapped[i] = f(e.values[i]);
  }
  Matrix vd = e.vectors;
  for (std::size_t i = 0; i < vd.rows(); ++i)
    for (std::size_t k = 0; k < vd.cols(); ++k) vd(i, k) *= mapped[k];
  return symmetrized(multiply_a_bt(vd, e.vectors));
}

double inv_sqrt_fn(double x) { return 1.0 / std::sqrt(x); }
double sqrt_fn(double x) { return std::sqrt(x); }

}  // namespace

Matrix spd_inv_sqrt(const Matrix& a) { return spd_power(a, inv_sqrt_fn, "spd_inv_sqrt", false); }

Matrix spd_sqrt(const Matrix& a) { return spd_power(a, sqrt_fn, "spd_sqrt", true); }

}  // namespace nrc
