#include "core/matrix.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "core/errors.hpp"

namespace nrc {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
  require(rows > 0 && cols > 0, ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  require(data.size() == rows * cols, ErrorCode::InvalidArgument,
          "matrix data length " + std::to_string(data.size()) + " != rows*cols " +
              std::to_string(rows * cols));
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  require(m.all_finite(), ErrorCode::NotFinite, "matrix entries must be finite");
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<double> flat;
  std::size_t n_rows = rows.size();
  std::size_t n_cols = n_rows == 0 ? 0 : rows.begin()->size();
  for (const auto& row : rows) {
    require(row.size() == n_cols, ErrorCode::InvalidArgument, "ragged row lengths");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return from_data(n_rows, n_cols, std::move(flat));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size(), 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

std::vector<double> Matrix::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Matrix::set_col(std::size_t j, std::span<const double> values) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

bool Matrix::all_finite() const noexcept {
  for (double e : data_) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

namespace {

void check_mul(std::size_t inner_a, std::size_t inner_b) {
  require(inner_a == inner_b, ErrorCode::Mismatch,
          "matrix product inner dimensions disagree: " + std::to_string(inner_a) + " vs " +
              std::to_string(inner_b));
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.rows());
  Matrix c(a.rows(), b.cols(), 0.0);
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row_ptr(i);
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* bp = b.row_ptr(p);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  check_mul(a.rows(), b.rows());
  Matrix c(a.cols(), b.cols(), 0.0);
  const std::size_t n = b.cols();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double* ap = a.row_ptr(p);
    const double* bp = b.row_ptr(p);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      double* ci = c.row_ptr(i);
      for (std::size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
    }
  }
  return c;
}

Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.cols());
  Matrix c(a.rows(), b.rows(), 0.0);
  const std::size_t k = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row_ptr(i);
    double* ci = c.row_ptr(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* bj = b.row_ptr(j);
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      ci[j] = acc;
    }
  }
  return c;
}

namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::Mismatch,
          "matrix shapes disagree");
}

}  // namespace

Matrix add(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  Matrix c = a;
  double* cd = c.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < c.size(); ++i) cd[i] += bd[i];
  return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  Matrix c = a;
  double* cd = c.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < c.size(); ++i) cd[i] -= bd[i];
  return c;
}

Matrix scale(const Matrix& a, double s) {
  Matrix c = a;
  for (double& e : c.data()) e *= s;
  return c;
}

void add_scaled_in_place(Matrix& a, double s, const Matrix& b) {
  check_same_shape(a, b);
  double* ad = a.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < a.size(); ++i) ad[i] += s * bd[i];
}

double frobenius_norm_sq(const Matrix& a) noexcept {
  double acc = 0.0;
  for (double e : a.data()) acc += e * e;
  return acc;
}

double frobenius_norm(const Matrix& a) noexcept { return std::sqrt(frobenius_norm_sq(a)); }

double max_abs(const Matrix& a) noexcept {
  double m = 0.0;
  for (double e : a.data()) m = std::max(m, std::abs(e));
  return m;
}

double dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b);
  double acc = 0.0;
  const double* ad = a.data().data();
  const double* bd = b.data().data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += ad[i] * bd[i];
  return acc;
}

double trace(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) acc += a(i, i);
  return acc;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), ErrorCode::Mismatch, "hstack row counts disagree");
  Matrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::memcpy(c.row_ptr(i), a.row_ptr(i), a.cols() * sizeof(double));
    std::memcpy(c.row_ptr(i) + a.cols(), b.row_ptr(i), b.cols() * sizeof(double));
  }
  return c;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorCode::Mismatch, "vstack column counts disagree");
  Matrix c(a.rows() + b.rows(), a.cols());
  std::memcpy(c.row_ptr(0), a.data().data(), a.size() * sizeof(double));
  std::memcpy(c.row_ptr(a.rows()), b.data().data(), b.size() * sizeof(double));
  return c;
}

Matrix select_cols(const Matrix& a, std::span<const std::size_t> indices) {
  require(!indices.empty(), ErrorCode::InvalidArgument, "select_cols needs at least one index");
  Matrix c(a.rows(), indices.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < indices.size(); ++j) {
      require(indices[j] < a.cols(), ErrorCode::InvalidArgument, "column index out of range");
      c(i, j) = a(i, indices[j]);
    }
  }
  return c;
}

double vector_norm_sq(std::span<const double> v) noexcept {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return acc;
}

double vector_norm(std::span<const double> v) noexcept { return std::sqrt(vector_norm_sq(v)); }

}  // namespace nrc
