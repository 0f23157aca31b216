#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nrc {

// Dense row-major matrix of doubles. The universal numeric carrier; all
// entries are finite for matrices built through the checked factories, and
// arithmetic on finite inputs preserves that unless training diverges (which
// the trainer detects separately).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  // Checked construction: validates shape/data length and that every entry
  // is finite. Use at API and file boundaries.
  static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) noexcept { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const noexcept { return data_.data() + i * cols_; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> values);

  bool all_finite() const noexcept;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

// c = a * b
Matrix multiply(const Matrix& a, const Matrix& b);
// c = transpose(a) * b without materializing the transpose
Matrix multiply_at_b(const Matrix& a, const Matrix& b);
// c = a * transpose(b)
Matrix multiply_a_bt(const Matrix& a, const Matrix& b);

Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
// a += s * b
void add_scaled_in_place(Matrix& a, double s, const Matrix& b);

double frobenius_norm(const Matrix& a) noexcept;
double frobenius_norm_sq(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;
double dot(const Matrix& a, const Matrix& b);
double trace(const Matrix& a);

// Stack blocks [a | b] / [a ; b].
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

Matrix select_cols(const Matrix& a, std::span<const std::size_t> indices);

double vector_norm_sq(std::span<const double> v) noexcept;
double vector_norm(std::span<const double> v) noexcept;

}  // namespace nrc
