#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lga {

/// Dense row-major matrix of reals.
///
/// Storage is double precision. Parameters that are persisted are rounded to
/// 32 bits on save (see params.hpp), so values coming out of a checkpoint are
/// exactly representable as float.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::vector<double> col(std::size_t c) const;

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_transposed(const Matrix& a, const Matrix& b);
/// [a, b] column-wise.
Matrix hconcat(const Matrix& a, const Matrix& b);
/// Rows of `m` picked by `index`, in order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> index);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace lga
