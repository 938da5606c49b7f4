#pragma once

#include "arith.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace toric {

// Dense row-major matrix over Int or Rat. Sizes here are tiny (n <= ~12).
template <class T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += a(i, k) * b(k, j);
      }
    return p;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

// U * A * V = diag(s_1, ..., s_k, 0, ...) with s_i | s_{i+1}, U and V unimodular.
struct SmithForm {
  IntMatrix diag;
  IntMatrix left;  // U
  IntMatrix right; // V
};

SmithForm smith_normal_form(const IntMatrix& a);

// Exact determinant of a square integer matrix (fraction-free elimination).
Int determinant(const IntMatrix& a);
Rat determinant(const RatMatrix& a);

// Unique solution of A x = b for square invertible A, or nullopt when singular.
std::optional<std::vector<Rat>> solve(const RatMatrix& a, const std::vector<Rat>& b);

// Inverse of a square matrix with determinant +-1; the result is integral.
IntMatrix unimodular_inverse(const IntMatrix& a);

std::size_t rank(const RatMatrix& a);

RatMatrix to_rational(const IntMatrix& a);

} // namespace toric
