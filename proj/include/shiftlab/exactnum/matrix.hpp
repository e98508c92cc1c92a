#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/exactnum/scalar.hpp"

namespace shiftlab::exactnum {

using FinVector = std::vector<Scalar>;

struct TolerancePolicy {
  double rank_tol = 1e-10;
  double psd_tol = 1e-10;
  int circle_samples = 128;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of Scalars.
class FinMatrix {
 public:
  FinMatrix() = default;
  FinMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  FinMatrix(std::size_t rows, std::size_t cols, Mode mode);
  FinMatrix(std::initializer_list<std::initializer_list<Scalar>> rows);

  static FinMatrix identity(std::size_t n, Mode mode = Mode::Exact);
  static FinMatrix diagonal(const FinVector& diag);
  static FinMatrix column(const FinVector& v);
  static FinMatrix from_columns(std::size_t rows, const std::vector<FinVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  FinVector row(std::size_t i) const;
  FinVector col(std::size_t j) const;

  /// Float if any entry is Float.
  Mode mode() const;
  bool is_zero() const;
  bool is_square() const { return rows_ == cols_; }

  FinMatrix adjoint() const;
  FinMatrix transpose() const;
  FinMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  FinMatrix select(const std::vector<std::size_t>& row_idx, const std::vector<std::size_t>& col_idx) const;

  FinMatrix& operator+=(const FinMatrix& o);
  FinMatrix& operator-=(const FinMatrix& o);
  friend FinMatrix operator+(FinMatrix a, const FinMatrix& b) { return a += b; }
  friend FinMatrix operator-(FinMatrix a, const FinMatrix& b) { return a -= b; }
  FinMatrix scaled(const Scalar& c) const;
  FinMatrix operator*(const FinMatrix& o) const;
  FinVector operator*(const FinVector& v) const;

  friend bool operator==(const FinMatrix& a, const FinMatrix& b);
  /// Entrywise |a - b| <= tol (exact equality when both are exact).
  static bool near(const FinMatrix& a, const FinMatrix& b, double tol);

  std::string str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

/// <u, v> = sum u_i conj(v_i).
Scalar inner(const FinVector& u, const FinVector& v);
FinVector axpy(const Scalar& a, const FinVector& x, FinVector y);
FinVector scale(const Scalar& a, FinVector x);
bool is_zero(const FinVector& v);
FinVector zeros(std::size_t n, Mode mode = Mode::Exact);

}  // namespace shiftlab::exactnum
