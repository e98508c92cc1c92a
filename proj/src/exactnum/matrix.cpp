#include "shiftlab/exactnum/matrix.hpp"

#include <algorithm>
#include <sstream>

#include "shiftlab/exactnum/kernels.hpp"

namespace shiftlab::exactnum {

FinMatrix::FinMatrix(std::size_t rows, std::size_t cols, Mode mode)
    : rows_(rows), cols_(cols), data_(rows * cols, Scalar::zero(mode)) {}

FinMatrix::FinMatrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

FinMatrix FinMatrix::identity(std::size_t n, Mode mode) {
  FinMatrix m(n, n, mode);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar::one(mode);
  return m;
}

FinMatrix FinMatrix::diagonal(const FinVector& diag) {
  FinMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

FinMatrix FinMatrix::column(const FinVector& v) {
  FinMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

FinMatrix FinMatrix::from_columns(std::size_t rows, const std::vector<FinVector>& cols) {
  FinMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw ShapeError("from_columns: column length mismatch");
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

FinVector FinMatrix::row(std::size_t i) const {
  return FinVector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

FinVector FinMatrix::col(std::size_t j) const {
  FinVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Mode FinMatrix::mode() const {
  for (const auto& s : data_) {
    if (!s.is_exact()) return Mode::Float;
  }
  return Mode::Exact;
}

bool FinMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

FinMatrix FinMatrix::adjoint() const {
  FinMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j).conj();
  }
  return m;
}

FinMatrix FinMatrix::transpose() const {
  FinMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  }
  return m;
}

FinMatrix FinMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("block out of range");
  FinMatrix m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
  }
  return m;
}

FinMatrix FinMatrix::select(const std::vector<std::size_t>& row_idx, const std::vector<std::size_t>& col_idx) const {
  FinMatrix m(row_idx.size(), col_idx.size());
  for (std::size_t i = 0; i < row_idx.size(); ++i) {
    for (std::size_t j = 0; j < col_idx.size(); ++j) m(i, j) = (*this)(row_idx[i], col_idx[j]);
  }
  return m;
}

FinMatrix& FinMatrix::operator+=(const FinMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix add: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!o.data_[k].is_zero()) data_[k] += o.data_[k];
  }
  return *this;
}

FinMatrix& FinMatrix::operator-=(const FinMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix sub: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!o.data_[k].is_zero()) data_[k] -= o.data_[k];
  }
  return *this;
}

FinMatrix FinMatrix::scaled(const Scalar& c) const {
  FinMatrix m = *this;
  for (auto& s : m.data_) {
    if (!s.is_zero() || !c.is_exact()) s *= c;
  }
  return m;
}

FinMatrix FinMatrix::operator*(const FinMatrix& o) const {
  if (rows_ * cols_ * o.cols_ >= kernels::kParallelThreshold) return kernels::matmul_parallel(*this, o);
  return kernels::matmul_serial(*this, o);
}

FinVector FinMatrix::operator*(const FinVector& v) const { return kernels::matvec_serial(*this, v); }

bool operator==(const FinMatrix& a, const FinMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

bool FinMatrix::near(const FinMatrix& a, const FinMatrix& b, double tol) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t k = 0; k < a.data_.size(); ++k) {
    if (!Scalar::near(a.data_[k], b.data_[k], tol)) return false;
  }
  return true;
}

std::string FinMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) os << "; ";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ", ";
      os << (*this)(i, j).str();
    }
  }
  os << "]";
  return os.str();
}

Scalar inner(const FinVector& u, const FinVector& v) {
  if (u.size() != v.size()) throw ShapeError("inner: length mismatch");
  Scalar acc;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!u[i].is_zero() && !v[i].is_zero()) acc.fma(u[i], v[i].conj());
  }
  return acc;
}

FinVector axpy(const Scalar& a, const FinVector& x, FinVector y) {
  if (x.size() != y.size()) throw ShapeError("axpy: length mismatch");
  if (a.is_zero()) return y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i].is_zero()) y[i].fma(a, x[i]);
  }
  return y;
}

FinVector scale(const Scalar& a, FinVector x) {
  for (auto& s : x) {
    if (!s.is_zero()) s *= a;
  }
  return x;
}

bool is_zero(const FinVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_zero(); });
}

FinVector zeros(std::size_t n, Mode mode) { return FinVector(n, Scalar::zero(mode)); }

}  // namespace shiftlab::exactnum
