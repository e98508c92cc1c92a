#include "shiftlab/exactnum/kernels.hpp"

#include <cstddef>

namespace shiftlab::exactnum::kernels {

namespace {

void check(const FinMatrix& a, const FinMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
}

void row_times(const FinMatrix& a, const FinMatrix& b, FinMatrix& c, std::size_t i) {
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const Scalar& aik = a(i, k);
    if (aik.is_zero()) continue;
    for (std::size_t j = 0; j < b.cols(); ++j) {
      const Scalar& bkj = b(k, j);
      if (bkj.is_zero()) continue;
      c(i, j).fma(aik, bkj);
    }
  }
}

}  // namespace

FinMatrix matmul_serial(const FinMatrix& a, const FinMatrix& b) {
  check(a, b);
  FinMatrix c(a.rows(), b.cols(), a.mode() == Mode::Float || b.mode() == Mode::Float ? Mode::Float : Mode::Exact);
  for (std::size_t i = 0; i < a.rows(); ++i) row_times(a, b, c, i);
  return c;
}

FinMatrix matmul_parallel(const FinMatrix& a, const FinMatrix& b) {
  check(a, b);
  FinMatrix c(a.rows(), b.cols(), a.mode() == Mode::Float || b.mode() == Mode::Float ? Mode::Float : Mode::Exact);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < rows; ++i) row_times(a, b, c, static_cast<std::size_t>(i));
  return c;
}

FinVector matvec_serial(const FinMatrix& a, const FinVector& x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
  FinVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (!a(i, k).is_zero() && !x[k].is_zero()) y[i].fma(a(i, k), x[k]);
    }
  }
  return y;
}

FinVector matvec_parallel(const FinMatrix& a, const FinVector& x) {
  if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
  FinVector y(a.rows());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (!a(i, k).is_zero() && !x[k].is_zero()) y[i].fma(a(i, k), x[k]);
    }
  }
  return y;
}

}  // namespace shiftlab::exactnum::kernels
