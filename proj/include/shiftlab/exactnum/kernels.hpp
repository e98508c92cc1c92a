#pragma once

#include "shiftlab/exactnum/matrix.hpp"

namespace shiftlab::exactnum::kernels {

// Dense products. The serial versions are the reference the parallel ones are
// tested against; both skip structurally zero left operands, which dominates
// for the banded truncations this library produces.
FinMatrix matmul_serial(const FinMatrix& a, const FinMatrix& b);
FinMatrix matmul_parallel(const FinMatrix& a, const FinMatrix& b);

FinVector matvec_serial(const FinMatrix& a, const FinVector& x);
FinVector matvec_parallel(const FinMatrix& a, const FinVector& x);

/// Work size (rows * inner * cols) above which operator* dispatches to the parallel kernel.
inline constexpr std::size_t kParallelThreshold = 32 * 32 * 32;

}  // namespace shiftlab::exactnum::kernels
