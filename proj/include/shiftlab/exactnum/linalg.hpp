#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "shiftlab/exactnum/matrix.hpp"

namespace shiftlab::exactnum {

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPSD : public std::invalid_argument {
 public:
  explicit NotPSD(FinVector witness)
      : std::invalid_argument("matrix is not positive semidefinite"), witness_(std::move(witness)) {}
  const FinVector& witness() const { return witness_; }

 private:
  FinVector witness_;
};

class Singular : public std::domain_error {
 public:
  explicit Singular(FinVector witness) : std::domain_error("matrix is singular"), witness_(std::move(witness)) {}
  /// Kernel vector normalized so its first nonzero entry is 1.
  const FinVector& witness() const { return witness_; }

 private:
  FinVector witness_;
};

struct Rref {
  FinMatrix reduced;
  std::vector<std::size_t> pivots;
};

/// Reduced row echelon form. Exact input: first-nonzero pivoting. Float input:
/// partial pivoting, entries below rank_tol·scale treated as zero.
Rref rref(FinMatrix m, const TolerancePolicy& tol = {});

std::size_t rank_of(const FinMatrix& m, const TolerancePolicy& tol = {});
std::vector<FinVector> nullspace(const FinMatrix& m, const TolerancePolicy& tol = {});

struct RangeBasis {
  std::vector<FinVector> vectors;
  /// Squared norms of the basis vectors (all ones in Float mode).
  FinVector gram;
};

/// Pairwise orthogonal basis of the column space.
RangeBasis orth_basis_of_range(const FinMatrix& m, const TolerancePolicy& tol = {});

/// Unnormalized Gram-Schmidt; zero vectors are dropped.
RangeBasis gram_schmidt(const std::vector<FinVector>& vs, const TolerancePolicy& tol = {});

bool is_hermitian(const FinMatrix& m, const TolerancePolicy& tol = {});

struct PsdResult {
  bool psd = true;
  /// x with x*Mx < 0 when psd is false.
  FinVector witness;
};

PsdResult psd_witness(const FinMatrix& m, const TolerancePolicy& tol = {});
bool psd_check(const FinMatrix& m, const TolerancePolicy& tol = {});

FinMatrix invert(const FinMatrix& m, const TolerancePolicy& tol = {});

/// Some x with Ax = b, or nullopt.
std::optional<FinVector> solve(const FinMatrix& a, const FinVector& b, const TolerancePolicy& tol = {});
bool in_column_space(const FinMatrix& a, const FinVector& b, const TolerancePolicy& tol = {});

struct SpectralPair {
  Scalar alpha;
  FinVector e;
};

struct SpectralDecomposition {
  std::vector<SpectralPair> pairs;
  bool float_derived = false;
};

/// M = Σ αⱼ eⱼeⱼ* over the positive spectrum, α ascending, eⱼ orthonormal.
SpectralDecomposition spectral_rank_one_decomp(const FinMatrix& m, const TolerancePolicy& tol = {});

Eigen::MatrixXcd to_eigen(const FinMatrix& m);
FinMatrix from_eigen(const Eigen::MatrixXcd& m);
std::vector<double> hermitian_eigenvalues(const FinMatrix& m);

/// Continued-fraction convergents of x with denominator at most max_den.
std::vector<mpq_class> convergents(double x, long max_den = 1000000);

}  // namespace shiftlab::exactnum
