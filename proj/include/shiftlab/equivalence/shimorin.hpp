#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/opcore/algebra.hpp"

namespace shiftlab::equivalence {

using opcore::FinMatrix;
using opcore::FinSupportVector;
using opcore::FinVector;
using opcore::Scalar;
using opcore::StructuredOperator;
using opcore::TolerancePolicy;

class NotLeftInvertible : public std::domain_error {
 public:
  NotLeftInvertible(const std::string& what, FinSupportVector witness)
      : std::domain_error(what), witness_(std::move(witness)) {}
  const FinSupportVector& witness() const { return witness_; }

 private:
  FinSupportVector witness_;
};

class KernelNotFinitelySupported : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The eight standard sample points of the unit disc.
std::vector<Scalar> standard_disc_points();

struct ShimorinModelData {
  StructuredOperator left_inverse;
  std::string left_inverse_choice = "L = (T*T)^-1 T*";
  /// Pairwise orthogonal basis of ker T* and its squared norms.
  std::vector<FinSupportVector> kernel_basis;
  FinVector kernel_gram;
  std::vector<FinSupportVector> generators;
  /// coefficients[g][n]: coordinates of P_{ker T*} L^n x_g in kernel_basis.
  std::vector<std::vector<FinVector>> coefficients;
  std::vector<Scalar> sample_points;
  /// Blocks K(z_u, z_v) of the truncated reproducing kernel, indexed (u, a), (v, b).
  FinMatrix gram;
  bool gram_psd = false;
  double gram_min_eigenvalue = 0.0;
  std::size_t depth = 0;
};

struct ShimorinOptions {
  std::size_t depth = 32;
  /// Empty means standard_disc_points().
  std::vector<Scalar> samples;
  /// Empty means every basis coordinate at levels < 2 and every tail coordinate.
  std::vector<FinSupportVector> generators;
  double psd_tol = 1e-8;
  TolerancePolicy tol;
};

ShimorinModelData shimorin_model(const StructuredOperator& t, const ShimorinOptions& opts = {});

/// First n with c_n(T x) != c_{n-1}(x) (c_{-1} = 0) over the generators, or -1 when none.
long coefficient_shift_violation(const StructuredOperator& t, const ShimorinModelData& data, const TolerancePolicy& tol = {});

}  // namespace shiftlab::equivalence
