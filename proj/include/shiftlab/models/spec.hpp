#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/opcore/algebra.hpp"

namespace shiftlab::models {

using opcore::FinMatrix;
using opcore::FinVector;
using opcore::Mode;
using opcore::Scalar;
using opcore::SpaceShape;
using opcore::StructuredOperator;

class SpecInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPerfectSquare : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ModelKind { X1, X2 };

struct ModelSpec {
  ModelKind kind = ModelKind::X1;
  std::size_t n = 1;
  std::size_t m = 0;
  /// Length n, ascending; for X2 the first m are < 1 and the rest equal 1.
  std::vector<Scalar> alphas;
  /// Normal operator on the tail; 0x0 for none.
  FinMatrix normal_block;

  static ModelSpec x1(std::size_t n, FinMatrix normal = {});
  static ModelSpec x2(std::size_t n, std::size_t m, const std::vector<Scalar>& small_alphas, FinMatrix normal = {});

  /// Throws SpecInvalid describing the first violated invariant.
  void validate() const;
  /// Compact key, e.g. "x1:2" or "x2:2,1,3/4"; the normal block is not included.
  std::string key() const;
  /// Parses the compact key ("x2:n,m,a1[,a2...]" lists the m small alphas).
  static ModelSpec parse_key(const std::string& key, FinMatrix normal = {});
};

/// diag(√(1−αᵢ)), exact when every 1−αᵢ is a rational square (Exact mode).
FinMatrix build_D(const std::vector<Scalar>& alphas, Mode mode = Mode::Exact);
/// D stacked over an (n−m)×m zero block.
FinMatrix build_Dtilde(const std::vector<Scalar>& alphas, std::size_t n, Mode mode = Mode::Exact);

StructuredOperator build_X1(const ModelSpec& spec);
StructuredOperator build_X2(const ModelSpec& spec);
StructuredOperator build_model(const ModelSpec& spec);

/// [[S, X], [0, S*]] with S the shift of multiplicity s_mult.
StructuredOperator build_shift_coshift(std::size_t s_mult, const StructuredOperator& x);

}  // namespace shiftlab::models
