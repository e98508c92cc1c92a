#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/analysis/structure.hpp"
#include "shiftlab/models/spec.hpp"

namespace shiftlab::equivalence {

using opcore::Coord;
using opcore::FinSupportVector;
using opcore::Scalar;
using opcore::SpaceShape;
using opcore::StructuredOperator;
using opcore::TolerancePolicy;

class SpecMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonOrthonormalImages : public std::domain_error {
 public:
  NonOrthonormalImages(const std::string& what, Coord a, Coord b) : std::domain_error(what), pair_(a, b) {}
  const std::pair<Coord, Coord>& pair() const { return pair_; }

 private:
  std::pair<Coord, Coord> pair_;
};

/// Basis labels of a shape: strand coordinates at levels < levels (level-major), then the tail.
std::vector<Coord> basis_labels(SpaceShape shape, std::size_t levels);

/// A unitary given by the images of basis labels.
class BasisRuleUnitary {
 public:
  using Rule = std::function<FinSupportVector(const Coord&)>;

  BasisRuleUnitary(SpaceShape domain, SpaceShape codomain, Rule rule, std::size_t verified_depth = 0);

  static BasisRuleUnitary identity(SpaceShape shape);
  static BasisRuleUnitary from_operator(const StructuredOperator& u);

  SpaceShape domain() const { return domain_; }
  SpaceShape codomain() const { return codomain_; }
  std::size_t verified_depth() const { return verified_depth_; }
  void set_verified_depth(std::size_t d) { verified_depth_ = d; }

  FinSupportVector image(const Coord& label) const;
  /// Images of basis_labels(domain, levels), in that order.
  std::vector<FinSupportVector> images(std::size_t levels) const;
  /// Linear extension to a finitely supported vector.
  FinSupportVector apply(const FinSupportVector& x) const;

 private:
  SpaceShape domain_;
  SpaceShape codomain_;
  Rule rule_;
  std::size_t verified_depth_;
};

/// First pair of labels (level < depth) whose images are not orthonormal, if any.
std::optional<std::pair<Coord, Coord>> first_non_orthonormal(const BasisRuleUnitary& u, std::size_t depth);

struct ResidualReport {
  std::size_t depth = 0;
  std::size_t labels_checked = 0;
  /// Largest absolute entry of any residual.
  double max_residual = 0.0;
  /// Every residual vanished exactly (Exact mode) or within tolerance (Float mode).
  bool zero = true;
  std::vector<Coord> violations;
};

/// Checks A·U(l) = U(B·e_l) for every label l with level < depth.
ResidualReport verify_intertwine(const BasisRuleUnitary& u, const StructuredOperator& a, const StructuredOperator& b,
                                 std::size_t depth, const TolerancePolicy& tol = {});
/// Single-threaded reference for verify_intertwine.
ResidualReport verify_intertwine_serial(const BasisRuleUnitary& u, const StructuredOperator& a, const StructuredOperator& b,
                                        std::size_t depth, const TolerancePolicy& tol = {});

/// Unitary from the model space of spec onto the space of T with T U = U X, X the model operator.
/// Shift strands map to T^s e_i, defect strands to T*^(r+1) e_j / (1 - a_j)^((r+1)/2), the tail to
/// the trailing tail coordinates of the decomposition.
BasisRuleUnitary model_unitary(const StructuredOperator& t, const analysis::TriangularDecomposition& d,
                               const models::ModelSpec& spec, std::size_t verified_depth = 64,
                               const TolerancePolicy& tol = {});

}  // namespace shiftlab::equivalence
