#pragma once

#include <variant>
#include <vector>

#include "shiftlab/opcore/operator.hpp"

namespace shiftlab::opcore {

class NotInvertible : public std::domain_error {
 public:
  NotInvertible(const std::string& what, FinSupportVector witness)
      : std::domain_error(what), witness_(std::move(witness)) {}
  const FinSupportVector& witness() const { return witness_; }

 private:
  FinSupportVector witness_;
};

// Primitives.
StructuredOperator zero_operator(SpaceShape out, SpaceShape in);
StructuredOperator identity(SpaceShape shape);
/// M_z on every strand, zero on the tail.
StructuredOperator shift(SpaceShape shape);
StructuredOperator adjoint_shift(SpaceShape shape);
/// x ↦ <x, e_j> e_i.
StructuredOperator basis_rank_one(SpaceShape shape, const Coord& i, const Coord& j);
/// Acts as m on the tail and as zero on the strands.
StructuredOperator tail_block(SpaceShape shape, const FinMatrix& m);
/// Constant strand matrix m ⊗ I on the strands, zero on the tail.
StructuredOperator strand_constant(SpaceShape shape, const FinMatrix& m);
/// x ↦ <x, v> u.
StructuredOperator outer(const FinSupportVector& u, const FinSupportVector& v);

enum class CrossDirection { TailToStrands, StrandsToTail };

/// Level-0 coupling between the tail and the strands: m is p×q (TailToStrands) or q×p.
StructuredOperator cross_block(SpaceShape shape, const FinMatrix& m, CrossDirection dir);

struct Primitive {
  enum class Kind { Shift, AdjointShift, Identity, BasisRankOne, TailBlock, CrossBlock };
  Kind kind = Kind::Identity;
  Coord i, j;
  FinMatrix matrix;
  CrossDirection direction = CrossDirection::TailToStrands;
};

StructuredOperator make_primitive(const Primitive& prim, SpaceShape shape);

/// Row-major grid; strands are concatenated block by block, then the tails.
StructuredOperator block_compose(const std::vector<std::vector<StructuredOperator>>& grid);

StructuredOperator add(const StructuredOperator& a, const StructuredOperator& b);
StructuredOperator subtract(const StructuredOperator& a, const StructuredOperator& b);
StructuredOperator scale(const Scalar& c, const StructuredOperator& a);
StructuredOperator adjoint(const StructuredOperator& a);
StructuredOperator multiply(const StructuredOperator& a, const StructuredOperator& b);
StructuredOperator power(const StructuredOperator& a, std::size_t k);
/// Self-commutator T*T - TT*.
StructuredOperator commutator(const StructuredOperator& t);

FinSupportVector apply(const StructuredOperator& a, const FinSupportVector& x);

/// Exact canonical equality; Float operands compare within tol.psd_tol.
bool equals(const StructuredOperator& a, const StructuredOperator& b, const TolerancePolicy& tol = {});

/// Rows: levels < out_levels plus the output tail; columns: levels < in_levels plus the input tail.
FinMatrix compression(const StructuredOperator& a, std::size_t out_levels, std::size_t in_levels);
FinMatrix dense_truncation(const StructuredOperator& a, std::size_t n);

/// Sub-operator between strand/tail subsets (indices in the listed order).
StructuredOperator restrict_to(const StructuredOperator& a, const std::vector<std::size_t>& out_strands,
                               const std::vector<std::size_t>& out_tails, const std::vector<std::size_t>& in_strands,
                               const std::vector<std::size_t>& in_tails);

/// Inverse of an operator whose symbol is a constant invertible matrix: E⁻¹ beyond the window,
/// the inverted window block inside it.
StructuredOperator structured_inverse(const StructuredOperator& a, const TolerancePolicy& tol = {});

/// Basis of the kernel restricted to vectors supported on levels < levels.
std::vector<FinSupportVector> finite_kernel(const StructuredOperator& a, std::size_t levels,
                                            const TolerancePolicy& tol = {});

/// Expands the kernel block to the given window (never shrinks).
FinMatrix embed_window(const FinMatrix& block, SpaceShape out, std::size_t out_old, std::size_t out_new, SpaceShape in,
                       std::size_t in_old, std::size_t in_new);

}  // namespace shiftlab::opcore
