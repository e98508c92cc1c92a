#pragma once

#include "shiftlab/analysis/predicates.hpp"

namespace shiftlab::analysis {

class DefectNotFinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotCertifiedHyponormalContraction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// T = U [[S, A], [0, B]] U*, with S acting on ker D_T and B on the defect space.
struct TriangularDecomposition {
  StructuredOperator s;
  StructuredOperator a;
  StructuredOperator b;
  /// Unitary, identity outside a finite window up to a strand permutation; maps the new layout to the old one.
  StructuredOperator basis_change;
  /// Old strand indices feeding the S part (in new order), then the B part.
  std::vector<std::size_t> kernel_strands;
  std::vector<std::size_t> defect_strands;
  /// Tail coordinates of the new layout: the first kernel_tail belong to S, the next defect_tail to B.
  std::size_t kernel_tail = 0;
  std::size_t defect_tail = 0;
  /// Basis of ker S*.
  std::vector<FinSupportVector> wandering_basis;
  /// Window evidence that S has no unitary part.
  Certainty unitary_part_absent;
  std::vector<HypothesisCheck> checks;

  /// [[S, A], [0, B]] in the new layout.
  StructuredOperator triangular() const;
};

struct DecomposeOptions {
  TolerancePolicy tol;
  /// Proceed when purity is only evidenced (Unknown) rather than Certified.
  bool accept_unknown_purity = true;
  /// Proceed when purity is Refuted; the normal summand then sits inside B or S.
  bool allow_normal_summand = false;
  std::size_t unitary_check_window = 32;
};

TriangularDecomposition decompose_triangular(const StructuredOperator& t, const Certainty& purity,
                                             const DecomposeOptions& opts = {});

struct ShiftCoshiftCheck {
  bool is_hypo_contraction = false;
  bool is_partial_isometry_into_ker = false;
  bool is_isometry = false;
  Certainty contraction;
  Certainty hyponormal;
  std::optional<Certificate> certificate;
};

/// Both sides of the shift/co-shift characterization for T = [[S, X], [0, S*]], computed independently.
ShiftCoshiftCheck check_shift_coshift(std::size_t s_mult, const StructuredOperator& x, const TolerancePolicy& tol = {});

/// Sufficient conditions for [[S, A], [0, B]] to be an analytic shift: S*A = 0, A*A + B*B invertible, B analytic.
CertificateOutcome certify_triangular(const StructuredOperator& s, const StructuredOperator& a, const StructuredOperator& b,
                                      const TolerancePolicy& tol = {});
CertificateOutcome certify_triangular(std::size_t s_mult, const StructuredOperator& a, const StructuredOperator& b,
                                      const TolerancePolicy& tol = {});

/// Analyticity of B: decided for finite-dimensional B (nilpotency), pure monomial symbols, and tagged operators.
Certainty analytic_evidence(const StructuredOperator& b, const TolerancePolicy& tol = {});
/// Invertibility of a positive operator with constant symbol.
Certainty invertibility(const StructuredOperator& g, const TolerancePolicy& tol = {});

/// Pure finite isometries are analytic shifts.
CertificateOutcome certify_pure_finite_isometry(const StructuredOperator& t, const Classification& c);
CertificateOutcome certify_pure_finite_isometry(const StructuredOperator& t, const ClassifyOptions& opts = {});

/// Contractions with a projection self-commutator split as shift plus normal; requires every α = 1.
CertificateOutcome certify_projection_commutator(const StructuredOperator& t, const Classification& c);
CertificateOutcome certify_projection_commutator(const StructuredOperator& t, const ClassifyOptions& opts = {});

/// Whether the self-commutator is a projection and the contraction is certified.
bool projection_commutator_applies(const Classification& c);

}  // namespace shiftlab::analysis
