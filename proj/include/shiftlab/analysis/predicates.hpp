#pragma once

#include "shiftlab/analysis/types.hpp"

namespace shiftlab::analysis {

StructuredOperator defect_squared(const StructuredOperator& t);
StructuredOperator defect_squared_adjoint(const StructuredOperator& t);

DefectData defect_data(const StructuredOperator& defect_sq, const TolerancePolicy& tol = {});
DefectData defect_space(const StructuredOperator& t, const TolerancePolicy& tol = {});
DefectData defect_space_adjoint(const StructuredOperator& t, const TolerancePolicy& tol = {});

SelfCommutator self_commutator(const StructuredOperator& t, const TolerancePolicy& tol = {});

/// Positivity of a Hermitian class member, with an exact witness on refutation.
Certainty positivity(const StructuredOperator& p, const TolerancePolicy& tol = {});
Certainty is_contraction(const StructuredOperator& t, const TolerancePolicy& tol = {});
Certainty is_hyponormal(const StructuredOperator& t, const TolerancePolicy& tol = {});

/// <P x, x> is real and negative (exact, or below -psd_tol in Float mode).
bool refutes_positivity(const StructuredOperator& p, const FinSupportVector& x, const TolerancePolicy& tol = {});

/// Whether x lies in the closed range of a positive operator with constant symbol; nullopt otherwise.
std::optional<bool> in_closed_range(const StructuredOperator& p, const FinSupportVector& x, const TolerancePolicy& tol = {});

/// Searches for a window-supported reducing subspace on which T is normal.
Certainty purity_evidence(const StructuredOperator& t, std::size_t depth = 8, std::size_t window = 32,
                          const TolerancePolicy& tol = {});

/// Classification without certificates.
Classification classify_core(const StructuredOperator& t, const ClassifyOptions& opts = {});
/// Full classification including the certificates derivable from T alone.
Classification classify(const StructuredOperator& t, const ClassifyOptions& opts = {});

}  // namespace shiftlab::analysis
