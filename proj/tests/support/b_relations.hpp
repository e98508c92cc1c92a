#pragma once

// Commutator relations of the B block, checked in the layout of the decomposition.

#include <string>
#include <vector>

#include "shiftlab/analysis/structure.hpp"

namespace shiftlab::testing {

/// Failed relations as readable strings: BB* - B*B = sum h_j (x) h_j and
/// B B*^k h_j = (1 - a_j) B*^(k-1) h_j for k <= depth, with h_j = T'* U* e_j over the commutator pairs.
inline std::vector<std::string> b_relation_failures(const analysis::TriangularDecomposition& d,
                                                    const std::vector<analysis::CommutatorPair>& pairs, std::size_t depth = 8) {
  using namespace opcore;
  const StructuredOperator tri = d.triangular();
  const StructuredOperator bhat = block_compose({{zero_operator(d.s.shape_out, d.s.shape_in), zero_operator(d.s.shape_out, d.b.shape_in)},
                                                 {zero_operator(d.b.shape_out, d.s.shape_in), d.b}});
  const StructuredOperator bstar = adjoint(bhat);
  std::vector<std::string> failures;
  StructuredOperator sum = zero_operator(tri.shape_in, tri.shape_in);
  for (const auto& p : pairs) {
    const FinSupportVector e = apply(adjoint(d.basis_change), p.e);
    const FinSupportVector h = apply(adjoint(tri), e);
    sum = add(sum, outer(h, h));
    const Scalar weight = Scalar(1) - p.alpha;
    FinSupportVector lower = h;
    for (std::size_t k = 1; k <= depth; ++k) {
      const FinSupportVector upper = apply(bstar, lower);
      if (!(apply(bhat, upper) == lower.scaled(weight))) {
        failures.push_back("B B*^" + std::to_string(k) + " h != (1 - " + p.alpha.str() + ") B*^" + std::to_string(k - 1) + " h");
      }
      lower = upper;
    }
  }
  if (!equals(subtract(multiply(bhat, bstar), multiply(bstar, bhat)), sum, TolerancePolicy{0.0, 0.0, 128})) {
    failures.push_back("BB* - B*B != sum h_j (x) h_j");
  }
  return failures;
}

}  // namespace shiftlab::testing
