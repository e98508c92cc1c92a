#pragma once

#include <string>

#include "json.hpp"
#include "shiftlab/analysis/structure.hpp"
#include "shiftlab/equivalence/intertwine.hpp"
#include "shiftlab/equivalence/shimorin.hpp"

namespace shiftlab::cli {

/// std::map-backed, so keys serialize sorted.
using Json = nlohmann::json;

Json to_json(const opcore::Scalar& s);
Json to_json(const opcore::FinMatrix& m);
/// Nonzero entries keyed by coordinate ("s,l" or "tK").
Json to_json(const opcore::FinSupportVector& v);
/// Shapes, symbol coefficients by degree, and the nonzero kernel entries as [row, col, value].
Json to_json(const opcore::StructuredOperator& t);
Json to_json(const opcore::TolerancePolicy& tol);
Json to_json(const analysis::Certainty& c);
Json to_json(const analysis::HypothesisCheck& c);
Json to_json(const analysis::Certificate& c);
Json to_json(const analysis::CertificateOutcome& o);
Json to_json(const analysis::Classification& c);
Json to_json(const analysis::TriangularDecomposition& d);
Json to_json(const equivalence::ResidualReport& r);
Json to_json(const equivalence::ShimorinModelData& d);

/// Two-space indented dump with a trailing newline.
std::string render(const Json& j);

}  // namespace shiftlab::cli
