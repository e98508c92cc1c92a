#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/models/spec.hpp"

namespace shiftlab::models {

enum class FixtureId { NilpotentTriangular, NonAnalyticLeftInvertible, MonomialModelSpace, FiniteIsometry, ShiftCoshift };

/// Upper-triangular pieces T = [[S, A], [0, B]] for fixtures built that way.
struct TriangularParts {
  StructuredOperator s;
  StructuredOperator a;
  StructuredOperator b;
};

struct FixtureParams {
  /// Dimension of M in the nilpotent triangular fixture.
  std::size_t n = 2;
  /// Weight on its nilpotent block.
  Scalar lambda = Scalar::rational(1, 2);
  /// Degree of the monomial standing in for the inner function in the model-space fixture.
  std::size_t k = 2;
};

struct Fixture {
  FixtureId id = FixtureId::FiniteIsometry;
  std::string name;
  StructuredOperator op;
  std::string description;
  /// Non-empty for adapted fixtures.
  std::string adaptation_note;
  std::optional<TriangularParts> parts;
};

const std::vector<FixtureId>& all_fixtures();
std::string fixture_name(FixtureId id);
std::optional<FixtureId> fixture_from_name(const std::string& name);

Fixture fixture(FixtureId id, const FixtureParams& params = {});

/// Vectors g_k with T^k g_k = target for k = 1..depth, T the non-analytic left-invertible fixture.
struct PreimageChain {
  opcore::FinSupportVector target;
  std::vector<opcore::FinSupportVector> preimages;
};

PreimageChain non_analytic_preimages(std::size_t depth);

}  // namespace shiftlab::models
