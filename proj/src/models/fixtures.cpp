#include "shiftlab/models/fixtures.hpp"

namespace shiftlab::models {

using opcore::Coord;
using opcore::FinSupportVector;

namespace {

const SpaceShape kH{1, 0};

// Strands → tail-free space, reading the q tail coordinates into level 0 through m (p×q).
StructuredOperator tail_to_level0(std::size_t p, const FinMatrix& m) {
  StructuredOperator a(SpaceShape{p, 0}, SpaceShape{0, m.cols()});
  a.kernel.n_out = 1;
  a.kernel.block = m;
  a.canonicalize();
  return a;
}

Fixture nilpotent_triangular(const FixtureParams& prm) {
  const std::size_t n = prm.n, p = n + 1;
  if (n == 0) throw SpecInvalid("nilpotent triangular fixture needs n >= 1");
  if (!prm.lambda.is_exact() || (prm.lambda.abs2() - Scalar(1)).real_sign() >= 0) {
    throw SpecInvalid("nilpotent triangular fixture needs an exact lambda with |lambda| < 1");
  }
  const SpaceShape tail{0, n + 1};
  FinMatrix b(n + 1, n + 1);
  for (std::size_t i = 0; i + 1 < n; ++i) b(i + 1, i) = prm.lambda;
  FinMatrix am(p, n + 1);
  am(0, n - 1) = Scalar(1);
  am(1, n) = Scalar(1);
  Fixture f;
  f.id = FixtureId::NilpotentTriangular;
  f.name = "example-6.1";
  f.parts = TriangularParts{opcore::shift(SpaceShape{p, 0}), tail_to_level0(p, am), opcore::tail_block(tail, b)};
  f.op = opcore::block_compose({{f.parts->s, f.parts->a}, {opcore::zero_operator(tail, SpaceShape{p, 0}), f.parts->b}});
  f.description = "[[S, A], [0, B]] with B = lambda S1 on M (+) 0 nilpotent and A a partial isometry from span{x_n, y} into ker S*";
  f.adaptation_note =
      "finite analogue: S has multiplicity n+1 instead of infinite multiplicity, the complement of M is the single vector y, "
      "and S1 sends x_i to x_(i+1) so that A*A + B*B = P_span{x_n,y} + |lambda|^2 P_span{x_1..x_(n-1)} is invertible";
  return f;
}

Fixture non_analytic() {
  Fixture f;
  f.id = FixtureId::NonAnalyticLeftInvertible;
  f.name = "example-6.2";
  f.op = build_shift_coshift(1, opcore::basis_rank_one(kH, Coord::strand(0, 0), Coord::strand(0, 0)));
  f.description =
      "[[S, X], [0, S*]] with X = e0 (x) e0, so ker X = (ker S*)^perp; left-invertible but not analytic: "
      "T^k [0; e_k] = [0; e_0] for every k";
  return f;
}

Fixture monomial_model_space(const FixtureParams& prm) {
  const std::size_t k = prm.k;
  if (k == 0) throw SpecInvalid("model-space fixture needs k >= 1");
  StructuredOperator s(kH, kH);
  s.symbol.coeffs[static_cast<int>(k)] = FinMatrix::identity(1);
  StructuredOperator a(kH, kH);
  a.kernel.n_out = k;
  a.kernel.n_in = k;
  a.kernel.block = FinMatrix::identity(k);
  StructuredOperator b = opcore::shift(kH);
  b.tag = opcore::ConstructionTag{"shift", true, true, "x1:1", "unilateral shift"};
  Fixture f;
  f.id = FixtureId::MonomialModelSpace;
  f.name = "example-6.3";
  f.parts = TriangularParts{s, a, b};
  f.op = opcore::block_compose({{s, a}, {opcore::zero_operator(kH, kH), b}});
  f.description = "[[S, A], [0, B]] with S = T_{z^k}, A = P_Q the projection onto Q = span{1..z^(k-1)} = ker S*, B = T_z";
  f.adaptation_note =
      "the inner function is the monomial z^k, so the model space Q is k-dimensional; S = T_{z^k} has ker S* = Q, "
      "A = P_Q maps into ker S*, and A*A + B*B = I + P_Q rather than 2I";
  return f;
}

Fixture finite_isometry() {
  const SpaceShape h2{2, 0}, c2{0, 2};
  Fixture f;
  f.id = FixtureId::FiniteIsometry;
  f.name = "example-6.4";
  f.parts = TriangularParts{opcore::shift(h2), tail_to_level0(2, FinMatrix{{Scalar(0), Scalar(0)}, {Scalar(1), Scalar(0)}}),
                            opcore::tail_block(c2, FinMatrix{{Scalar(0), Scalar::rational(1, 2)}, {Scalar(0), Scalar(0)}})};
  f.op = opcore::block_compose({{f.parts->s, f.parts->a}, {opcore::zero_operator(c2, h2), f.parts->b}});
  f.description = "[[M_z, 0, 0], [0, M_z, A], [0, 0, B]] with A(x1, x2) = x1 and B(x1, x2) = (x2/2, 0)";
  return f;
}

Fixture shift_coshift() {
  Fixture f = non_analytic();
  f.id = FixtureId::ShiftCoshift;
  f.name = "prop-2.2";
  f.description = "[[S, X], [0, S*]] with X = e0 (x) e0, a partial isometry onto ker S*; an isometry";
  return f;
}

}  // namespace

const std::vector<FixtureId>& all_fixtures() {
  static const std::vector<FixtureId> ids{FixtureId::NilpotentTriangular, FixtureId::NonAnalyticLeftInvertible, FixtureId::MonomialModelSpace, FixtureId::FiniteIsometry,
                                          FixtureId::ShiftCoshift};
  return ids;
}

std::string fixture_name(FixtureId id) {
  switch (id) {
    case FixtureId::NilpotentTriangular:
      return "example-6.1";
    case FixtureId::NonAnalyticLeftInvertible:
      return "example-6.2";
    case FixtureId::MonomialModelSpace:
      return "example-6.3";
    case FixtureId::FiniteIsometry:
      return "example-6.4";
    case FixtureId::ShiftCoshift:
      return "prop-2.2";
  }
  return "";
}

std::optional<FixtureId> fixture_from_name(const std::string& name) {
  for (auto id : all_fixtures()) {
    if (fixture_name(id) == name) return id;
  }
  return std::nullopt;
}

Fixture fixture(FixtureId id, const FixtureParams& params) {
  switch (id) {
    case FixtureId::NilpotentTriangular:
      return nilpotent_triangular(params);
    case FixtureId::NonAnalyticLeftInvertible:
      return non_analytic();
    case FixtureId::MonomialModelSpace:
      return monomial_model_space(params);
    case FixtureId::FiniteIsometry:
      return finite_isometry();
    case FixtureId::ShiftCoshift:
      return shift_coshift();
  }
  throw std::logic_error("unknown fixture");
}

PreimageChain non_analytic_preimages(std::size_t depth) {
  // g = e_1 in the lower copy: x = X g = 0 and S* g = e_0; g_k = e_k lies in ker X.
  const SpaceShape sh{2, 0};
  PreimageChain c;
  c.target = FinSupportVector::basis(sh, Coord::strand(1, 0));
  for (std::size_t k = 1; k <= depth; ++k) c.preimages.push_back(FinSupportVector::basis(sh, Coord::strand(1, k)));
  return c;
}

}  // namespace shiftlab::models
