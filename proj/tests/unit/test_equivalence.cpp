#include "doctest.h"
#include "shiftlab/equivalence/intertwine.hpp"
#include "shiftlab/equivalence/shimorin.hpp"
#include "shiftlab/models/fixtures.hpp"

using namespace shiftlab::equivalence;
using namespace shiftlab::models;
using shiftlab::opcore::adjoint;
using shiftlab::opcore::add;
using shiftlab::opcore::apply;
using shiftlab::opcore::basis_rank_one;
using shiftlab::opcore::equals;
using shiftlab::opcore::FinMatrix;
using shiftlab::opcore::identity;
using shiftlab::opcore::multiply;
using shiftlab::opcore::shift;
using shiftlab::opcore::subtract;

namespace {

Scalar q(long a, long b = 1) { return Scalar::rational(a, b); }

const TolerancePolicy kExact{0.0, 0.0, 128};

BasisRuleUnitary unitary_for(const StructuredOperator& t, const ModelSpec& spec, std::size_t depth) {
  const auto c = shiftlab::analysis::classify_core(t, {kExact});
  shiftlab::analysis::DecomposeOptions o{kExact};
  o.allow_normal_summand = true;
  const auto d = shiftlab::analysis::decompose_triangular(t, c.purity, o);
  return model_unitary(t, d, spec, depth, kExact);
}

/// Swaps strands 0 and 1 at level 0.
StructuredOperator window_swap(SpaceShape sh) {
  auto e = [&](Coord a, Coord b) { return basis_rank_one(sh, a, b); };
  const Coord a = Coord::strand(0, 0), b = Coord::strand(1, 0);
  auto p = subtract(subtract(identity(sh), e(a, a)), e(b, b));
  return add(add(p, e(a, b)), e(b, a));
}

}  // namespace

TEST_CASE("basis labels") {
  const auto l = basis_labels({2, 1}, 2);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == Coord::strand(0, 0));
  CHECK(l[1] == Coord::strand(1, 0));
  CHECK(l[2] == Coord::strand(0, 1));
  CHECK(l[4] == Coord::tail_at(0));
}

TEST_CASE("identity intertwines an operator with itself") {
  const auto t = fixture(FixtureId::FiniteIsometry).op;
  const auto u = BasisRuleUnitary::identity(t.shape_in);
  const auto r = verify_intertwine(u, t, t, 16, kExact);
  CHECK(r.zero);
  CHECK(r.labels_checked == 16 * 2 + 2);
  CHECK(r.max_residual == 0.0);
  CHECK(!first_non_orthonormal(u, 16));
}

TEST_CASE("residuals detect a wrong intertwiner") {
  const auto x = build_model(ModelSpec::x2(1, 1, {q(3, 4)}));
  const auto swap = window_swap(x.shape_in);
  const auto conj = multiply(swap, multiply(x, adjoint(swap)));
  const auto r = verify_intertwine(BasisRuleUnitary::identity(x.shape_in), conj, x, 8, kExact);
  CHECK(!r.zero);
  CHECK(!r.violations.empty());
  CHECK(r.max_residual > 0.0);
  const auto good = verify_intertwine(BasisRuleUnitary::from_operator(swap), conj, x, 8, kExact);
  CHECK(good.zero);
}

TEST_CASE("parallel and serial verification agree") {
  const auto x = build_model(ModelSpec::x2(2, 1, {q(3, 4)}, FinMatrix::diagonal({q(1, 3)})));
  const auto swap = window_swap(x.shape_in);
  const auto conj = multiply(swap, multiply(x, adjoint(swap)));
  for (const auto& u : {BasisRuleUnitary::identity(x.shape_in), BasisRuleUnitary::from_operator(swap)}) {
    const auto a = verify_intertwine(u, conj, x, 24, kExact);
    const auto b = verify_intertwine_serial(u, conj, x, 24, kExact);
    CHECK(a.zero == b.zero);
    CHECK(a.labels_checked == b.labels_checked);
    CHECK(a.max_residual == b.max_residual);
    CHECK(a.violations == b.violations);
  }
}

TEST_CASE("non-orthonormal images are found") {
  const SpaceShape h{1, 0};
  const BasisRuleUnitary bad(h, h, [h](const Coord& c) {
    return FinSupportVector::basis(h, Coord::strand(0, c.level / 2));
  });
  const auto pair = first_non_orthonormal(bad, 4);
  REQUIRE(pair);
  CHECK(pair->first == Coord::strand(0, 0));
  CHECK(pair->second == Coord::strand(0, 1));
}

TEST_CASE("model unitary on the grid") {
  for (auto [n, m] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {2, 1}, {2, 2}, {3, 2}}) {
    for (bool with_n : {false, true}) {
      const FinMatrix nb = with_n ? FinMatrix::diagonal({q(1, 3)}) : FinMatrix();
      for (const auto& spec : {ModelSpec::x2(n, m, std::vector<Scalar>(m, q(3, 4)), nb), ModelSpec::x1(n, nb)}) {
        CAPTURE(spec.key());
        const auto x = build_model(spec);
        const auto u = unitary_for(x, spec, 32);
        const auto r = verify_intertwine(u, x, x, 32, kExact);
        CHECK(r.zero);
        CHECK(r.violations.empty());
      }
    }
  }
}

TEST_CASE("model unitary recovers a window permutation") {
  const auto spec = ModelSpec::x2(1, 1, {q(3, 4)});
  const auto x = build_model(spec);
  const auto swap = window_swap(x.shape_in);
  const auto t = multiply(swap, multiply(x, adjoint(swap)));
  const auto u = unitary_for(t, spec, 64);
  CHECK(verify_intertwine(u, t, x, 64, kExact).zero);
  CHECK(u.image(Coord::strand(0, 0)) == FinSupportVector::basis(t.shape_in, Coord::strand(1, 0)));
}

TEST_CASE("model unitary rejects the wrong model") {
  const auto x = build_model(ModelSpec::x2(1, 1, {q(3, 4)}));
  CHECK_THROWS_AS(unitary_for(x, ModelSpec::x1(1), 8), SpecMismatch);
  CHECK_THROWS_AS(unitary_for(x, ModelSpec::x2(2, 1, {q(3, 4)}), 8), SpecMismatch);
  CHECK_THROWS_AS(unitary_for(x, ModelSpec::x2(1, 1, {q(5, 9)}), 8), SpecMismatch);
}

TEST_CASE("disc points") {
  const auto p = standard_disc_points();
  REQUIRE(p.size() == 8);
  for (const auto& z : p) {
    CHECK(z.is_exact());
    CHECK(z.abs() < 1.0);
  }
  CHECK(p[7] == Scalar::complex(mpq_class(3, 10), mpq_class(2, 5)));
}

TEST_CASE("shift model data") {
  const auto t = shift({1, 0});
  ShimorinOptions o;
  o.samples = {Scalar(0), q(1, 2)};
  o.tol = kExact;
  const auto d = shimorin_model(t, o);
  CHECK(equals(multiply(d.left_inverse, t), identity(t.shape_in)));
  CHECK(equals(d.left_inverse, adjoint(t)));
  REQUIRE(d.kernel_basis.size() == 1);
  CHECK(d.kernel_basis[0] == FinSupportVector::basis(t.shape_in, Coord::strand(0, 0)));
  // Frozen from the dense oracle: K(z, w) = sum_{n < 32} (z conj w)^n at {0, 1/2}.
  const mpq_class k11("6148914691236517205/4611686018427387904");
  CHECK(d.gram == FinMatrix{{q(1), q(1)}, {q(1), Scalar(k11)}});
  CHECK(d.gram_psd);
  CHECK(coefficient_shift_violation(t, d, kExact) == -1);
  // x = e_n has c_n = 1 and nothing else.
  for (std::size_t g = 0; g < d.generators.size(); ++g) {
    const auto lvl = d.generators[g].levels() - 1;
    for (std::size_t n = 0; n < d.depth; ++n) CHECK(d.coefficients[g][n][0] == (n == lvl ? q(1) : q(0)));
  }
}

TEST_CASE("finite-isometry fixture model data") {
  const auto t = fixture(FixtureId::FiniteIsometry).op;
  ShimorinOptions o;
  o.tol = kExact;
  const auto d = shimorin_model(t, o);
  CHECK(equals(multiply(d.left_inverse, t), identity(t.shape_in)));
  CHECK(d.kernel_basis.size() == 2);
  for (const auto& k : d.kernel_basis) CHECK(apply(adjoint(t), k).is_zero());
  CHECK(d.gram.rows() == 16);
  CHECK(d.gram_psd);
  CHECK(d.gram_min_eigenvalue >= -1e-8);
  CHECK(coefficient_shift_violation(t, d, kExact) == -1);
  CHECK(d.left_inverse_choice == "L = (T*T)^-1 T*");
}

TEST_CASE("model data preconditions") {
  const SpaceShape h{1, 0};
  try {
    shimorin_model(adjoint(shift(h)));
    FAIL("expected NotLeftInvertible");
  } catch (const NotLeftInvertible& e) {
    CHECK(e.witness() == FinSupportVector::basis(h, Coord::strand(0, 0)));
  }
  const auto weighted = add(shift(h), shiftlab::opcore::power(shift(h), 2));
  CHECK_THROWS_AS(shimorin_model(weighted), shiftlab::analysis::PreconditionFailed);
}
