#include "doctest.h"
#include "shiftlab/models/fixtures.hpp"

using namespace shiftlab::opcore;
using namespace shiftlab::models;

namespace {

Scalar q(long a, long b = 1) { return Scalar::rational(a, b); }

StructuredOperator self_commutator_of(const StructuredOperator& t) {
  return subtract(multiply(adjoint(t), t), multiply(t, adjoint(t)));
}

}  // namespace

TEST_CASE("model keys round-trip") {
  const auto a = ModelSpec::x1(2);
  CHECK(a.key() == "x1:2");
  CHECK(a.alphas == std::vector<Scalar>{q(1), q(1)});
  const auto b = ModelSpec::x2(3, 2, {q(3, 4), q(3, 4)});
  CHECK(b.key() == "x2:3,2,3/4,3/4");
  CHECK(b.alphas == std::vector<Scalar>{q(3, 4), q(3, 4), q(1)});
  for (const auto& s : {a, b}) {
    const auto back = ModelSpec::parse_key(s.key());
    CHECK(back.key() == s.key());
    CHECK(back.alphas == s.alphas);
    CHECK(back.m == s.m);
  }
  CHECK_THROWS_AS(ModelSpec::parse_key("x3:1"), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::parse_key("x2:2,1"), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::parse_key("x1:-1"), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::parse_key("x2:1,1,abc"), SpecInvalid);
}

TEST_CASE("model spec validation") {
  CHECK_THROWS_AS(ModelSpec::x2(1, 1, {q(1)}).validate(), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::x2(1, 2, {q(3, 4), q(3, 4)}).validate(), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::x2(2, 2, {q(3, 4), q(1, 2)}).validate(), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::x2(1, 1, {q(0)}).validate(), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::x1(0).validate(), SpecInvalid);
  CHECK_THROWS_AS(ModelSpec::x1(1, FinMatrix{{q(0), q(1)}, {q(0), q(0)}}).validate(), SpecInvalid);
  CHECK_NOTHROW(ModelSpec::x1(1, FinMatrix{{q(0), q(1)}, {q(1), q(0)}}).validate());
}

TEST_CASE("defect weights") {
  CHECK(build_D({q(3, 4), q(5, 9), q(1)}) == FinMatrix::diagonal({q(1, 2), q(2, 3), q(0)}));
  CHECK_THROWS_AS(build_D({q(1, 4)}), NotPerfectSquare);
  CHECK_THROWS_AS(build_D({q(3, 2)}), OutOfRange);
  CHECK_THROWS_AS(build_D({q(0)}), OutOfRange);
  const FinMatrix f = build_D({q(1, 4)}, Mode::Float);
  CHECK(std::abs(f(0, 0).to_complex().real() - std::sqrt(0.75)) < 1e-15);
  const FinMatrix dt = build_Dtilde({q(3, 4)}, 3);
  CHECK(dt.rows() == 3);
  CHECK(dt.cols() == 1);
  CHECK(dt(0, 0) == q(1, 2));
  CHECK(dt(1, 0).is_zero());
  CHECK_THROWS_AS(build_Dtilde({q(3, 4), q(3, 4)}, 1), OutOfRange);
}

TEST_CASE("X1 is a shift plus the normal block") {
  CHECK(equals(build_X1(ModelSpec::x1(2)), shift({2, 0})));
  const FinMatrix n = FinMatrix::diagonal({q(1, 3)});
  const auto t = build_X1(ModelSpec::x1(1, n));
  CHECK(t.shape_in == SpaceShape{1, 1});
  CHECK(t.entry(Coord::tail_at(0), Coord::tail_at(0)) == q(1, 3));
  CHECK(t.entry(Coord::strand(0, 1), Coord::strand(0, 0)) == q(1));
  CHECK(t.tag->model == "x1:1");
}

TEST_CASE("X2 entries and commutator") {
  const auto t = build_X2(ModelSpec::x2(1, 1, {q(3, 4)}));
  CHECK(t.shape_in == SpaceShape{2, 0});
  CHECK(t.entry(Coord::strand(0, 1), Coord::strand(0, 0)) == q(1));
  CHECK(t.entry(Coord::strand(1, 0), Coord::strand(1, 1)) == q(1, 2));
  CHECK(t.entry(Coord::strand(0, 0), Coord::strand(1, 0)) == q(1, 2));
  CHECK(t.entry(Coord::strand(1, 1), Coord::strand(1, 0)).is_zero());

  // Frozen from the dense oracle: the commutator of X2(1,1,3/4) is 3/4 at (0,0) and nothing else.
  const auto c = self_commutator_of(t);
  CHECK(c.symbol.is_zero());
  CHECK(equals(c, scale(q(3, 4), basis_rank_one(t.shape_in, Coord::strand(0, 0), Coord::strand(0, 0)))));

  const auto t2 = build_X2(ModelSpec::x2(2, 1, {q(3, 4)}, FinMatrix::diagonal({q(1, 3)})));
  const auto c2 = self_commutator_of(t2);
  const SpaceShape sh = t2.shape_in;
  CHECK(equals(c2, add(scale(q(3, 4), basis_rank_one(sh, Coord::strand(0, 0), Coord::strand(0, 0))),
                       basis_rank_one(sh, Coord::strand(1, 0), Coord::strand(1, 0)))));

  const auto t3 = build_X2(ModelSpec::x2(3, 2, {q(3, 4), q(3, 4)}));
  const auto c3 = self_commutator_of(t3);
  StructuredOperator want = zero_operator(t3.shape_in, t3.shape_in);
  for (std::size_t i = 0; i < 3; ++i) {
    want = add(want, scale(i < 2 ? q(3, 4) : q(1), basis_rank_one(t3.shape_in, Coord::strand(i, 0), Coord::strand(i, 0))));
  }
  CHECK(equals(c3, want));
}

TEST_CASE("shift/co-shift builder") {
  const SpaceShape h{1, 0};
  const auto x = basis_rank_one(h, Coord::strand(0, 0), Coord::strand(0, 0));
  const auto t = build_shift_coshift(1, x);
  CHECK(t.shape_in == SpaceShape{2, 0});
  CHECK(t.entry(Coord::strand(0, 1), Coord::strand(0, 0)) == q(1));
  CHECK(t.entry(Coord::strand(1, 0), Coord::strand(1, 1)) == q(1));
  CHECK(t.entry(Coord::strand(0, 0), Coord::strand(1, 0)) == q(1));
  CHECK_THROWS_AS(build_shift_coshift(2, x), ShapeMismatch);
}

TEST_CASE("fixture registry") {
  CHECK(all_fixtures().size() == 5);
  for (auto id : all_fixtures()) {
    const auto f = fixture(id);
    CHECK(fixture_from_name(f.name) == id);
    CHECK(f.op.is_square());
    CHECK(!f.description.empty());
  }
  CHECK(!fixture(FixtureId::NilpotentTriangular).adaptation_note.empty());
  CHECK(!fixture(FixtureId::MonomialModelSpace).adaptation_note.empty());
  CHECK(fixture(FixtureId::FiniteIsometry).adaptation_note.empty());
  CHECK(!fixture_from_name("example-9.9"));
  CHECK_THROWS_AS(fixture(FixtureId::NilpotentTriangular, {0}), SpecInvalid);
}

TEST_CASE("finite-isometry fixture matches the dense oracle") {
  const auto t = fixture(FixtureId::FiniteIsometry).op;
  const SpaceShape sh = t.shape_in;
  CHECK(sh == SpaceShape{2, 2});
  // I - T*T = 3/4 at t1; T*T - TT* = 1 at (0,0), 3/4 at t0, 1/4 at t1.
  const auto d = subtract(identity(sh), multiply(adjoint(t), t));
  CHECK(equals(d, scale(q(3, 4), basis_rank_one(sh, Coord::tail_at(1), Coord::tail_at(1)))));
  const auto c = self_commutator_of(t);
  const auto want = add(add(basis_rank_one(sh, Coord::strand(0, 0), Coord::strand(0, 0)),
                            scale(q(3, 4), basis_rank_one(sh, Coord::tail_at(0), Coord::tail_at(0)))),
                        scale(q(1, 4), basis_rank_one(sh, Coord::tail_at(1), Coord::tail_at(1))));
  CHECK(equals(c, want));
}

TEST_CASE("triangular fixtures reassemble from their parts") {
  for (auto id : {FixtureId::NilpotentTriangular, FixtureId::MonomialModelSpace}) {
    const auto f = fixture(id);
    REQUIRE(f.parts);
    const auto& p = *f.parts;
    const auto z = zero_operator(p.b.shape_out, p.s.shape_in);
    CHECK(equals(block_compose({{p.s, p.a}, {z, p.b}}), f.op));
    CHECK(multiply(adjoint(p.s), p.a).symbol.is_zero());
    CHECK(equals(multiply(adjoint(p.s), p.a), zero_operator(p.s.shape_in, p.a.shape_in)));
  }
}

TEST_CASE("non-analytic preimage chain") {
  const auto t = fixture(FixtureId::NonAnalyticLeftInvertible).op;
  const auto chain = non_analytic_preimages(8);
  REQUIRE(chain.preimages.size() == 8);
  CHECK(!chain.target.is_zero());
  for (std::size_t k = 1; k <= 8; ++k) {
    FinSupportVector v = chain.preimages[k - 1];
    for (std::size_t i = 0; i < k; ++i) v = apply(t, v);
    CHECK(v == chain.target);
  }
}
