#include "doctest.h"
#include "../support/oracle.hpp"

using namespace shiftlab::opcore;
using shiftlab::testing::leading;
using shiftlab::testing::oracle_truncation;
using shiftlab::testing::random_operator;
using shiftlab::testing::random_shape;

namespace {

Scalar q(long a, long b = 1) { return Scalar::rational(a, b); }

const SpaceShape kH{1, 0};

StructuredOperator finite_isometry_example() {
  const SpaceShape c2{0, 2};
  StructuredOperator a(kH, c2);
  a.kernel.n_out = 1;
  a.kernel.block = FinMatrix{{q(1), q(0)}};
  const StructuredOperator b = tail_block(c2, FinMatrix{{q(0), q(1, 2)}, {q(0), q(0)}});
  return block_compose({{shift(kH), zero_operator(kH, kH), zero_operator(kH, c2)},
                        {zero_operator(kH, kH), shift(kH), a},
                        {zero_operator(c2, kH), zero_operator(c2, kH), b}});
}

}  // namespace

TEST_CASE("primitives") {
  const StructuredOperator s = shift(kH);
  CHECK(s.symbol.coeffs.size() == 1);
  CHECK(s.symbol.coeff(1) == FinMatrix{{q(1)}});
  CHECK(s.kernel.n_out == 0);
  CHECK(s.kernel.n_in == 0);

  const StructuredOperator tb = tail_block({0, 2}, FinMatrix::diagonal({q(3, 4), q(1, 4)}));
  CHECK(tb.symbol.is_zero());
  CHECK(tb.kernel.block == FinMatrix::diagonal({q(3, 4), q(1, 4)}));

  const SpaceShape sh{1, 2};
  const StructuredOperator a = cross_block(sh, FinMatrix{{q(1), q(0)}}, CrossDirection::TailToStrands);
  CHECK(apply(a, FinSupportVector::basis(sh, Coord::tail_at(0))) == FinSupportVector::basis(sh, Coord::strand(0, 0)));
  CHECK(apply(a, FinSupportVector::basis(sh, Coord::tail_at(1))).is_zero());
  CHECK_THROWS_AS(tail_block({1, 1}, FinMatrix::identity(2)), ShapeMismatch);
}

TEST_CASE("block_compose") {
  const StructuredOperator s2 = block_compose({{shift(kH), zero_operator(kH, kH)}, {zero_operator(kH, kH), shift(kH)}});
  CHECK(equals(s2, shift({2, 0})));
  const StructuredOperator t = finite_isometry_example();
  CHECK(block_compose({{t}}).str() == t.str());
  const SpaceShape sh{2, 2};
  const StructuredOperator direct =
      add(add(shift(sh), cross_block(sh, FinMatrix{{q(0), q(0)}, {q(1), q(0)}}, CrossDirection::TailToStrands)),
          tail_block(sh, FinMatrix{{q(0), q(1, 2)}, {q(0), q(0)}}));
  CHECK(equals(t, direct));
  CHECK_THROWS_AS(block_compose({{shift(kH), shift({0, 1})}}), ShapeMismatch);
}

TEST_CASE("add, scale, adjoint") {
  CHECK(equals(adjoint(shift(kH)), adjoint_shift(kH)));
  const StructuredOperator t = finite_isometry_example();
  const StructuredOperator z = add(t, scale(q(-1), t));
  CHECK(z.symbol.is_zero());
  CHECK(z.kernel.n_out == 0);
  CHECK(z.kernel.n_in == 0);
  CHECK(z.kernel.block.is_zero());
  const StructuredOperator e01 = basis_rank_one(kH, Coord::strand(0, 0), Coord::strand(0, 1));
  CHECK(equals(adjoint(e01), basis_rank_one(kH, Coord::strand(0, 1), Coord::strand(0, 0))));
}

TEST_CASE("multiply: shift relations") {
  const StructuredOperator s = shift(kH), ss = adjoint_shift(kH);
  CHECK(equals(multiply(ss, s), identity(kH)));
  const StructuredOperator p0 = basis_rank_one(kH, Coord::strand(0, 0), Coord::strand(0, 0));
  CHECK(equals(multiply(s, ss), subtract(identity(kH), p0)));
  CHECK_FALSE(equals(multiply(s, ss), identity(kH)));
  for (std::size_t p = 1; p <= 4; ++p) {
    const SpaceShape sh{p, 1};
    StructuredOperator proj0(sh, sh);
    for (std::size_t s0 = 0; s0 < p; ++s0) proj0 = add(proj0, basis_rank_one(sh, Coord::strand(s0, 0), Coord::strand(s0, 0)));
    StructuredOperator id_strands = subtract(identity(sh), tail_block(sh, FinMatrix::identity(1)));
    CHECK(equals(multiply(adjoint_shift(sh), shift(sh)), id_strands));
    CHECK(equals(multiply(shift(sh), adjoint_shift(sh)), subtract(id_strands, proj0)));
  }
  // S^m S*^n = T_{z^{m-n}} - Σ_{j<n} e_{m-n+j}⊗e_j.
  const StructuredOperator s3 = power(s, 3), ss2 = power(ss, 2);
  StructuredOperator expect = shift(kH);
  for (std::size_t j = 0; j < 2; ++j) expect = subtract(expect, basis_rank_one(kH, Coord::strand(0, 1 + j), Coord::strand(0, j)));
  CHECK(equals(multiply(s3, ss2), expect));
}

TEST_CASE("multiply: finite isometry commutator") {
  const StructuredOperator t = finite_isometry_example();
  const StructuredOperator c = commutator(t);
  const SpaceShape sh{2, 2};
  const StructuredOperator expect =
      add(basis_rank_one(sh, Coord::strand(0, 0), Coord::strand(0, 0)), tail_block(sh, FinMatrix::diagonal({q(3, 4), q(1, 4)})));
  CHECK(equals(c, expect));
  CHECK(c.symbol.is_zero());
  CHECK(c.kernel.n_out == 1);
  CHECK(c.kernel.n_in == 1);
}

TEST_CASE("apply") {
  const FinSupportVector e0 = FinSupportVector::basis(kH, Coord::strand(0, 0));
  CHECK(apply(shift(kH), e0) == FinSupportVector::basis(kH, Coord::strand(0, 1)));
  CHECK(apply(adjoint_shift(kH), e0).is_zero());
  const SpaceShape sh{2, 2};
  const FinSupportVector y = apply(finite_isometry_example(), FinSupportVector::basis(sh, Coord::tail_at(0)));
  CHECK(y == FinSupportVector::basis(sh, Coord::strand(1, 0)));
  const FinSupportVector y2 = apply(finite_isometry_example(), FinSupportVector::basis(sh, Coord::tail_at(1)));
  CHECK(y2 == FinSupportVector::basis(sh, Coord::tail_at(0)).scaled(q(1, 2)));
  CHECK_THROWS_AS(apply(shift(kH), FinSupportVector::basis(sh, Coord::tail_at(0))), ShapeMismatch);
}

TEST_CASE("dense_truncation") {
  const FinMatrix s3 = dense_truncation(shift(kH), 3);
  CHECK(s3 == FinMatrix{{q(0), q(0), q(0)}, {q(1), q(0), q(0)}, {q(0), q(1), q(0)}});
  const StructuredOperator p = subtract(identity(kH), multiply(shift(kH), adjoint_shift(kH)));
  CHECK(dense_truncation(p, 4) == FinMatrix::diagonal({q(1), q(0), q(0), q(0)}));
  const StructuredOperator t = finite_isometry_example();
  const FinMatrix d = dense_truncation(t, 4);
  CHECK(d.rows() == 10);
  CHECK(d == oracle_truncation(t, 4));
  // Commutator of truncations agrees with the structured commutator on the interior.
  const FinMatrix dt = dense_truncation(t, 6);
  const FinMatrix dense_comm = dt.adjoint() * dt - dt * dt.adjoint();
  CHECK(leading(dense_comm, {2, 2}, {2, 2}, 6, 4) == dense_truncation(commutator(t), 4));
}

TEST_CASE("structured inverse and finite kernel") {
  const SpaceShape sh{2, 2};
  const StructuredOperator t = finite_isometry_example();
  const StructuredOperator g = multiply(adjoint(t), t);
  const StructuredOperator gi = structured_inverse(g);
  CHECK(equals(multiply(gi, g), identity(sh)));
  CHECK(equals(multiply(g, gi), identity(sh)));
  try {
    structured_inverse(multiply(shift(kH), adjoint_shift(kH)));
    FAIL("expected NotInvertible");
  } catch (const NotInvertible& e) {
    CHECK(e.witness() == FinSupportVector::basis(kH, Coord::strand(0, 0)));
  }
  const auto ker = finite_kernel(adjoint(t), 2);
  REQUIRE(ker.size() == 2);
  for (const auto& v : ker) CHECK(apply(adjoint(t), v).is_zero());
}

TEST_CASE("algebraic properties on random class members") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 60; ++it) {
    const SpaceShape x = random_shape(rng), y = random_shape(rng), z = random_shape(rng), w = random_shape(rng);
    const StructuredOperator a = random_operator(rng, z, y), b = random_operator(rng, y, x), c = random_operator(rng, x, w);
    CHECK(equals(adjoint(adjoint(a)), a));
    CHECK(equals(adjoint(multiply(a, b)), multiply(adjoint(b), adjoint(a))));
    CHECK(equals(multiply(multiply(a, b), c), multiply(a, multiply(b, c))));
    StructuredOperator again = a;
    again.canonicalize();
    CHECK(again.str() == a.str());

    const std::size_t n = 16, big = n + a.band() + b.band() + 4;
    const FinMatrix lhs = dense_truncation(multiply(a, b), n);
    const FinMatrix rhs = leading(oracle_truncation(a, big) * oracle_truncation(b, big), z, x, big, n);
    CHECK(lhs == rhs);

    FinSupportVector v(x);
    for (std::size_t l = 0; l < 3; ++l) {
      for (std::size_t s = 0; s < x.p; ++s) v.ref(Coord::strand(s, l)) = shiftlab::testing::random_rational(rng);
    }
    for (std::size_t t = 0; t < x.q; ++t) v.ref(Coord::tail_at(t)) = shiftlab::testing::random_rational(rng);
    CHECK(apply(multiply(a, b), v) == apply(a, apply(b, v)));
  }
}
