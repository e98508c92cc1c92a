#include <random>

#include "doctest.h"
#include "shiftlab/exactnum/kernels.hpp"
#include "shiftlab/exactnum/linalg.hpp"

using namespace shiftlab::exactnum;

namespace {

Scalar q(long a, long b = 1) { return Scalar::rational(a, b); }

Scalar random_scalar(std::mt19937_64& rng, bool complex_part = true) {
  std::uniform_int_distribution<long> num(-6, 6), den(1, 5);
  Scalar s = q(num(rng), den(rng));
  if (complex_part) s += Scalar(0, mpq_class(num(rng), den(rng)));
  return s;
}

FinMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  FinMatrix m(r, c);
  std::bernoulli_distribution sparse(0.4);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (!sparse(rng)) m(i, j) = random_scalar(rng);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("scalar rendering and parsing") {
  CHECK(q(6, 8).str() == "3/4");
  CHECK(q(-2).str() == "-2");
  CHECK(Scalar(mpq_class(1, 2), mpq_class(-3)).str() == "1/2-3i");
  CHECK(Scalar::from_double(0.1).str() == "0.1");
  CHECK(*parse_rational("0.25") == mpq_class(1, 4));
  CHECK(*parse_rational("-1.5e-3") == mpq_class(-3, 2000));
  CHECK(*parse_rational("7/21") == mpq_class(1, 3));
  CHECK_FALSE(parse_rational("1/0").has_value());
  CHECK_FALSE(parse_rational("abc").has_value());
}

TEST_CASE("mixed mode promotes to float") {
  const Scalar s = q(1, 2) + Scalar::from_double(0.25);
  CHECK_FALSE(s.is_exact());
  CHECK(s.to_complex().real() == doctest::Approx(0.75));
}

TEST_CASE("exact square roots") {
  CHECK(q(1, 4).exact_sqrt()->str() == "1/2");
  CHECK_FALSE(q(1, 2).exact_sqrt().has_value());
  CHECK_FALSE(q(1, 2).sqrt_or_float().is_exact());
  CHECK_THROWS_AS(q(1) / q(0), std::domain_error);
}

TEST_CASE("field axioms on random rationals") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("psd_check examples") {
  CHECK(psd_check(FinMatrix::diagonal({q(3, 4), q(1, 4)})));
  CHECK(psd_check(FinMatrix(3, 3)));
  const FinMatrix swap{{q(0), q(1)}, {q(1), q(0)}};
  const PsdResult r = psd_witness(swap);
  REQUIRE_FALSE(r.psd);
  CHECK(inner(swap * r.witness, r.witness).real_sign() < 0);
  CHECK_THROWS_AS(psd_check(FinMatrix{{q(0), q(1)}, {q(0), q(0)}}), NotHermitian);
}

TEST_CASE("rank_of examples") {
  CHECK(rank_of(FinMatrix::identity(3)) == 3);
  const FinMatrix u = FinMatrix::column({q(1), q(2), q(-1)});
  const FinMatrix v = FinMatrix::column({q(3), q(0, 1), q(1, 2)});
  CHECK(rank_of(u * v.adjoint()) == 1);
  CHECK(rank_of(FinMatrix::diagonal({q(3, 4), q(1, 4), q(0)})) == 2);
}

TEST_CASE("orth_basis_of_range examples") {
  CHECK(orth_basis_of_range(FinMatrix(2, 2)).vectors.empty());
  const RangeBasis d = orth_basis_of_range(FinMatrix::diagonal({q(1), q(0)}));
  REQUIRE(d.vectors.size() == 1);
  CHECK(d.vectors[0] == FinVector{q(1), q(0)});
  const RangeBasis ones = orth_basis_of_range(FinMatrix{{q(1), q(1)}, {q(1), q(1)}});
  REQUIRE(ones.vectors.size() == 1);
  CHECK(ones.vectors[0] == FinVector{q(1), q(1)});
  CHECK(ones.gram[0] == q(2));
}

TEST_CASE("spectral_rank_one_decomp examples") {
  auto d = spectral_rank_one_decomp(FinMatrix::diagonal({q(3, 4), q(1, 4)}));
  CHECK_FALSE(d.float_derived);
  REQUIRE(d.pairs.size() == 2);
  CHECK(d.pairs[0].alpha == q(1, 4));
  CHECK(d.pairs[0].e == FinVector{q(0), q(1)});
  CHECK(d.pairs[1].alpha == q(3, 4));
  CHECK(d.pairs[1].e == FinVector{q(1), q(0)});

  // 1 is a convergent of 3/4 and has a one-dimensional eigenspace here.
  auto mixed = spectral_rank_one_decomp(FinMatrix::diagonal({q(1), q(0), q(3, 4), q(1, 4)}));
  REQUIRE(mixed.pairs.size() == 3);
  CHECK(mixed.pairs[0].alpha == q(1, 4));
  CHECK(mixed.pairs[1].alpha == q(3, 4));
  CHECK(mixed.pairs[2].alpha == q(1));

  auto id = spectral_rank_one_decomp(FinMatrix::identity(2));
  REQUIRE(id.pairs.size() == 2);
  CHECK(id.pairs[0].e == FinVector{q(1), q(0)});
  CHECK(id.pairs[1].e == FinVector{q(0), q(1)});

  auto half = spectral_rank_one_decomp(FinMatrix{{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  CHECK(half.float_derived);
  REQUIRE(half.pairs.size() == 1);
  CHECK(half.pairs[0].alpha.to_complex().real() == doctest::Approx(1.0));
  CHECK(half.pairs[0].e[0].to_complex().real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(half.pairs[0].e[1].to_complex().real() == doctest::Approx(std::sqrt(0.5)));

  CHECK_THROWS_AS(spectral_rank_one_decomp(FinMatrix{{q(0), q(1)}, {q(1), q(0)}}), NotPSD);
}

TEST_CASE("invert examples") {
  CHECK(invert(FinMatrix::identity(3)) == FinMatrix::identity(3));
  CHECK(invert(FinMatrix::diagonal({q(2), q(1, 2)})) == FinMatrix::diagonal({q(1, 2), q(2)}));
  try {
    invert(FinMatrix{{q(1), q(1)}, {q(1), q(1)}});
    FAIL("expected Singular");
  } catch (const Singular& s) {
    CHECK(s.witness() == FinVector{q(1), q(-1)});
  }
}

TEST_CASE("gram matrices are psd and rank-preserving") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 40; ++k) {
    const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 5;
    const FinMatrix g = random_matrix(rng, r, c);
    const FinMatrix m = g.adjoint() * g;
    CHECK(psd_check(m));
    CHECK(rank_of(m) == rank_of(g));
    const RangeBasis b = orth_basis_of_range(m);
    CHECK(b.vectors.size() == rank_of(m));
    for (std::size_t i = 0; i < b.vectors.size(); ++i) {
      for (std::size_t j = i + 1; j < b.vectors.size(); ++j) CHECK(inner(b.vectors[i], b.vectors[j]).is_zero());
    }
  }
}

TEST_CASE("spectral reassembly") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 1 + rng() % 4;
    const FinMatrix g = random_matrix(rng, n, n);
    const FinMatrix m = g.adjoint() * g;
    const auto d = spectral_rank_one_decomp(m);
    FinMatrix sum(n, n);
    for (const auto& p : d.pairs) {
      const FinMatrix e = FinMatrix::column(p.e);
      sum += (e * e.adjoint()).scaled(p.alpha);
    }
    if (d.float_derived) {
      CHECK(FinMatrix::near(sum, m, 1e-9 * (1.0 + std::sqrt(static_cast<double>(n)) * 50.0)));
    } else {
      CHECK(sum == m);
    }
    for (std::size_t i = 1; i < d.pairs.size(); ++i) {
      CHECK(d.pairs[i - 1].alpha.to_complex().real() <= d.pairs[i].alpha.to_complex().real() + 1e-12);
    }
  }
  const FinMatrix diag = FinMatrix::diagonal({q(1, 9), q(4), q(1, 9), q(0)});
  const auto d = spectral_rank_one_decomp(diag);
  CHECK_FALSE(d.float_derived);
  REQUIRE(d.pairs.size() == 3);
  CHECK(d.pairs[0].e == FinVector{q(1), q(0), q(0), q(0)});
  CHECK(d.pairs[1].e == FinVector{q(0), q(0), q(1), q(0)});
}

TEST_CASE("parallel kernels agree with serial reference") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    const FinMatrix a = random_matrix(rng, 20 + k, 17), b = random_matrix(rng, 17, 9 + k);
    CHECK(kernels::matmul_parallel(a, b) == kernels::matmul_serial(a, b));
    const FinVector x = b.col(0);
    CHECK(kernels::matvec_parallel(a, x) == kernels::matvec_serial(a, x));
  }
}
