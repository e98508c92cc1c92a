#include "shiftlab/equivalence/shimorin.hpp"

#include <algorithm>

#include "shiftlab/analysis/types.hpp"
#include "shiftlab/exactnum/linalg.hpp"

namespace shiftlab::equivalence {

namespace {

using opcore::Coord;
using opcore::SpaceShape;

FinVector coordinates(const ShimorinModelData& d, const FinSupportVector& v) {
  FinVector c;
  c.reserve(d.kernel_basis.size());
  for (std::size_t a = 0; a < d.kernel_basis.size(); ++a) c.push_back(opcore::inner(v, d.kernel_basis[a]) / d.kernel_gram[a]);
  return c;
}

std::vector<FinVector> coefficients_of(const ShimorinModelData& d, const FinSupportVector& x) {
  std::vector<FinVector> out;
  FinSupportVector v = x;
  for (std::size_t n = 0; n < d.depth; ++n) {
    out.push_back(coordinates(d, v));
    if (n + 1 < d.depth) v = opcore::apply(d.left_inverse, v);
  }
  return out;
}

bool same(const FinVector& a, const FinVector& b, const TolerancePolicy& tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Scalar diff = a[i] - b[i];
    if (diff.is_exact() ? !diff.is_zero() : diff.abs() > tol.psd_tol) return false;
  }
  return true;
}

}  // namespace

std::vector<Scalar> standard_disc_points() {
  return {Scalar(0),
          Scalar::rational(1, 2),
          Scalar::rational(-1, 2),
          Scalar::complex(0, mpq_class(1, 2)),
          Scalar::complex(0, mpq_class(-1, 2)),
          Scalar::rational(9, 10),
          Scalar::rational(-7, 10),
          Scalar::complex(mpq_class(3, 10), mpq_class(4, 10))};
}

ShimorinModelData shimorin_model(const StructuredOperator& t, const ShimorinOptions& opts) {
  if (!t.is_square()) throw opcore::ShapeMismatch("shimorin_model: operator is not square");
  const TolerancePolicy& tol = opts.tol;
  const SpaceShape sh = t.shape_in;
  const StructuredOperator ts = opcore::adjoint(t);
  const StructuredOperator g = opcore::multiply(ts, t);
  if (!g.symbol.is_constant()) throw analysis::PreconditionFailed("shimorin_model: T*T is not identity plus finite rank");

  ShimorinModelData d;
  d.depth = opts.depth;
  try {
    d.left_inverse = opcore::multiply(opcore::structured_inverse(g, tol), ts);
  } catch (const opcore::NotInvertible& e) {
    throw NotLeftInvertible(std::string("T*T is not invertible: ") + e.what(), e.witness());
  }
  if (!opcore::equals(opcore::multiply(d.left_inverse, t), opcore::identity(sh), tol)) {
    throw analysis::InternalInconsistency("shimorin_model: L T != I");
  }

  const std::size_t levels = sh.p ? ts.window() + ts.band() + 1 : 0;
  const auto ker = opcore::finite_kernel(ts, levels, tol);
  if (sh.p && opcore::finite_kernel(ts, levels + 4, tol).size() != ker.size()) {
    throw KernelNotFinitelySupported("ker T* keeps growing with the window");
  }
  std::vector<FinVector> win;
  for (const auto& k : ker) win.push_back(k.window(levels));
  const exactnum::RangeBasis on = exactnum::gram_schmidt(win, tol);
  for (const auto& v : on.vectors) {
    FinSupportVector k = FinSupportVector::from_window(sh, levels, v);
    k.trim();
    d.kernel_basis.push_back(std::move(k));
  }
  d.kernel_gram = on.gram;

  d.generators = opts.generators;
  if (d.generators.empty()) {
    for (std::size_t l = 0; l < (sh.p ? 2u : 0u); ++l) {
      for (std::size_t s = 0; s < sh.p; ++s) d.generators.push_back(FinSupportVector::basis(sh, Coord::strand(s, l)));
    }
    for (std::size_t q = 0; q < sh.q; ++q) d.generators.push_back(FinSupportVector::basis(sh, Coord::tail_at(q)));
  }
  for (const auto& x : d.generators) d.coefficients.push_back(coefficients_of(d, x));

  // K(z, w)_ab = sum_{n,m} z^n conj(w)^m <L*^m k_b, L*^n k_a>, truncated at depth.
  d.sample_points = opts.samples.empty() ? standard_disc_points() : opts.samples;
  const std::size_t kd = d.kernel_basis.size(), depth = d.depth, np = d.sample_points.size();
  const StructuredOperator ls = opcore::adjoint(d.left_inverse);
  std::vector<std::vector<FinSupportVector>> w(kd);
  for (std::size_t b = 0; b < kd; ++b) {
    FinSupportVector v = d.kernel_basis[b];
    for (std::size_t m = 0; m < depth; ++m) {
      w[b].push_back(v);
      if (m + 1 < depth) v = opcore::apply(ls, v);
    }
  }
  std::vector<std::vector<Scalar>> pw(np), pwc(np);
  for (std::size_t u = 0; u < np; ++u) {
    Scalar z = Scalar::one(d.sample_points[u].mode()), zc = z;
    for (std::size_t n = 0; n < depth; ++n) {
      pw[u].push_back(z);
      pwc[u].push_back(zc);
      z *= d.sample_points[u];
      zc *= d.sample_points[u].conj();
    }
  }
  d.gram = FinMatrix(np * kd, np * kd);
  for (std::size_t a = 0; a < kd; ++a) {
    for (std::size_t b = 0; b < kd; ++b) {
      std::vector<std::vector<Scalar>> ip(depth, std::vector<Scalar>(depth));
      for (std::size_t m = 0; m < depth; ++m) {
        for (std::size_t n = 0; n < depth; ++n) ip[m][n] = opcore::inner(w[b][m], w[a][n]);
      }
      for (std::size_t v = 0; v < np; ++v) {
        std::vector<Scalar> r(depth);
        for (std::size_t n = 0; n < depth; ++n) {
          for (std::size_t m = 0; m < depth; ++m) {
            if (!ip[m][n].is_zero()) r[n].fma(pwc[v][m], ip[m][n]);
          }
        }
        for (std::size_t u = 0; u < np; ++u) {
          Scalar acc;
          for (std::size_t n = 0; n < depth; ++n) {
            if (!r[n].is_zero()) acc.fma(pw[u][n], r[n]);
          }
          d.gram(u * kd + a, v * kd + b) = acc;
        }
      }
    }
  }
  const std::vector<double> ev = exactnum::hermitian_eigenvalues(d.gram);
  d.gram_min_eigenvalue = ev.empty() ? 0.0 : *std::min_element(ev.begin(), ev.end());
  if (d.gram.mode() == opcore::Mode::Exact) {
    d.gram_psd = exactnum::psd_check(d.gram, tol);
  } else {
    d.gram_psd = d.gram_min_eigenvalue >= -opts.psd_tol;
  }
  return d;
}

long coefficient_shift_violation(const StructuredOperator& t, const ShimorinModelData& data, const TolerancePolicy& tol) {
  const FinVector zero(data.kernel_basis.size());
  for (std::size_t g = 0; g < data.generators.size(); ++g) {
    const auto tx = coefficients_of(data, opcore::apply(t, data.generators[g]));
    for (std::size_t n = 0; n < data.depth; ++n) {
      const FinVector& want = n == 0 ? zero : data.coefficients[g][n - 1];
      if (!same(tx[n], want, tol)) return static_cast<long>(n);
    }
  }
  return -1;
}

}  // namespace shiftlab::equivalence
