#include "shiftlab/analysis/predicates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "shiftlab/analysis/structure.hpp"
#include "shiftlab/exactnum/linalg.hpp"

namespace shiftlab::analysis {

namespace {

namespace ex = exactnum;

bool negligible(const Scalar& s, const TolerancePolicy& tol) { return s.is_exact() ? s.is_zero() : s.abs() <= tol.rank_tol; }

bool negligible(const FinMatrix& m, const TolerancePolicy& tol) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!negligible(m(i, j), tol)) return false;
    }
  }
  return true;
}

bool negligible(const FinSupportVector& v, const TolerancePolicy& tol) {
  for (const auto& s : v.strand_entries()) {
    if (!negligible(s, tol)) return false;
  }
  for (const auto& s : v.tail()) {
    if (!negligible(s, tol)) return false;
  }
  return true;
}

bool symbol_negligible(const LaurentSymbol& s, const TolerancePolicy& tol) {
  for (const auto& [k, c] : s.coeffs) {
    if (!negligible(c, tol)) return false;
  }
  return true;
}

std::size_t window_of(const StructuredOperator& p) { return p.shape_in.p ? p.window() : 0; }

mpq_class rationalize(double x) {
  if (std::abs(x) < 1e-12) return 0;
  const auto cs = ex::convergents(x, 4096);
  return cs.empty() ? mpq_class(0) : cs.back();
}

Scalar rationalize(std::complex<double> z) { return Scalar(rationalize(z.real()), rationalize(z.imag())); }

FinMatrix hconcat(const FinMatrix& a, const FinMatrix& b) {
  FinMatrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

// Negative directions of a non-constant Hermitian symbol: sampled on the circle, then tried as exact witnesses.
Certainty positivity_banded(const StructuredOperator& p, const TolerancePolicy& tol) {
  const SpaceShape sh = p.shape_in;
  const int samples = std::max(8, tol.circle_samples);
  std::vector<double> mins;
  double worst = 0.0;
  std::complex<double> worst_z{1.0, 0.0};
  for (int k = 0; k < samples; ++k) {
    const double th = 2.0 * std::numbers::pi * k / samples;
    const std::complex<double> z = std::polar(1.0, th);
    const auto ev = ex::hermitian_eigenvalues(p.symbol.evaluate(z));
    const double mn = ev.empty() ? 0.0 : ev.front();
    mins.push_back(mn);
    if (mn < worst) {
      worst = mn;
      worst_z = z;
    }
  }
  const std::size_t w = window_of(p);
  if (worst < -tol.psd_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ex::to_eigen(p.symbol.evaluate(worst_z)));
    const Eigen::VectorXcd v = es.eigenvectors().col(0);
    for (std::size_t len : {16u, 64u, 256u}) {
      FinSupportVector x(sh);
      const std::size_t start = w + p.band();
      for (std::size_t l = 0; l < len; ++l) {
        const std::complex<double> ph = std::pow(worst_z, static_cast<double>(l));
        for (std::size_t s = 0; s < sh.p; ++s) x.ref(Coord::strand(s, start + l)) = rationalize(ph * v(static_cast<Eigen::Index>(s)));
      }
      if (refutes_positivity(p, x, tol)) {
        return Certainty::refuted(x, "symbol is negative at a point of the circle; exact quadratic form is negative");
      }
    }
  }
  // Dense search near the window.
  const std::size_t levels = w + 2 * p.band() + 8;
  const FinMatrix dense = opcore::compression(p, levels, levels);
  if (dense.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ex::to_eigen(dense));
    if (es.eigenvalues()(0) < -tol.psd_tol) {
      FinVector xv(dense.rows());
      for (std::size_t i = 0; i < xv.size(); ++i) xv[i] = rationalize(es.eigenvectors()(static_cast<Eigen::Index>(i), 0));
      const FinSupportVector x = FinSupportVector::from_window(sh, levels, xv);
      if (refutes_positivity(p, x, tol)) return Certainty::refuted(x, "negative direction of a finite section; exact quadratic form is negative");
    }
  }
  std::ostringstream os;
  os << "symbol is not constant; minimal sampled symbol eigenvalue " << worst << " over " << samples << " roots of unity";
  return Certainty::unknown(os.str(), std::move(mins));
}

}  // namespace

StructuredOperator defect_squared(const StructuredOperator& t) {
  if (!t.is_square()) throw opcore::ShapeMismatch("defect_squared: operator is not square");
  return opcore::subtract(opcore::identity(t.shape_in), opcore::multiply(opcore::adjoint(t), t));
}

StructuredOperator defect_squared_adjoint(const StructuredOperator& t) {
  if (!t.is_square()) throw opcore::ShapeMismatch("defect_squared_adjoint: operator is not square");
  return opcore::subtract(opcore::identity(t.shape_in), opcore::multiply(t, opcore::adjoint(t)));
}

DefectData defect_data(const StructuredOperator& p, const TolerancePolicy& tol) {
  DefectData d;
  d.defect_sq = p;
  d.window = window_of(p);
  d.structured = p.symbol.is_constant();
  d.symbol = p.symbol.coeff(0);
  d.window_block = opcore::compression(p, d.window, d.window);
  d.window_rank = ex::rank_of(d.window_block, tol);
  d.finite_rank = symbol_negligible(p.symbol, tol);
  if (d.finite_rank) {
    const ex::RangeBasis rb = ex::orth_basis_of_range(d.window_block, tol);
    for (const auto& v : rb.vectors) d.basis.push_back(FinSupportVector::from_window(p.shape_in, d.window, v));
    d.gram = rb.gram;
  }
  return d;
}

DefectData defect_space(const StructuredOperator& t, const TolerancePolicy& tol) { return defect_data(defect_squared(t), tol); }

DefectData defect_space_adjoint(const StructuredOperator& t, const TolerancePolicy& tol) {
  return defect_data(defect_squared_adjoint(t), tol);
}

SelfCommutator self_commutator(const StructuredOperator& t, const TolerancePolicy& tol) {
  SelfCommutator sc;
  sc.op = opcore::commutator(t);
  sc.residual = sc.op.symbol;
  sc.finite_rank = symbol_negligible(sc.op.symbol, tol);
  if (!sc.finite_rank) return sc;
  const std::size_t w = window_of(sc.op);
  const FinMatrix block = opcore::compression(sc.op, w, w);
  sc.rank = ex::rank_of(block, tol);
  sc.positive = ex::psd_witness(block, tol).psd;
  if (!sc.positive) return sc;
  const ex::SpectralDecomposition dec = ex::spectral_rank_one_decomp(block, tol);
  sc.float_derived = dec.float_derived;
  for (const auto& pr : dec.pairs) sc.pairs.push_back({pr.alpha, FinSupportVector::from_window(t.shape_in, w, pr.e)});
  return sc;
}

bool refutes_positivity(const StructuredOperator& p, const FinSupportVector& x, const TolerancePolicy& tol) {
  if (x.is_zero()) return false;
  const Scalar q = opcore::inner(opcore::apply(p, x), x);
  if (q.is_exact()) return q.real_sign() < 0;
  return q.to_complex().real() < -tol.psd_tol;
}

Certainty positivity(const StructuredOperator& p, const TolerancePolicy& tol) {
  if (!p.is_square()) throw opcore::ShapeMismatch("positivity: operator is not square");
  const SpaceShape sh = p.shape_in;
  if (!p.symbol.is_constant()) return positivity_banded(p, tol);
  const std::size_t w = window_of(p);
  if (sh.p) {
    const ex::PsdResult pe = ex::psd_witness(p.symbol.coeff(0), tol);
    if (!pe.psd) {
      FinSupportVector x(sh);
      for (std::size_t s = 0; s < sh.p; ++s) x.ref(Coord::strand(s, w)) = pe.witness[s];
      if (!refutes_positivity(p, x, tol)) throw InternalInconsistency("symbol witness failed exact verification");
      return Certainty::refuted(x, "constant symbol is not positive semidefinite");
    }
  }
  const ex::PsdResult pw = ex::psd_witness(opcore::compression(p, w, w), tol);
  if (!pw.psd) {
    const FinSupportVector x = FinSupportVector::from_window(sh, w, pw.witness);
    if (!refutes_positivity(p, x, tol)) throw InternalInconsistency("window witness failed exact verification");
    return Certainty::refuted(x, "window block is not positive semidefinite");
  }
  return Certainty::certified("constant symbol and window block are positive semidefinite");
}

Certainty is_contraction(const StructuredOperator& t, const TolerancePolicy& tol) { return positivity(defect_squared(t), tol); }

Certainty is_hyponormal(const StructuredOperator& t, const TolerancePolicy& tol) {
  if (!t.is_square()) throw opcore::ShapeMismatch("is_hyponormal: operator is not square");
  return positivity(opcore::commutator(t), tol);
}

std::optional<bool> in_closed_range(const StructuredOperator& p, const FinSupportVector& x, const TolerancePolicy& tol) {
  if (!p.symbol.is_constant()) return std::nullopt;
  const std::size_t w = p.shape_in.p ? std::max(p.window(), x.levels()) : 0;
  return ex::in_column_space(opcore::compression(p, w, w), x.window(w), tol);
}

Classification classify_core(const StructuredOperator& t, const ClassifyOptions& opts) {
  if (!t.is_square()) throw opcore::ShapeMismatch("classify: operator is not square");
  const TolerancePolicy& tol = opts.tol;
  Classification c;
  c.defect = defect_space(t, tol);
  c.defect_adjoint = defect_space_adjoint(t, tol);
  c.contraction = positivity(c.defect.defect_sq, tol);
  c.selfcomm = self_commutator(t, tol);
  c.hyponormal = positivity(c.selfcomm.op, tol);
  const bool hc = c.contraction.is_certified() && c.hyponormal.is_certified();
  c.finite_isometry = hc && c.defect.finite_rank;

  if (c.defect.structured && c.defect_adjoint.structured && c.defect.symbol == c.defect_adjoint.symbol) {
    const std::size_t w = t.shape_in.p ? std::max(c.defect.window, c.defect_adjoint.window) : 0;
    const FinMatrix d = opcore::compression(c.defect.defect_sq, w, w);
    const FinMatrix ds = opcore::compression(c.defect_adjoint.defect_sq, w, w);
    const std::size_t rd = ex::rank_of(d, tol), rds = ex::rank_of(ds, tol);
    const bool contained = ex::rank_of(hconcat(ds, d), tol) == rds;
    if (contained) {
      c.defect_gap = rds - rd;
    } else if (hc) {
      throw InternalInconsistency("hyponormal contraction whose defect space is not inside the adjoint defect space");
    }
  }

  if (hc && c.selfcomm.finite_rank && c.selfcomm.positive) {
    bool ok = true;
    for (const auto& pr : c.selfcomm.pairs) {
      if (!negligible(opcore::apply(c.defect.defect_sq, pr.e), tol)) {
        ok = false;
        c.notes.push_back("commutator vector " + pr.e.str() + " is not orthogonal to the defect space");
        break;
      }
      const auto inside = in_closed_range(c.defect_adjoint.defect_sq, pr.e, tol);
      if (!inside || !*inside) {
        ok = false;
        c.notes.push_back("commutator vector " + pr.e.str() + " is not in the adjoint defect space");
        break;
      }
    }
    if (ok) {
      c.n_finite = NFinite{c.selfcomm.pairs.size(), c.selfcomm.alphas()};
      if (!c.defect_gap) throw InternalInconsistency("n-finite operator without comparable defect windows");
      if (*c.defect_gap != c.n_finite->n) {
        throw InternalInconsistency("defect dimension identity violated: gap " + std::to_string(*c.defect_gap) + " vs n = " +
                                    std::to_string(c.n_finite->n));
      }
    }
  }

  if (opts.run_purity) {
    if (c.selfcomm.finite_rank) {
      c.purity = purity_evidence(t, opts.purity_depth, opts.purity_window, tol);
    } else {
      c.purity = Certainty::unknown("self-commutator has a symbol obstruction");
    }
  } else {
    c.purity = Certainty::unknown("purity refinement not run");
  }
  return c;
}

Classification classify(const StructuredOperator& t, const ClassifyOptions& opts) {
  Classification c = classify_core(t, opts);
  if (auto o = certify_pure_finite_isometry(t, c); o.issued()) c.certificates.push_back(*o.certificate);
  if (projection_commutator_applies(c)) {
    if (auto o = certify_projection_commutator(t, c); o.issued()) c.certificates.push_back(*o.certificate);
  }
  return c;
}

}  // namespace shiftlab::analysis
