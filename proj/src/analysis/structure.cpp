#include "shiftlab/analysis/structure.hpp"

#include "shiftlab/exactnum/linalg.hpp"
#include "shiftlab/models/spec.hpp"

namespace shiftlab::analysis {

namespace {

namespace ex = exactnum;
using opcore::adjoint;
using opcore::equals;
using opcore::identity;
using opcore::multiply;

Scalar dot_conj(const FinVector& v, const FinVector& r) {
  Scalar acc;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_zero() && !r[k].is_zero()) acc.fma(v[k], r[k].conj());
  }
  return acc;
}

bool negligible(const FinVector& v, const TolerancePolicy& tol) {
  for (const auto& s : v) {
    if (s.is_exact() ? !s.is_zero() : s.abs() > tol.rank_tol) return false;
  }
  return true;
}

// Orthogonal projection onto span(basis) (basis pairwise orthogonal with squared norms gram).
FinVector project(const FinVector& v, const std::vector<FinVector>& basis, const FinVector& gram) {
  FinVector out(v.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Scalar c = dot_conj(v, basis[i]) / gram[i];
    if (c.is_zero()) continue;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!basis[i][k].is_zero()) out[k].fma(c, basis[i][k]);
    }
  }
  return out;
}

// Orthonormal vectors spanning the same space as the candidates, taken greedily in order.
std::vector<FinVector> orthonormal_from(const std::vector<FinVector>& candidates, std::size_t want, const TolerancePolicy& tol) {
  std::vector<FinVector> acc;
  FinVector gram;
  for (const auto& c : candidates) {
    if (acc.size() == want) break;
    FinVector u = c;
    const FinVector p = project(u, acc, gram);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] -= p[k];
    if (negligible(u, tol)) continue;
    gram.push_back(dot_conj(u, u));
    acc.push_back(std::move(u));
  }
  if (acc.size() != want) throw InternalInconsistency("basis completion fell short of the expected dimension");
  for (std::size_t i = 0; i < acc.size(); ++i) {
    Scalar nrm;
    if (gram[i].is_exact()) {
      auto r = gram[i].exact_sqrt();
      if (!r) throw PreconditionFailed("exact orthonormal basis needs the irrational norm sqrt(" + gram[i].str() + ")");
      nrm = *r;
    } else {
      nrm = gram[i].sqrt_or_float();
    }
    for (auto& s : acc[i]) {
      if (!s.is_zero()) s /= nrm;
    }
  }
  return acc;
}

HypothesisCheck check(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok ? Verdict::Certified : Verdict::Refuted, std::move(detail)};
}

HypothesisCheck check(std::string name, const Certainty& c) { return {std::move(name), c.verdict, c.evidence}; }

std::vector<std::size_t> iota(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

bool is_zero_op(const StructuredOperator& a, const TolerancePolicy& tol) {
  return equals(a, opcore::zero_operator(a.shape_out, a.shape_in), tol);
}

}  // namespace

StructuredOperator TriangularDecomposition::triangular() const {
  return opcore::block_compose({{s, a}, {opcore::zero_operator(b.shape_out, s.shape_in), b}});
}

TriangularDecomposition decompose_triangular(const StructuredOperator& t, const Certainty& purity, const DecomposeOptions& opts) {
  const TolerancePolicy& tol = opts.tol;
  if (!t.is_square()) throw opcore::ShapeMismatch("decompose_triangular: operator is not square");
  const Certainty ct = is_contraction(t, tol), hy = is_hyponormal(t, tol);
  if (!ct.is_certified() || !hy.is_certified()) {
    throw NotCertifiedHyponormalContraction("contraction " + to_string(ct.verdict) + ", hyponormal " + to_string(hy.verdict));
  }
  if (purity.is_refuted() && !opts.allow_normal_summand) throw PreconditionFailed("decompose_triangular: operator has a normal summand");
  if (purity.is_unknown() && !opts.accept_unknown_purity) throw PreconditionFailed("decompose_triangular: purity is not certified");

  const StructuredOperator p = defect_squared(t);
  if (!p.symbol.is_constant()) throw DefectNotFinite("defect operator has a non-constant symbol");
  const SpaceShape sh = t.shape_in;
  const FinMatrix e = p.symbol.coeff(0);
  std::vector<std::size_t> fs, js;
  for (std::size_t i = 0; i < sh.p; ++i) {
    for (std::size_t j = 0; j < sh.p; ++j) {
      if (i != j && !e(i, j).is_zero()) throw DefectNotFinite("defect symbol is not diagonal");
    }
    (e(i, i).is_zero() ? fs : js).push_back(i);
  }
  const std::size_t w = sh.p ? p.window() : 0;
  const std::size_t d = sh.dim(w);
  const FinMatrix dv = opcore::compression(p, w, w);
  const ex::RangeBasis rb = ex::orth_basis_of_range(dv, tol);
  const std::size_t rank = rb.vectors.size(), kerdim = d - rank;
  if (kerdim < w * fs.size() || rank < w * js.size()) {
    throw DefectNotFinite("defect window does not split along the strands (kernel " + std::to_string(kerdim) + ", range " +
                          std::to_string(rank) + ")");
  }
  const std::size_t kq = kerdim - w * fs.size(), rq = rank - w * js.size();

  auto coord = [&](std::size_t idx) {
    FinVector v(d);
    v[idx] = Scalar::one(t.mode());
    return v;
  };
  auto window_coords = [&](const std::vector<std::size_t>& strands) {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < w; ++l) {
      for (auto s : strands) out.push_back(l * sh.p + s);
    }
    return out;
  };
  std::vector<std::size_t> korder = window_coords(fs), rorder = window_coords(js);
  for (std::size_t q = 0; q < sh.q; ++q) {
    korder.push_back(w * sh.p + q);
    rorder.push_back(w * sh.p + q);
  }
  for (auto i : window_coords(js)) korder.push_back(i);
  for (auto i : window_coords(fs)) rorder.push_back(i);

  std::vector<FinVector> kc, rc;
  for (auto i : korder) {
    FinVector v = coord(i);
    const FinVector pr = project(v, rb.vectors, rb.gram);
    for (std::size_t k = 0; k < d; ++k) v[k] -= pr[k];
    kc.push_back(std::move(v));
  }
  for (auto i : rorder) rc.push_back(project(coord(i), rb.vectors, rb.gram));
  const std::vector<FinVector> kb = orthonormal_from(kc, kerdim, tol);
  const std::vector<FinVector> rbn = orthonormal_from(rc, rank, tol);

  TriangularDecomposition out;
  out.kernel_strands = fs;
  out.defect_strands = js;
  out.kernel_tail = kq;
  out.defect_tail = rq;
  std::vector<std::size_t> perm = fs;
  perm.insert(perm.end(), js.begin(), js.end());

  StructuredOperator u(sh, sh);
  if (sh.p) {
    FinMatrix pi(sh.p, sh.p);
    for (std::size_t i = 0; i < sh.p; ++i) pi(perm[i], i) = Scalar(1);
    u.symbol.coeffs[0] = pi;
  }
  u.kernel.n_out = w;
  u.kernel.n_in = w;
  u.kernel.block = FinMatrix(d, d);
  auto set_column = [&](std::size_t col, const FinVector& img, std::optional<std::size_t> old_coord) {
    for (std::size_t r = 0; r < d; ++r) u.kernel.block(r, col) = img[r];
    if (old_coord) u.kernel.block(*old_coord, col) -= Scalar(1);
  };
  for (std::size_t l = 0; l < w; ++l) {
    for (std::size_t i = 0; i < fs.size(); ++i) set_column(l * sh.p + i, kb[l * fs.size() + i], l * sh.p + fs[i]);
    for (std::size_t j = 0; j < js.size(); ++j) set_column(l * sh.p + fs.size() + j, rbn[l * js.size() + j], l * sh.p + js[j]);
  }
  for (std::size_t q = 0; q < kq; ++q) set_column(w * sh.p + q, kb[w * fs.size() + q], std::nullopt);
  for (std::size_t q = 0; q < rq; ++q) set_column(w * sh.p + kq + q, rbn[w * js.size() + q], std::nullopt);
  u.canonicalize();
  const StructuredOperator us = adjoint(u);
  if (!equals(multiply(us, u), identity(sh), tol) || !equals(multiply(u, us), identity(sh), tol)) {
    throw InternalInconsistency("basis change is not unitary");
  }
  out.basis_change = u;

  const StructuredOperator tp = multiply(us, multiply(t, u));
  const auto ks = iota(0, fs.size()), ds = iota(fs.size(), sh.p), kt = iota(0, kq), dt = iota(kq, sh.q);
  out.s = opcore::restrict_to(tp, ks, kt, ks, kt);
  out.a = opcore::restrict_to(tp, ks, kt, ds, dt);
  out.b = opcore::restrict_to(tp, ds, dt, ds, dt);
  const StructuredOperator lower = opcore::restrict_to(tp, ds, dt, ks, kt);

  out.checks.push_back(check("kernel of the defect is invariant", is_zero_op(lower, tol)));
  out.checks.push_back(check("S*A = 0", is_zero_op(multiply(adjoint(out.s), out.a), tol)));
  out.checks.push_back(check("S*S = I", equals(multiply(adjoint(out.s), out.s), identity(out.s.shape_in), tol)));
  out.checks.push_back(check("B is a contraction", is_contraction(out.b, tol)));
  out.checks.push_back(check("reassembly U [[S,A],[0,B]] U* = T", equals(multiply(u, multiply(out.triangular(), us)), t, tol)));

  if (out.s.shape_in.p) {
    out.wandering_basis = opcore::finite_kernel(adjoint(out.s), out.s.window() + out.s.band() + 1, tol);
  } else {
    out.wandering_basis = opcore::finite_kernel(adjoint(out.s), 0, tol);
  }
  try {
    out.unitary_part_absent = purity_evidence(out.s, 8, opts.unitary_check_window, tol);
  } catch (const PreconditionFailed& e) {
    out.unitary_part_absent = Certainty::unknown(e.what());
  }
  return out;
}

ShiftCoshiftCheck check_shift_coshift(std::size_t s_mult, const StructuredOperator& x, const TolerancePolicy& tol) {
  const StructuredOperator t = models::build_shift_coshift(s_mult, x);
  ShiftCoshiftCheck r;
  r.contraction = is_contraction(t, tol);
  r.hyponormal = is_hyponormal(t, tol);
  r.is_hypo_contraction = r.contraction.is_certified() && r.hyponormal.is_certified();

  const SpaceShape h{s_mult, 0};
  const StructuredOperator xs = adjoint(x);
  const bool partial = equals(multiply(x, multiply(xs, x)), x, tol);
  const bool into_ker = is_zero_op(multiply(opcore::adjoint_shift(h), x), tol);
  StructuredOperator p0(h, h);
  for (std::size_t s = 0; s < s_mult; ++s) p0 = opcore::add(p0, opcore::basis_rank_one(h, Coord::strand(s, 0), Coord::strand(s, 0)));
  const bool onto_ker = partial && equals(multiply(xs, x), p0, tol);
  r.is_partial_isometry_into_ker = partial && into_ker && onto_ker;
  r.is_isometry = is_zero_op(defect_squared(t), tol);
  if (r.is_hypo_contraction && r.is_partial_isometry_into_ker && r.is_isometry) {
    Certificate c;
    c.kind = CertificateKind::ShiftCoshiftIsometry;
    c.checked = {check("hyponormal contraction", true), check("X partial isometry with ran X in ran X* = ker S*", true),
                 check("I - T*T = 0", true)};
    c.conclusion = "T is an isometry";
    r.certificate = c;
  }
  return r;
}

Certainty invertibility(const StructuredOperator& g, const TolerancePolicy& tol) {
  if (!g.symbol.is_constant()) return Certainty::unknown("symbol is not constant");
  try {
    opcore::structured_inverse(g, tol);
    return Certainty::certified("constant symbol and window block are invertible");
  } catch (const opcore::NotInvertible& e) {
    return Certainty::refuted(e.witness(), e.what());
  }
}

Certainty analytic_evidence(const StructuredOperator& b, const TolerancePolicy& tol) {
  if (!b.is_square()) throw opcore::ShapeMismatch("analytic_evidence: operator is not square");
  if (b.tag && b.tag->analytic) return Certainty::certified("analytic by construction (" + b.tag->origin + ")");
  const SpaceShape sh = b.shape_in;
  if (sh.p == 0) {
    FinMatrix pw = FinMatrix::identity(sh.q, b.mode());
    for (std::size_t i = 0; i < sh.q; ++i) pw = pw * b.kernel.block;
    for (std::size_t j = 0; j < pw.cols(); ++j) {
      const FinVector col = pw.col(j);
      if (!negligible(col, tol)) {
        return Certainty::refuted(FinSupportVector::from_window(sh, 0, col),
                                  "B^dim is nonzero, so the intersection of the ranges of B^n is nonzero");
      }
    }
    return Certainty::certified("nilpotent on a finite-dimensional space");
  }
  if (b.kernel.block.is_zero() && b.symbol.coeffs.size() == 1 && b.symbol.coeffs.begin()->first >= 1) {
    return Certainty::certified("monomial symbol z^k with k >= 1 and no finite-rank part");
  }
  return Certainty::unknown("analyticity is decided only for finite-dimensional, monomial or construction-tagged operators");
}

CertificateOutcome certify_triangular(const StructuredOperator& s, const StructuredOperator& a, const StructuredOperator& b,
                                      const TolerancePolicy& tol) {
  if (!s.is_square() || !b.is_square() || a.shape_out != s.shape_out || a.shape_in != b.shape_in) {
    throw opcore::ShapeMismatch("certify_triangular: blocks do not fit [[S, A], [0, B]]");
  }
  CertificateOutcome o;
  o.checks.push_back(check("S is an isometry", equals(multiply(adjoint(s), s), identity(s.shape_in), tol)));
  o.checks.push_back(check("S*A = 0", is_zero_op(multiply(adjoint(s), a), tol)));
  const StructuredOperator g = opcore::add(multiply(adjoint(a), a), multiply(adjoint(b), b));
  o.checks.push_back(check("A*A + B*B is invertible", invertibility(g, tol)));
  o.checks.push_back(check("B is analytic", analytic_evidence(b, tol)));
  if (!o.failed().empty()) return o;
  Certificate c;
  c.kind = CertificateKind::TriangularAnalyticShift;
  c.checked = o.checks;
  c.conclusion = "unitarily equivalent to an analytic shift";
  c.notes.push_back("analyticity of B is decided only for finite-dimensional, monomial-symbol or construction-tagged B");
  o.certificate = c;
  return o;
}

CertificateOutcome certify_triangular(std::size_t s_mult, const StructuredOperator& a, const StructuredOperator& b,
                                      const TolerancePolicy& tol) {
  return certify_triangular(opcore::shift(SpaceShape{s_mult, 0}), a, b, tol);
}

CertificateOutcome certify_pure_finite_isometry(const StructuredOperator& t, const Classification& c) {
  (void)t;
  CertificateOutcome o;
  o.checks.push_back(check("contraction", c.contraction));
  o.checks.push_back(check("hyponormal", c.hyponormal));
  o.checks.push_back(check("I - T*T has finite rank", c.defect.finite_rank));
  HypothesisCheck pure{"pure", c.purity.verdict, c.purity.evidence};
  const bool evidenced = c.purity.is_unknown() && c.purity.dimension == 0 && c.purity.evidence.find("refinement empty") != std::string::npos;
  if (evidenced) {
    pure.verdict = Verdict::Certified;
    pure.detail = "evidence accepted: " + c.purity.evidence;
  }
  o.checks.push_back(pure);
  if (!o.failed().empty()) return o;
  Certificate cert;
  cert.kind = CertificateKind::PureFiniteIsometry;
  cert.checked = o.checks;
  cert.conclusion = "unitarily equivalent to an analytic shift";
  cert.notes.push_back("purity evidence: " + c.purity.evidence);
  if (evidenced) cert.notes.push_back("purity is evidenced by window refinement, not proved");
  cert.notes.push_back("implies an empty point spectrum (informational, not checked)");
  o.certificate = cert;
  return o;
}

CertificateOutcome certify_pure_finite_isometry(const StructuredOperator& t, const ClassifyOptions& opts) {
  return certify_pure_finite_isometry(t, classify_core(t, opts));
}

bool projection_commutator_applies(const Classification& c) {
  if (!c.contraction.is_certified() || !c.selfcomm.finite_rank || !c.selfcomm.positive || c.selfcomm.pairs.empty()) return false;
  for (const auto& pr : c.selfcomm.pairs) {
    if (!Scalar::near(pr.alpha, Scalar(1), 1e-12)) return false;
  }
  return true;
}

CertificateOutcome certify_projection_commutator(const StructuredOperator& t, const Classification& c) {
  if (!c.contraction.is_certified()) throw PreconditionFailed("projection commutator: contraction is not certified");
  if (!c.selfcomm.finite_rank || !c.selfcomm.positive) throw PreconditionFailed("projection commutator: self-commutator is not a finite positive operator");
  if (!projection_commutator_applies(c)) throw PreconditionFailed("projection commutator: some alpha differs from 1");
  const StructuredOperator ts = adjoint(t);
  CertificateOutcome o;
  for (std::size_t j = 0; j < c.selfcomm.pairs.size(); ++j) {
    const FinSupportVector y = opcore::apply(ts, c.selfcomm.pairs[j].e);
    o.checks.push_back(check("T* e_" + std::to_string(j) + " = 0", negligible(y.window(y.levels()), TolerancePolicy{}), y.str()));
  }
  if (!o.failed().empty()) return o;
  Certificate cert;
  cert.kind = CertificateKind::ProjectionCommutator;
  cert.checked = o.checks;
  cert.conclusion = "unitarily equivalent to S (+) N with S a unilateral shift and N normal";
  cert.model = "x1:" + std::to_string(c.selfcomm.pairs.size());
  o.certificate = cert;
  return o;
}

CertificateOutcome certify_projection_commutator(const StructuredOperator& t, const ClassifyOptions& opts) {
  return certify_projection_commutator(t, classify_core(t, opts));
}

}  // namespace shiftlab::analysis
