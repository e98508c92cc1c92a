#include "shiftlab/equivalence/intertwine.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <omp.h>

namespace shiftlab::equivalence {

namespace {

double max_abs(const FinSupportVector& v) {
  double m = 0.0;
  for (const auto& s : v.strand_entries()) m = std::max(m, s.abs());
  for (const auto& s : v.tail()) m = std::max(m, s.abs());
  return m;
}

bool vanishes(const FinSupportVector& v, const TolerancePolicy& tol) {
  if (v.is_zero()) return true;
  for (const auto& s : v.strand_entries()) {
    if (s.is_exact() && !s.is_zero()) return false;
  }
  for (const auto& s : v.tail()) {
    if (s.is_exact() && !s.is_zero()) return false;
  }
  return max_abs(v) <= tol.psd_tol;
}

struct LabelResult {
  bool ok = true;
  double residual = 0.0;
};

LabelResult check_label(const std::map<Coord, FinSupportVector>& imgs, const StructuredOperator& a,
                        const StructuredOperator& b, const Coord& label, const TolerancePolicy& tol) {
  const FinSupportVector lhs = opcore::apply(a, imgs.at(label));
  const FinSupportVector be = opcore::apply(b, FinSupportVector::basis(b.shape_in, label));
  FinSupportVector rhs(a.shape_out);
  const SpaceShape sh = be.shape();
  for (std::size_t i = 0; i < be.strand_entries().size(); ++i) {
    const Scalar& c = be.strand_entries()[i];
    if (!c.is_zero()) rhs.add_scaled(c, imgs.at(Coord::strand(i % sh.p, i / sh.p)));
  }
  for (std::size_t t = 0; t < sh.q; ++t) {
    if (!be.tail()[t].is_zero()) rhs.add_scaled(be.tail()[t], imgs.at(Coord::tail_at(t)));
  }
  const FinSupportVector r = lhs - rhs;
  return {vanishes(r, tol), max_abs(r)};
}

ResidualReport verify(const BasisRuleUnitary& u, const StructuredOperator& a, const StructuredOperator& b, std::size_t depth,
                      const TolerancePolicy& tol, bool parallel) {
  if (!a.is_square() || !b.is_square() || u.domain() != b.shape_in || u.codomain() != a.shape_in) {
    throw opcore::ShapeMismatch("verify_intertwine: shapes do not match");
  }
  const std::vector<Coord> labels = basis_labels(u.domain(), depth);
  // B maps level < depth into levels < depth + band.
  const std::size_t reach = u.domain().p ? std::max(depth + b.band(), b.window()) : 0;
  const std::vector<Coord> all = basis_labels(u.domain(), reach);
  const std::vector<FinSupportVector> imgs = u.images(reach);
  std::map<Coord, FinSupportVector> table;
  for (std::size_t i = 0; i < all.size(); ++i) table.emplace(all[i], imgs[i]);

  std::vector<LabelResult> results(labels.size());
  const long n = static_cast<long>(labels.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) results[i] = check_label(table, a, b, labels[i], tol);

  ResidualReport rep;
  rep.depth = depth;
  rep.labels_checked = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rep.max_residual = std::max(rep.max_residual, results[i].residual);
    if (!results[i].ok) {
      rep.zero = false;
      rep.violations.push_back(labels[i]);
    }
  }
  return rep;
}

}  // namespace

std::vector<Coord> basis_labels(SpaceShape shape, std::size_t levels) {
  std::vector<Coord> out;
  out.reserve(shape.dim(levels));
  for (std::size_t l = 0; l < levels; ++l) {
    for (std::size_t s = 0; s < shape.p; ++s) out.push_back(Coord::strand(s, l));
  }
  for (std::size_t t = 0; t < shape.q; ++t) out.push_back(Coord::tail_at(t));
  return out;
}

BasisRuleUnitary::BasisRuleUnitary(SpaceShape domain, SpaceShape codomain, Rule rule, std::size_t verified_depth)
    : domain_(domain), codomain_(codomain), rule_(std::move(rule)), verified_depth_(verified_depth) {}

BasisRuleUnitary BasisRuleUnitary::identity(SpaceShape shape) {
  return BasisRuleUnitary(shape, shape, [shape](const Coord& c) { return FinSupportVector::basis(shape, c); });
}

BasisRuleUnitary BasisRuleUnitary::from_operator(const StructuredOperator& u) {
  const SpaceShape in = u.shape_in;
  return BasisRuleUnitary(in, u.shape_out, [u, in](const Coord& c) { return opcore::apply(u, FinSupportVector::basis(in, c)); });
}

FinSupportVector BasisRuleUnitary::image(const Coord& label) const {
  if (label.tail ? label.index >= domain_.q : label.index >= domain_.p) {
    throw opcore::ShapeMismatch("BasisRuleUnitary: label " + label.str() + " outside " + domain_.str());
  }
  return rule_(label);
}

std::vector<FinSupportVector> BasisRuleUnitary::images(std::size_t levels) const {
  std::vector<FinSupportVector> out;
  for (const auto& c : basis_labels(domain_, levels)) out.push_back(image(c));
  return out;
}

FinSupportVector BasisRuleUnitary::apply(const FinSupportVector& x) const {
  if (x.shape() != domain_) throw opcore::ShapeMismatch("BasisRuleUnitary::apply: vector shape");
  FinSupportVector out(codomain_);
  for (std::size_t i = 0; i < x.strand_entries().size(); ++i) {
    const Scalar& c = x.strand_entries()[i];
    if (!c.is_zero()) out.add_scaled(c, image(Coord::strand(i % domain_.p, i / domain_.p)));
  }
  for (std::size_t t = 0; t < domain_.q; ++t) {
    if (!x.tail()[t].is_zero()) out.add_scaled(x.tail()[t], image(Coord::tail_at(t)));
  }
  out.trim();
  return out;
}

std::optional<std::pair<Coord, Coord>> first_non_orthonormal(const BasisRuleUnitary& u, std::size_t depth) {
  const std::vector<Coord> labels = basis_labels(u.domain(), depth);
  const std::vector<FinSupportVector> imgs = u.images(depth);
  const TolerancePolicy tol;
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    for (std::size_t j = i; j < imgs.size(); ++j) {
      const Scalar g = opcore::inner(imgs[i], imgs[j]);
      const Scalar want = i == j ? Scalar(1) : Scalar(0);
      const bool ok = g.is_exact() ? g == want : Scalar::near(g, want, tol.psd_tol);
      if (!ok) return std::make_pair(labels[i], labels[j]);
    }
  }
  return std::nullopt;
}

ResidualReport verify_intertwine(const BasisRuleUnitary& u, const StructuredOperator& a, const StructuredOperator& b,
                                 std::size_t depth, const TolerancePolicy& tol) {
  return verify(u, a, b, depth, tol, true);
}

ResidualReport verify_intertwine_serial(const BasisRuleUnitary& u, const StructuredOperator& a, const StructuredOperator& b,
                                        std::size_t depth, const TolerancePolicy& tol) {
  return verify(u, a, b, depth, tol, false);
}

BasisRuleUnitary model_unitary(const StructuredOperator& t, const analysis::TriangularDecomposition& d,
                               const models::ModelSpec& spec, std::size_t verified_depth, const TolerancePolicy& tol) {
  spec.validate();
  const SpaceShape model = models::build_model(spec).shape_in;
  const SpaceShape sh = t.shape_in;
  const analysis::SelfCommutator sc = analysis::self_commutator(t, tol);
  if (!sc.finite_rank || !sc.positive || sc.pairs.size() != spec.n) {
    throw SpecMismatch("self-commutator does not have " + std::to_string(spec.n) + " positive rank-one parts");
  }
  if (d.wandering_basis.size() != spec.n) {
    throw SpecMismatch("ker S* has dimension " + std::to_string(d.wandering_basis.size()) + ", expected " + std::to_string(spec.n));
  }
  const std::size_t qn = spec.normal_block.rows();
  if (sh.q < qn) throw SpecMismatch("operator has fewer tail coordinates than the normal block");

  // Shift strand i pairs with defect strand i for i < m; the rest carry alpha = 1.
  std::vector<const analysis::CommutatorPair*> order(spec.n, nullptr);
  std::vector<bool> used(sc.pairs.size(), false);
  auto take = [&](const Scalar& alpha) -> const analysis::CommutatorPair* {
    for (std::size_t k = 0; k < sc.pairs.size(); ++k) {
      if (used[k]) continue;
      const Scalar& a = sc.pairs[k].alpha;
      if (a.is_exact() ? a == alpha : Scalar::near(a, alpha, tol.psd_tol)) {
        used[k] = true;
        return &sc.pairs[k];
      }
    }
    throw SpecMismatch("no self-commutator part with alpha = " + alpha.str());
  };
  for (std::size_t i = 0; i < spec.n; ++i) order[i] = take(i < spec.alphas.size() ? spec.alphas[i] : Scalar(1));

  struct Strand {
    FinSupportVector seed;
    bool adjoint = false;
    Scalar step = Scalar(1);
  };
  std::vector<Strand> strands;
  for (std::size_t i = 0; i < spec.n; ++i) strands.push_back({order[i]->e, false, Scalar(1)});
  for (std::size_t j = 0; j < spec.m; ++j) {
    const Scalar one_minus = Scalar(1) - spec.alphas[j];
    auto dj = one_minus.exact_sqrt();
    strands.push_back({order[j]->e, true, Scalar(1) / (dj ? *dj : one_minus.sqrt_or_float())});
  }
  std::vector<FinSupportVector> tails;
  for (std::size_t k = 0; k < qn; ++k) {
    tails.push_back(opcore::apply(d.basis_change, FinSupportVector::basis(sh, Coord::tail_at(sh.q - qn + k))));
  }

  struct Memo {
    std::mutex mu;
    std::vector<std::vector<FinSupportVector>> seq;
  };
  auto memo = std::make_shared<Memo>();
  memo->seq.resize(strands.size());
  const StructuredOperator ts = opcore::adjoint(t);
  auto rule = [memo, strands, tails, t, ts](const Coord& c) -> FinSupportVector {
    if (c.tail) return tails[c.index];
    std::lock_guard<std::mutex> lock(memo->mu);
    auto& seq = memo->seq[c.index];
    const Strand& st = strands[c.index];
    if (seq.empty()) seq.push_back(st.adjoint ? opcore::apply(ts, st.seed).scaled(st.step) : st.seed);
    while (seq.size() <= c.level) {
      const FinSupportVector& last = seq.back();
      seq.push_back(st.adjoint ? opcore::apply(ts, last).scaled(st.step) : opcore::apply(t, last));
    }
    return seq[c.level];
  };
  BasisRuleUnitary u(model, sh, rule, verified_depth);
  if (auto bad = first_non_orthonormal(u, verified_depth)) {
    throw NonOrthonormalImages("images of " + bad->first.str() + " and " + bad->second.str() + " are not orthonormal",
                               bad->first, bad->second);
  }
  return u;
}

}  // namespace shiftlab::equivalence
