#include <sstream>

#include "shiftlab/analysis/predicates.hpp"
#include "shiftlab/exactnum/linalg.hpp"

namespace shiftlab::analysis {

namespace {

bool negligible(const Scalar& s, const TolerancePolicy& tol) { return s.is_exact() ? s.is_zero() : s.abs() <= tol.rank_tol; }

// Row space kept in reduced echelon form; insert returns the reduced row when it is new.
class RowSpace {
 public:
  RowSpace(std::size_t dim, TolerancePolicy tol) : dim_(dim), tol_(tol), pivot_row_(dim, -1) {}

  std::optional<FinVector> insert(FinVector v) {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const std::size_t c = pivots_[k];
      if (negligible(v[c], tol_)) continue;
      const Scalar f = v[c];
      const FinVector& r = rows_[k];
      for (std::size_t j = 0; j < dim_; ++j) {
        if (!r[j].is_zero()) v[j] -= f * r[j];
      }
      v[c] = Scalar::zero(v[c].mode());
    }
    std::size_t piv = dim_;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (!negligible(v[j], tol_)) {
        piv = j;
        break;
      }
      v[j] = Scalar::zero(v[j].mode());
    }
    if (piv == dim_) return std::nullopt;
    const Scalar inv = Scalar::one(v[piv].mode()) / v[piv];
    for (auto& s : v) {
      if (!s.is_zero()) s *= inv;
    }
    for (auto& r : rows_) {
      if (r[piv].is_zero()) continue;
      const Scalar f = r[piv];
      for (std::size_t j = 0; j < dim_; ++j) {
        if (!v[j].is_zero()) r[j] -= f * v[j];
      }
      r[piv] = Scalar::zero(f.mode());
    }
    pivot_row_[piv] = static_cast<long>(rows_.size());
    pivots_.push_back(piv);
    rows_.push_back(v);
    return v;
  }

  std::size_t rank() const { return rows_.size(); }

  bool annihilates(const FinVector& x) const {
    for (const auto& r : rows_) {
      Scalar acc = Scalar::zero(x.empty() ? Mode::Exact : x[0].mode());
      for (std::size_t j = 0; j < dim_; ++j) {
        if (!r[j].is_zero() && !x[j].is_zero()) acc.fma(r[j], x[j]);
      }
      if (!negligible(acc, tol_)) return false;
    }
    return true;
  }

  /// Basis of the common null space of the rows.
  std::vector<FinVector> null_basis(Mode mode) const {
    std::vector<FinVector> out;
    for (std::size_t free = 0; free < dim_; ++free) {
      if (pivot_row_[free] >= 0) continue;
      FinVector x(dim_, Scalar::zero(mode));
      x[free] = Scalar::one(mode);
      for (std::size_t k = 0; k < rows_.size(); ++k) x[pivots_[k]] = -rows_[k][free];
      out.push_back(std::move(x));
    }
    return out;
  }

 private:
  std::size_t dim_;
  TolerancePolicy tol_;
  std::vector<long> pivot_row_;
  std::vector<std::size_t> pivots_;
  std::vector<FinVector> rows_;
};

using SparseRow = std::vector<std::pair<std::size_t, Scalar>>;

// Rows of a compression with `ext` levels, re-indexed so window rows line up with window columns.
struct WindowMap {
  std::vector<SparseRow> inside;   // indexed by window coordinate
  std::vector<SparseRow> outside;  // rows at levels in [window, ext)
};

WindowMap split_rows(const FinMatrix& m, const SpaceShape& sh, std::size_t window, std::size_t ext) {
  WindowMap out;
  out.inside.resize(sh.dim(window));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    SparseRow row;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (!m(r, c).is_zero()) row.emplace_back(c, m(r, c));
    }
    if (r < window * sh.p) {
      out.inside[r] = std::move(row);
    } else if (r >= ext * sh.p) {
      out.inside[window * sh.p + (r - ext * sh.p)] = std::move(row);
    } else if (!row.empty()) {
      out.outside.push_back(std::move(row));
    }
  }
  return out;
}

FinVector dense(const SparseRow& row, std::size_t dim, Mode mode) {
  FinVector v(dim, Scalar::zero(mode));
  for (const auto& [c, s] : row) v[c] = s;
  return v;
}

// r ↦ r·T on window functionals (r extended by zero outside the window).
FinVector pull_back(const FinVector& r, const WindowMap& t, Mode mode) {
  FinVector y(r.size(), Scalar::zero(mode));
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].is_zero()) continue;
    for (const auto& [c, s] : t.inside[i]) y[c].fma(r[i], s);
  }
  return y;
}

}  // namespace

Certainty purity_evidence(const StructuredOperator& t, std::size_t depth, std::size_t window, const TolerancePolicy& tol) {
  if (!t.is_square()) throw opcore::ShapeMismatch("purity_evidence: operator is not square");
  const StructuredOperator c = opcore::commutator(t);
  for (const auto& [k, m] : c.symbol.coeffs) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (!negligible(m(i, j), tol)) throw PreconditionFailed("purity_evidence: self-commutator has a symbol obstruction");
      }
    }
  }
  if (t.tag && t.tag->pure) return Certainty::certified("pure by construction (" + t.tag->origin + ")");
  const SpaceShape sh = t.shape_in;
  if (sh.dim(1) == 0) return Certainty::unknown("zero space");
  const Mode mode = t.mode();
  const FinMatrix& cb = c.kernel.block;
  if (cb.is_zero() || (mode == Mode::Float && FinMatrix::near(cb, FinMatrix(cb.rows(), cb.cols()), tol.rank_tol))) {
    const FinSupportVector x = FinSupportVector::basis(sh, sh.p ? Coord::strand(0, 0) : Coord::tail_at(0));
    return Certainty::refuted(x, "operator is normal; the whole space reduces it");
  }

  const std::size_t w = sh.p ? std::max({window, t.window(), c.window()}) : 0;
  const std::size_t ext = sh.p ? w + t.band() : 0;
  const std::size_t dim = sh.dim(w);
  const StructuredOperator ts = opcore::adjoint(t);
  const WindowMap tm = split_rows(opcore::compression(t, ext, w), sh, w, ext);
  const WindowMap tsm = split_rows(opcore::compression(ts, ext, w), sh, w, ext);
  const FinMatrix cm = opcore::compression(c, std::max(w, c.window()), w);

  RowSpace rs(dim, tol);
  std::vector<FinVector> frontier;
  auto push = [&](FinVector v) {
    if (auto r = rs.insert(std::move(v))) frontier.push_back(std::move(*r));
  };
  for (std::size_t r = 0; r < cm.rows(); ++r) push(cm.row(r));
  for (const auto& row : tm.outside) push(dense(row, dim, mode));
  for (const auto& row : tsm.outside) push(dense(row, dim, mode));

  const std::size_t steps = std::max<std::size_t>(1, depth);
  while (!frontier.empty() && rs.rank() < dim) {
    std::vector<FinVector> current;
    current.swap(frontier);
    for (const auto& r : current) {
      for (const WindowMap* op : {&tm, &tsm}) {
        FinVector x = r;
        for (std::size_t j = 0; j < steps && rs.rank() < dim; ++j) {
          x = pull_back(x, *op, mode);
          push(x);
        }
      }
    }
  }

  std::ostringstream os;
  if (rs.rank() == dim) {
    os << "window-" << w << " refinement empty";
    Certainty out = Certainty::unknown(os.str());
    out.dimension = 0;
    return out;
  }
  const auto basis = rs.null_basis(mode);
  // Exact check that the survivors span a reducing subspace inside ker [T*,T].
  for (const auto& v : basis) {
    const FinSupportVector x = FinSupportVector::from_window(sh, w, v);
    bool ok = opcore::apply(c, x).is_zero() || mode == Mode::Float;
    for (const StructuredOperator* op : {&t, &ts}) {
      const FinSupportVector y = opcore::apply(*op, x);
      if (y.levels() > w) ok = false;
      if (ok && !rs.annihilates(y.window(w))) ok = false;
    }
    if (!ok) throw InternalInconsistency("purity refinement produced a subspace that does not reduce T");
  }
  os << "T is normal on a reducing subspace of dimension " << basis.size() << " supported in window " << w;
  Certainty out = Certainty::refuted(FinSupportVector::from_window(sh, w, basis.front()), os.str());
  out.dimension = basis.size();
  return out;
}

}  // namespace shiftlab::analysis
