#include "shiftlab/opcore/algebra.hpp"

#include "shiftlab/exactnum/linalg.hpp"

namespace shiftlab::opcore {

namespace {

std::size_t remap(std::size_t r, std::size_t p, std::size_t levels_old, std::size_t levels_new) {
  return r < levels_old * p ? r : levels_new * p + (r - levels_old * p);
}

// K(map(r), map(c)) += P(r, c), with rows/cols of P laid out in windows of the given sizes.
void add_embedded(FinMatrix& k, const FinMatrix& p, std::size_t po, std::size_t rows_old, std::size_t rows_new,
                  std::size_t pi, std::size_t cols_old, std::size_t cols_new) {
  for (std::size_t r = 0; r < p.rows(); ++r) {
    const std::size_t rr = remap(r, po, rows_old, rows_new);
    for (std::size_t c = 0; c < p.cols(); ++c) {
      if (p(r, c).is_zero()) continue;
      k(rr, remap(c, pi, cols_old, cols_new)) += p(r, c);
    }
  }
}

// Matrix of T_sym from levels < in_levels to levels < out_levels (strands only).
FinMatrix symbol_compression(const LaurentSymbol& sym, std::size_t out_levels, std::size_t in_levels) {
  FinMatrix m(out_levels * sym.p_out, in_levels * sym.p_in);
  for (const auto& [k, c] : sym.coeffs) {
    for (std::size_t j = 0; j < in_levels; ++j) {
      const long i = static_cast<long>(j) + k;
      if (i < 0 || i >= static_cast<long>(out_levels)) continue;
      const auto li = static_cast<std::size_t>(i);
      for (std::size_t a = 0; a < sym.p_out; ++a) {
        for (std::size_t b = 0; b < sym.p_in; ++b) {
          if (!c(a, b).is_zero()) m(li * sym.p_out + a, j * sym.p_in + b) = c(a, b);
        }
      }
    }
  }
  return m;
}

void require_same_shapes(const StructuredOperator& a, const StructuredOperator& b, const char* what) {
  if (a.shape_in != b.shape_in || a.shape_out != b.shape_out) throw ShapeMismatch(std::string(what) + ": operator shapes differ");
}

}  // namespace

FinMatrix embed_window(const FinMatrix& block, SpaceShape out, std::size_t out_old, std::size_t out_new, SpaceShape in,
                       std::size_t in_old, std::size_t in_new) {
  if (out_new < out_old || in_new < in_old) throw ShapeMismatch("embed_window cannot shrink");
  if (out_new == out_old && in_new == in_old) return block;
  FinMatrix k(out.dim(out_new), in.dim(in_new));
  add_embedded(k, block, out.p, out_old, out_new, in.p, in_old, in_new);
  return k;
}

StructuredOperator zero_operator(SpaceShape out, SpaceShape in) { return StructuredOperator(out, in); }

StructuredOperator identity(SpaceShape shape) {
  StructuredOperator t(shape, shape);
  if (shape.p) t.symbol.coeffs[0] = FinMatrix::identity(shape.p);
  t.kernel.block = FinMatrix::identity(shape.q);
  return t;
}

StructuredOperator shift(SpaceShape shape) {
  StructuredOperator t(shape, shape);
  if (shape.p) t.symbol.coeffs[1] = FinMatrix::identity(shape.p);
  return t;
}

StructuredOperator adjoint_shift(SpaceShape shape) {
  StructuredOperator t(shape, shape);
  if (shape.p) t.symbol.coeffs[-1] = FinMatrix::identity(shape.p);
  return t;
}

StructuredOperator outer(const FinSupportVector& u, const FinSupportVector& v) {
  StructuredOperator t(u.shape(), v.shape());
  const FinVector uw = u.window(u.levels());
  const FinVector vw = v.window(v.levels());
  t.kernel.n_out = u.shape().p ? u.levels() : 0;
  t.kernel.n_in = v.shape().p ? v.levels() : 0;
  t.kernel.block = FinMatrix(uw.size(), vw.size());
  for (std::size_t r = 0; r < uw.size(); ++r) {
    if (uw[r].is_zero()) continue;
    for (std::size_t c = 0; c < vw.size(); ++c) {
      if (!vw[c].is_zero()) t.kernel.block(r, c) = uw[r] * vw[c].conj();
    }
  }
  t.canonicalize();
  return t;
}

StructuredOperator basis_rank_one(SpaceShape shape, const Coord& i, const Coord& j) {
  return outer(FinSupportVector::basis(shape, i), FinSupportVector::basis(shape, j));
}

StructuredOperator tail_block(SpaceShape shape, const FinMatrix& m) {
  if (m.rows() != shape.q || m.cols() != shape.q) throw ShapeMismatch("tail block must be q x q");
  StructuredOperator t(shape, shape);
  t.kernel.block = m;
  return t;
}

StructuredOperator strand_constant(SpaceShape shape, const FinMatrix& m) {
  if (m.rows() != shape.p || m.cols() != shape.p) throw ShapeMismatch("strand matrix must be p x p");
  StructuredOperator t(shape, shape);
  if (shape.p) t.symbol.coeffs[0] = m;
  t.canonicalize();
  return t;
}

StructuredOperator cross_block(SpaceShape shape, const FinMatrix& m, CrossDirection dir) {
  StructuredOperator t(shape, shape);
  if (dir == CrossDirection::TailToStrands) {
    if (m.rows() != shape.p || m.cols() != shape.q) throw ShapeMismatch("cross block must be p x q");
    t.kernel.n_out = 1;
    t.kernel.block = FinMatrix(shape.dim(1), shape.q);
    for (std::size_t s = 0; s < shape.p; ++s) {
      for (std::size_t c = 0; c < shape.q; ++c) t.kernel.block(s, c) = m(s, c);
    }
  } else {
    if (m.rows() != shape.q || m.cols() != shape.p) throw ShapeMismatch("cross block must be q x p");
    t.kernel.n_in = 1;
    t.kernel.block = FinMatrix(shape.q, shape.dim(1));
    for (std::size_t r = 0; r < shape.q; ++r) {
      for (std::size_t s = 0; s < shape.p; ++s) t.kernel.block(r, s) = m(r, s);
    }
  }
  t.canonicalize();
  return t;
}

StructuredOperator make_primitive(const Primitive& prim, SpaceShape shape) {
  switch (prim.kind) {
    case Primitive::Kind::Shift:
      return shift(shape);
    case Primitive::Kind::AdjointShift:
      return adjoint_shift(shape);
    case Primitive::Kind::Identity:
      return identity(shape);
    case Primitive::Kind::BasisRankOne:
      return basis_rank_one(shape, prim.i, prim.j);
    case Primitive::Kind::TailBlock:
      return tail_block(shape, prim.matrix);
    case Primitive::Kind::CrossBlock:
      return cross_block(shape, prim.matrix, prim.direction);
  }
  throw std::logic_error("unknown primitive");
}

StructuredOperator block_compose(const std::vector<std::vector<StructuredOperator>>& grid) {
  if (grid.empty() || grid[0].empty()) throw ShapeMismatch("block_compose: empty grid");
  const std::size_t nr = grid.size(), nc = grid[0].size();
  for (const auto& row : grid) {
    if (row.size() != nc) throw ShapeMismatch("block_compose: ragged grid");
  }
  std::vector<SpaceShape> outs(nr), ins(nc);
  for (std::size_t i = 0; i < nr; ++i) outs[i] = grid[i][0].shape_out;
  for (std::size_t j = 0; j < nc; ++j) ins[j] = grid[0][j].shape_in;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      if (grid[i][j].shape_out != outs[i] || grid[i][j].shape_in != ins[j]) {
        throw ShapeMismatch("block_compose: block (" + std::to_string(i) + "," + std::to_string(j) + ") has inconsistent shape");
      }
    }
  }
  std::vector<std::size_t> po_off(nr + 1), qo_off(nr + 1), pi_off(nc + 1), qi_off(nc + 1);
  for (std::size_t i = 0; i < nr; ++i) {
    po_off[i + 1] = po_off[i] + outs[i].p;
    qo_off[i + 1] = qo_off[i] + outs[i].q;
  }
  for (std::size_t j = 0; j < nc; ++j) {
    pi_off[j + 1] = pi_off[j] + ins[j].p;
    qi_off[j + 1] = qi_off[j] + ins[j].q;
  }
  const SpaceShape so{po_off[nr], qo_off[nr]}, si{pi_off[nc], qi_off[nc]};
  StructuredOperator t(so, si);
  std::size_t n_out = 0, n_in = 0;
  for (const auto& row : grid) {
    for (const auto& b : row) {
      n_out = std::max(n_out, b.kernel.n_out);
      n_in = std::max(n_in, b.kernel.n_in);
    }
  }
  if (so.p == 0) n_out = 0;
  if (si.p == 0) n_in = 0;
  t.kernel.n_out = n_out;
  t.kernel.n_in = n_in;
  t.kernel.block = FinMatrix(so.dim(n_out), si.dim(n_in));
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const StructuredOperator& b = grid[i][j];
      for (const auto& [k, c] : b.symbol.coeffs) {
        auto [it, fresh] = t.symbol.coeffs.try_emplace(k, FinMatrix(so.p, si.p));
        for (std::size_t r = 0; r < c.rows(); ++r) {
          for (std::size_t s = 0; s < c.cols(); ++s) it->second(po_off[i] + r, pi_off[j] + s) = c(r, s);
        }
      }
      const auto& kb = b.kernel;
      auto map_row = [&](std::size_t r) {
        if (r < kb.n_out * outs[i].p) return (r / outs[i].p) * so.p + po_off[i] + r % outs[i].p;
        return n_out * so.p + qo_off[i] + (r - kb.n_out * outs[i].p);
      };
      auto map_col = [&](std::size_t c) {
        if (c < kb.n_in * ins[j].p) return (c / ins[j].p) * si.p + pi_off[j] + c % ins[j].p;
        return n_in * si.p + qi_off[j] + (c - kb.n_in * ins[j].p);
      };
      for (std::size_t r = 0; r < kb.block.rows(); ++r) {
        for (std::size_t c = 0; c < kb.block.cols(); ++c) {
          if (!kb.block(r, c).is_zero()) t.kernel.block(map_row(r), map_col(c)) = kb.block(r, c);
        }
      }
    }
  }
  t.canonicalize();
  return t;
}

StructuredOperator add(const StructuredOperator& a, const StructuredOperator& b) {
  require_same_shapes(a, b, "add");
  StructuredOperator t(a.shape_out, a.shape_in);
  t.symbol = a.symbol;
  for (const auto& [k, c] : b.symbol.coeffs) {
    auto [it, fresh] = t.symbol.coeffs.try_emplace(k, c);
    if (!fresh) it->second += c;
  }
  const std::size_t no = std::max(a.kernel.n_out, b.kernel.n_out);
  const std::size_t ni = std::max(a.kernel.n_in, b.kernel.n_in);
  t.kernel.n_out = no;
  t.kernel.n_in = ni;
  t.kernel.block = embed_window(a.kernel.block, a.shape_out, a.kernel.n_out, no, a.shape_in, a.kernel.n_in, ni);
  add_embedded(t.kernel.block, b.kernel.block, a.shape_out.p, b.kernel.n_out, no, a.shape_in.p, b.kernel.n_in, ni);
  t.canonicalize();
  return t;
}

StructuredOperator scale(const Scalar& c, const StructuredOperator& a) {
  StructuredOperator t = a;
  t.tag.reset();
  for (auto& [k, m] : t.symbol.coeffs) m = m.scaled(c);
  t.kernel.block = t.kernel.block.scaled(c);
  t.canonicalize();
  return t;
}

StructuredOperator subtract(const StructuredOperator& a, const StructuredOperator& b) { return add(a, scale(Scalar(-1), b)); }

StructuredOperator adjoint(const StructuredOperator& a) {
  StructuredOperator t(a.shape_in, a.shape_out);
  for (const auto& [k, c] : a.symbol.coeffs) t.symbol.coeffs.emplace(-k, c.adjoint());
  t.kernel.n_out = a.kernel.n_in;
  t.kernel.n_in = a.kernel.n_out;
  t.kernel.block = a.kernel.block.adjoint();
  t.canonicalize();
  return t;
}

StructuredOperator multiply(const StructuredOperator& a, const StructuredOperator& b) {
  if (a.shape_in != b.shape_out) throw ShapeMismatch("multiply: inner shapes differ (" + a.shape_in.str() + " vs " + b.shape_out.str() + ")");
  const SpaceShape z = a.shape_out, y = a.shape_in, x = b.shape_in;
  StructuredOperator t(z, x);
  const LaurentSymbol& f = a.symbol;
  const LaurentSymbol& g = b.symbol;
  for (const auto& [kf, fm] : f.coeffs) {
    for (const auto& [kg, gm] : g.coeffs) {
      FinMatrix prod = fm * gm;
      auto [it, fresh] = t.symbol.coeffs.try_emplace(kf + kg, std::move(prod));
      if (!fresh) it->second += fm * gm;
    }
  }
  const WindowedKernel& ka = a.kernel;
  const WindowedKernel& kb = b.kernel;
  const std::size_t fp = f.deg_plus(), gmn = g.deg_minus();
  std::size_t rw = std::max({kb.n_out + fp, ka.n_out, fp});
  std::size_t cw = std::max({ka.n_in + gmn, kb.n_in, gmn});
  if (z.p == 0) rw = 0;
  if (x.p == 0) cw = 0;
  FinMatrix k(z.dim(rw), x.dim(cw));

  // T_f T_g - T_{fg} = -Σ_{l<0} F_{i-l} G_{l-j}, nonzero only for i < deg⁺ f, j < deg⁻ g.
  if (y.p > 0 && !f.is_zero() && !g.is_zero()) {
    for (std::size_t i = 0; i < fp; ++i) {
      for (std::size_t j = 0; j < gmn; ++j) {
        const long lo = std::max(static_cast<long>(i) - static_cast<long>(fp), static_cast<long>(j) - static_cast<long>(gmn));
        for (long l = lo; l < 0; ++l) {
          auto fi = f.coeffs.find(static_cast<int>(static_cast<long>(i) - l));
          auto gi = g.coeffs.find(static_cast<int>(l - static_cast<long>(j)));
          if (fi == f.coeffs.end() || gi == g.coeffs.end()) continue;
          const FinMatrix prod = fi->second * gi->second;
          for (std::size_t r = 0; r < z.p; ++r) {
            for (std::size_t c = 0; c < x.p; ++c) {
              if (!prod(r, c).is_zero()) k(i * z.p + r, j * x.p + c) -= prod(r, c);
            }
          }
        }
      }
    }
  }
  // T_f K_b.
  if (!f.is_zero() && kb.n_out > 0) {
    const FinMatrix tf = symbol_compression(f, rw, kb.n_out);
    const FinMatrix kb_strands = kb.block.block(0, 0, kb.n_out * y.p, kb.block.cols());
    add_embedded(k, tf * kb_strands, z.p, rw, rw, x.p, kb.n_in, cw);
  }
  // K_a T_g.
  if (!g.is_zero() && ka.n_in > 0) {
    const FinMatrix tg = symbol_compression(g, ka.n_in, cw);
    const FinMatrix ka_strands = ka.block.block(0, 0, ka.block.rows(), ka.n_in * y.p);
    add_embedded(k, ka_strands * tg, z.p, ka.n_out, rw, x.p, cw, cw);
  }
  // K_a K_b over the shared middle window, tail included.
  {
    const std::size_t mid = y.p ? std::max(ka.n_in, kb.n_out) : 0;
    const FinMatrix left = embed_window(ka.block, z, ka.n_out, ka.n_out, y, ka.n_in, mid);
    const FinMatrix right = embed_window(kb.block, y, kb.n_out, mid, x, kb.n_in, kb.n_in);
    if (!left.is_zero() && !right.is_zero()) add_embedded(k, left * right, z.p, ka.n_out, rw, x.p, kb.n_in, cw);
  }
  t.kernel.n_out = rw;
  t.kernel.n_in = cw;
  t.kernel.block = std::move(k);
  t.canonicalize();
  return t;
}

StructuredOperator power(const StructuredOperator& a, std::size_t k) {
  if (!a.is_square()) throw ShapeMismatch("power of a non-square operator");
  StructuredOperator t = identity(a.shape_in);
  for (std::size_t i = 0; i < k; ++i) t = multiply(a, t);
  return t;
}

StructuredOperator commutator(const StructuredOperator& t) {
  const StructuredOperator ts = adjoint(t);
  return subtract(multiply(ts, t), multiply(t, ts));
}

FinSupportVector apply(const StructuredOperator& a, const FinSupportVector& x) {
  if (x.shape() != a.shape_in) throw ShapeMismatch("apply: vector shape " + x.shape().str() + " vs " + a.shape_in.str());
  const SpaceShape so = a.shape_out, si = a.shape_in;
  FinSupportVector y(so);
  if (!a.symbol.is_zero() && x.levels() > 0) {
    y.grow(x.levels() + a.symbol.deg_plus());
    const auto& xs = x.strand_entries();
    for (const auto& [k, c] : a.symbol.coeffs) {
      for (std::size_t j = 0; j < x.levels(); ++j) {
        const long i = static_cast<long>(j) + k;
        if (i < 0) continue;
        for (std::size_t b = 0; b < si.p; ++b) {
          const Scalar& xv = xs[j * si.p + b];
          if (xv.is_zero()) continue;
          for (std::size_t r = 0; r < so.p; ++r) {
            if (!c(r, b).is_zero()) y.ref(Coord::strand(r, static_cast<std::size_t>(i))).fma(c(r, b), xv);
          }
        }
      }
    }
  }
  const auto& kn = a.kernel;
  if (!kn.block.empty()) {
    const FinVector w = x.window(kn.n_in);
    if (!exactnum::is_zero(w)) {
      const FinVector img = kn.block * w;
      for (std::size_t r = 0; r < img.size(); ++r) {
        if (img[r].is_zero()) continue;
        const Coord c = r < kn.n_out * so.p ? Coord::strand(r % so.p, r / so.p) : Coord::tail_at(r - kn.n_out * so.p);
        y.ref(c) += img[r];
      }
    }
  }
  y.trim();
  return y;
}

bool equals(const StructuredOperator& a, const StructuredOperator& b, const TolerancePolicy& tol) {
  require_same_shapes(a, b, "equals");
  const StructuredOperator d = subtract(a, b);
  auto small = [&](const FinMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const Scalar& s = m(i, j);
        if (s.is_exact() ? !s.is_zero() : s.abs() > tol.psd_tol) return false;
      }
    }
    return true;
  };
  for (const auto& [k, c] : d.symbol.coeffs) {
    if (!small(c)) return false;
  }
  return small(d.kernel.block);
}

FinMatrix compression(const StructuredOperator& a, std::size_t out_levels, std::size_t in_levels) {
  const SpaceShape so = a.shape_out, si = a.shape_in;
  FinMatrix m(so.dim(out_levels), si.dim(in_levels));
  const FinMatrix sym = symbol_compression(a.symbol, out_levels, in_levels);
  for (std::size_t r = 0; r < sym.rows(); ++r) {
    for (std::size_t c = 0; c < sym.cols(); ++c) {
      if (!sym(r, c).is_zero()) m(r, c) = sym(r, c);
    }
  }
  const auto& kn = a.kernel;
  for (std::size_t r = 0; r < kn.block.rows(); ++r) {
    std::size_t rr;
    if (r < kn.n_out * so.p) {
      if (r / so.p >= out_levels) continue;
      rr = r;
    } else {
      rr = out_levels * so.p + (r - kn.n_out * so.p);
    }
    for (std::size_t c = 0; c < kn.block.cols(); ++c) {
      if (kn.block(r, c).is_zero()) continue;
      std::size_t cc;
      if (c < kn.n_in * si.p) {
        if (c / si.p >= in_levels) continue;
        cc = c;
      } else {
        cc = in_levels * si.p + (c - kn.n_in * si.p);
      }
      m(rr, cc) += kn.block(r, c);
    }
  }
  return m;
}

FinMatrix dense_truncation(const StructuredOperator& a, std::size_t n) { return compression(a, n, n); }

StructuredOperator restrict_to(const StructuredOperator& a, const std::vector<std::size_t>& out_strands,
                               const std::vector<std::size_t>& out_tails, const std::vector<std::size_t>& in_strands,
                               const std::vector<std::size_t>& in_tails) {
  const SpaceShape so{out_strands.size(), out_tails.size()}, si{in_strands.size(), in_tails.size()};
  StructuredOperator t(so, si);
  for (const auto& [k, c] : a.symbol.coeffs) t.symbol.coeffs.emplace(k, c.select(out_strands, in_strands));
  const auto& kn = a.kernel;
  const std::size_t n_out = so.p ? kn.n_out : 0, n_in = si.p ? kn.n_in : 0;
  std::vector<std::size_t> rows, cols;
  for (std::size_t l = 0; l < n_out; ++l) {
    for (auto s : out_strands) rows.push_back(l * a.shape_out.p + s);
  }
  for (auto q : out_tails) rows.push_back(kn.n_out * a.shape_out.p + q);
  for (std::size_t l = 0; l < n_in; ++l) {
    for (auto s : in_strands) cols.push_back(l * a.shape_in.p + s);
  }
  for (auto q : in_tails) cols.push_back(kn.n_in * a.shape_in.p + q);
  t.kernel.n_out = n_out;
  t.kernel.n_in = n_in;
  t.kernel.block = kn.block.select(rows, cols);
  t.canonicalize();
  return t;
}

StructuredOperator structured_inverse(const StructuredOperator& a, const TolerancePolicy& tol) {
  if (!a.is_square()) throw ShapeMismatch("structured_inverse: operator is not square");
  if (!a.symbol.is_constant()) throw std::invalid_argument("structured_inverse: symbol is not constant");
  const SpaceShape sh = a.shape_in;
  const std::size_t w = sh.p ? a.window() : 0;
  StructuredOperator t(sh, sh);
  FinMatrix e_inv;
  if (sh.p) {
    try {
      e_inv = exactnum::invert(a.symbol.coeff(0), tol);
    } catch (const exactnum::Singular& s) {
      FinSupportVector wit(sh);
      for (std::size_t b = 0; b < sh.p; ++b) wit.ref(Coord::strand(b, w)) = s.witness()[b];
      throw NotInvertible("symbol is singular", wit);
    }
    t.symbol.coeffs[0] = e_inv;
  }
  FinMatrix inv;
  try {
    inv = exactnum::invert(compression(a, w, w), tol);
  } catch (const exactnum::Singular& s) {
    throw NotInvertible("window block is singular", FinSupportVector::from_window(sh, w, s.witness()));
  }
  for (std::size_t l = 0; l < w; ++l) {
    for (std::size_t r = 0; r < sh.p; ++r) {
      for (std::size_t c = 0; c < sh.p; ++c) {
        if (!e_inv(r, c).is_zero()) inv(l * sh.p + r, l * sh.p + c) -= e_inv(r, c);
      }
    }
  }
  t.kernel.n_out = w;
  t.kernel.n_in = w;
  t.kernel.block = std::move(inv);
  t.canonicalize();
  return t;
}

std::vector<FinSupportVector> finite_kernel(const StructuredOperator& a, std::size_t levels, const TolerancePolicy& tol) {
  const std::size_t in_levels = a.shape_in.p ? levels : 0;
  const std::size_t out_levels = a.shape_out.p ? std::max(in_levels + a.symbol.deg_plus(), a.kernel.n_out) : 0;
  const FinMatrix m = compression(a, out_levels, in_levels);
  std::vector<FinSupportVector> out;
  for (const auto& v : exactnum::nullspace(m, tol)) out.push_back(FinSupportVector::from_window(a.shape_in, in_levels, v));
  return out;
}

}  // namespace shiftlab::opcore
