#include "shiftlab/exactnum/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shiftlab::exactnum {

namespace {

bool negligible(const Scalar& s, double thresh) {
  if (s.is_exact()) return s.is_zero();
  return s.abs() <= thresh;
}

double max_abs(const FinMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) best = std::max(best, m(i, j).abs());
  }
  return best;
}

FinMatrix floated(const FinMatrix& m) {
  FinMatrix f(m.rows(), m.cols(), Mode::Float);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) f(i, j) = m(i, j).to_float();
  }
  return f;
}

FinVector normalize_first_nonzero(FinVector v) {
  for (const auto& s : v) {
    if (!s.is_zero()) {
      const Scalar lead = s;
      for (auto& x : v) x /= lead;
      break;
    }
  }
  return v;
}

FinVector unit(std::size_t n, std::size_t k, Mode mode) {
  FinVector v = zeros(n, mode);
  v[k] = Scalar::one(mode);
  return v;
}

}  // namespace

Rref rref(FinMatrix m, const TolerancePolicy& tol) {
  const bool exact = m.mode() == Mode::Exact;
  if (!exact) m = floated(m);
  const double thresh = exact ? 0.0 : tol.rank_tol * std::max(1.0, max_abs(m));
  Rref out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = m.rows();
    if (exact) {
      for (std::size_t i = row; i < m.rows(); ++i) {
        if (!m(i, col).is_zero()) {
          piv = i;
          break;
        }
      }
    } else {
      double best = thresh;
      for (std::size_t i = row; i < m.rows(); ++i) {
        if (m(i, col).abs() > best) {
          best = m(i, col).abs();
          piv = i;
        }
      }
    }
    if (piv == m.rows()) continue;
    if (piv != row) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
    }
    const Scalar inv = Scalar::one(exact ? Mode::Exact : Mode::Float) / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) {
      if (!m(row, j).is_zero()) m(row, j) *= inv;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      const Scalar f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) {
        if (!m(row, j).is_zero()) m(i, j) -= f * m(row, j);
      }
      if (!exact) m(i, col) = Scalar::zero(Mode::Float);
    }
    out.pivots.push_back(col);
    ++row;
  }
  if (!exact) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (negligible(m(i, j), thresh)) m(i, j) = Scalar::zero(Mode::Float);
      }
    }
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank_of(const FinMatrix& m, const TolerancePolicy& tol) {
  if (m.empty()) return 0;
  if (m.mode() == Mode::Exact) return rref(m, tol).pivots.size();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& sv = svd.singularValues();
  const double largest = sv.size() ? sv(0) : 0.0;
  const double thresh = tol.rank_tol * std::max(1.0, largest);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv(i) > thresh ? 1 : 0;
  return r;
}

std::vector<FinVector> nullspace(const FinMatrix& m, const TolerancePolicy& tol) {
  const Mode mode = m.mode();
  const Rref r = rref(m, tol);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<FinVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    FinVector v = unit(m.cols(), f, mode);
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
      if (!r.reduced(i, f).is_zero()) v[r.pivots[i]] = -r.reduced(i, f);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

RangeBasis gram_schmidt(const std::vector<FinVector>& vs, const TolerancePolicy& tol) {
  RangeBasis out;
  for (const auto& v : vs) {
    FinVector u = v;
    const bool exact = std::all_of(v.begin(), v.end(), [](const Scalar& s) { return s.is_exact(); });
    for (std::size_t k = 0; k < out.vectors.size(); ++k) {
      const Scalar c = inner(u, out.vectors[k]) / out.gram[k];
      if (!c.is_zero()) u = axpy(-c, out.vectors[k], std::move(u));
    }
    if (exact) {
      if (is_zero(u)) continue;
      Scalar g = inner(u, u);
      out.vectors.push_back(std::move(u));
      out.gram.push_back(std::move(g));
    } else {
      const double nrm = std::sqrt(std::max(0.0, inner(u, u).to_complex().real()));
      double ref = std::sqrt(std::max(0.0, inner(v, v).to_complex().real()));
      if (nrm <= tol.rank_tol * std::max(1.0, ref)) continue;
      u = scale(Scalar::from_double(1.0 / nrm), std::move(u));
      out.vectors.push_back(std::move(u));
      out.gram.push_back(Scalar::from_double(1.0));
    }
  }
  return out;
}

RangeBasis orth_basis_of_range(const FinMatrix& m, const TolerancePolicy& tol) {
  if (m.empty()) return {};
  const Rref r = rref(m, tol);
  std::vector<FinVector> cols;
  cols.reserve(r.pivots.size());
  for (auto p : r.pivots) cols.push_back(m.col(p));
  return gram_schmidt(cols, tol);
}

bool is_hermitian(const FinMatrix& m, const TolerancePolicy& tol) {
  if (!m.is_square()) return false;
  const FinMatrix a = m.adjoint();
  if (m.mode() == Mode::Exact) return a == m;
  return FinMatrix::near(a, m, tol.psd_tol * std::max(1.0, max_abs(m)));
}

PsdResult psd_witness(const FinMatrix& m, const TolerancePolicy& tol) {
  if (!is_hermitian(m, tol)) throw NotHermitian("psd check on a non-hermitian matrix");
  const std::size_t n = m.rows();
  if (m.mode() == Mode::Float) {
    if (n == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
    if (es.eigenvalues()(0) >= -tol.psd_tol) return {};
    PsdResult r;
    r.psd = false;
    r.witness.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.witness[i] = Scalar::from_complex(es.eigenvectors()(static_cast<Eigen::Index>(i), 0));
    return r;
  }
  // Pivoted rational LDL*: R_jk = v_j* M v_k on the active set.
  FinMatrix r = m;
  std::vector<FinVector> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = unit(n, i, Mode::Exact);
  std::vector<bool> active(n, true);
  for (;;) {
    std::size_t pos = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const int s = r(i, i).real_sign();
      if (s < 0) return {false, v[i]};
      if (s > 0 && pos == n) pos = i;
    }
    if (pos == n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!active[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !active[j] || r(i, j).is_zero()) continue;
          return {false, axpy(-r(i, j).conj(), v[j], v[i])};
        }
      }
      return {};
    }
    const Scalar piv = r(pos, pos);
    active[pos] = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || r(pos, j).is_zero()) continue;
      v[j] = axpy(-(r(pos, j) / piv), v[pos], std::move(v[j]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || r(j, pos).is_zero()) continue;
      const Scalar f = r(j, pos) / piv;
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k] || r(pos, k).is_zero()) continue;
        r(j, k) -= f * r(pos, k);
      }
    }
  }
}

bool psd_check(const FinMatrix& m, const TolerancePolicy& tol) { return psd_witness(m, tol).psd; }

FinMatrix invert(const FinMatrix& m, const TolerancePolicy& tol) {
  if (!m.is_square()) throw ShapeError("invert: matrix not square");
  const std::size_t n = m.rows();
  const Mode mode = m.mode();
  FinMatrix aug(n, 2 * n, mode);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = Scalar::one(mode);
  }
  const Rref r = rref(aug, tol);
  if (r.pivots.size() < n || (n > 0 && r.pivots[n - 1] != n - 1)) {
    auto ker = nullspace(m, tol);
    throw Singular(ker.empty() ? FinVector{} : normalize_first_nonzero(ker.front()));
  }
  return r.reduced.block(0, n, n, n);
}

std::optional<FinVector> solve(const FinMatrix& a, const FinVector& b, const TolerancePolicy& tol) {
  if (a.rows() != b.size()) throw ShapeError("solve: dimension mismatch");
  const std::size_t n = a.cols();
  FinMatrix aug(a.rows(), n + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  const Rref r = rref(aug, tol);
  if (!r.pivots.empty() && r.pivots.back() == n) return std::nullopt;
  FinVector x = zeros(n, aug.mode());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) x[r.pivots[i]] = r.reduced(i, n);
  return x;
}

bool in_column_space(const FinMatrix& a, const FinVector& b, const TolerancePolicy& tol) {
  return solve(a, b, tol).has_value();
}

Eigen::MatrixXcd to_eigen(const FinMatrix& m) {
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).to_complex();
  }
  return e;
}

FinMatrix from_eigen(const Eigen::MatrixXcd& e) {
  FinMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()), Mode::Float);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Scalar::from_complex(e(i, j));
  }
  return m;
}

std::vector<double> hermitian_eigenvalues(const FinMatrix& m) {
  if (m.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<mpq_class> convergents(double x, long max_den) {
  std::vector<mpq_class> out;
  if (!std::isfinite(x)) return out;
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(x));
  mpz_class k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  out.emplace_back(h, k);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    const double inv = 1.0 / frac;
    const auto a = static_cast<long>(std::floor(inv));
    frac = inv - static_cast<double>(a);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    mpq_class q(h, k);
    q.canonicalize();
    out.push_back(q);
  }
  return out;
}

namespace {

struct Cluster {
  double value = 0.0;
  std::size_t size = 0;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<double>& ev, double scale) {
  std::vector<Cluster> out;
  const double gap = 1e-8 * std::max(1.0, scale);
  for (double x : ev) {
    if (!out.empty() && std::abs(x - out.back().value) <= gap) {
      ++out.back().size;
    } else {
      out.push_back({x, 1});
    }
  }
  return out;
}

// Orthonormal basis of span(basis) obtained by projecting coordinate vectors in
// order; each vector has its first nonzero entry positive real. Exact only if
// every normalization is a rational square root.
std::optional<std::vector<FinVector>> canonical_eigenbasis(const std::vector<FinVector>& basis, std::size_t n, bool exact,
                                                           const TolerancePolicy& tol) {
  const Mode mode = exact ? Mode::Exact : Mode::Float;
  const std::size_t d = basis.size();
  const FinMatrix b = FinMatrix::from_columns(n, basis);
  FinMatrix proj;
  if (exact) {
    proj = b * invert(b.adjoint() * b) * b.adjoint();
  } else {
    const RangeBasis on = gram_schmidt(basis, tol);
    const FinMatrix q = FinMatrix::from_columns(n, on.vectors);
    proj = q * q.adjoint();
  }
  std::vector<FinVector> cand;
  for (std::size_t k = 0; k < n && cand.size() < n; ++k) cand.push_back(proj.col(k));
  RangeBasis gs = gram_schmidt(cand, tol);
  if (gs.vectors.size() < d) return std::nullopt;
  gs.vectors.resize(d);
  gs.gram.resize(d);
  std::vector<FinVector> out;
  for (std::size_t k = 0; k < d; ++k) {
    FinVector u = std::move(gs.vectors[k]);
    Scalar lead;
    for (const auto& s : u) {
      if (!s.is_zero() && (exact || s.abs() > tol.rank_tol)) {
        lead = s;
        break;
      }
    }
    if (exact) {
      const Scalar rad = lead.abs2() * gs.gram[k];
      const auto root = rad.exact_sqrt();
      if (!root) return std::nullopt;
      u = scale(lead.conj() / *root, std::move(u));
    } else {
      const double a = lead.abs();
      u = scale(lead.conj().to_float() / Scalar::from_double(a), std::move(u));
    }
    out.push_back(std::move(u));
  }
  (void)mode;
  return out;
}

SpectralDecomposition float_decomp(const FinMatrix& m, const TolerancePolicy& tol) {
  SpectralDecomposition out;
  out.float_derived = true;
  const std::size_t n = m.rows();
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  std::size_t start = 0;
  for (const auto& c : cluster_eigenvalues(ev, scale)) {
    const std::size_t first = start;
    start += c.size;
    if (c.value <= tol.psd_tol * std::max(1.0, scale)) continue;
    std::vector<FinVector> basis;
    double mean = 0.0;
    for (std::size_t k = first; k < first + c.size; ++k) {
      mean += ev[k];
      FinVector v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = Scalar::from_complex(es.eigenvectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      basis.push_back(std::move(v));
    }
    mean /= static_cast<double>(c.size);
    auto canon = canonical_eigenbasis(basis, n, false, tol);
    for (auto& e : *canon) out.pairs.push_back({Scalar::from_double(mean), std::move(e)});
  }
  return out;
}

}  // namespace

SpectralDecomposition spectral_rank_one_decomp(const FinMatrix& m, const TolerancePolicy& tol) {
  PsdResult psd = psd_witness(m, tol);
  if (!psd.psd) throw NotPSD(std::move(psd.witness));
  const std::size_t n = m.rows();
  if (m.mode() == Mode::Float) return float_decomp(m, tol);
  if (m.is_zero()) return {};

  const std::vector<double> ev = hermitian_eigenvalues(m);
  const double scale = std::max(std::abs(ev.front()), std::abs(ev.back()));
  std::size_t accounted = n - rank_of(m, tol);
  std::vector<std::pair<mpq_class, std::vector<FinVector>>> spaces;
  for (const auto& c : cluster_eigenvalues(ev, scale)) {
    if (c.value <= 1e-9 * std::max(1.0, scale)) continue;
    bool found = false;
    for (const auto& q : convergents(c.value)) {
      if (sgn(q) <= 0 || std::abs(q.get_d() - c.value) > 1e-6 * std::max(1.0, scale)) continue;
      FinMatrix shifted = m;
      for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= Scalar(q);
      auto ker = nullspace(shifted, tol);
      if (ker.size() == c.size) {
        spaces.emplace_back(q, std::move(ker));
        accounted += c.size;
        found = true;
        break;
      }
    }
    if (!found) break;
  }
  if (accounted != n) return float_decomp(m, tol);

  SpectralDecomposition out;
  for (auto& [q, ker] : spaces) {
    auto canon = canonical_eigenbasis(ker, n, true, tol);
    if (!canon) return float_decomp(m, tol);
    for (auto& e : *canon) out.pairs.push_back({Scalar(q), std::move(e)});
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(),
                   [](const SpectralPair& a, const SpectralPair& b) { return a.alpha.re() < b.alpha.re(); });
  return out;
}

}  // namespace shiftlab::exactnum
