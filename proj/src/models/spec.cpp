#include "shiftlab/models/spec.hpp"

#include <sstream>

namespace shiftlab::models {

namespace {

bool real_less(const Scalar& a, const Scalar& b) { return (b - a).real_sign() > 0; }

void require_normal(const FinMatrix& nb) {
  if (!nb.is_square()) throw SpecInvalid("normal block must be square");
  if (nb.empty()) return;
  const FinMatrix c = nb.adjoint() * nb - nb * nb.adjoint();
  const bool ok = nb.mode() == Mode::Exact ? c.is_zero() : FinMatrix::near(c, FinMatrix(c.rows(), c.cols()), 1e-10);
  if (!ok) throw SpecInvalid("normal block is not normal: [N*,N] = " + c.str());
}

}  // namespace

ModelSpec ModelSpec::x1(std::size_t n, FinMatrix normal) {
  ModelSpec s;
  s.kind = ModelKind::X1;
  s.n = n;
  s.m = 0;
  s.alphas.assign(n, Scalar(1));
  s.normal_block = std::move(normal);
  return s;
}

ModelSpec ModelSpec::x2(std::size_t n, std::size_t m, const std::vector<Scalar>& small_alphas, FinMatrix normal) {
  ModelSpec s;
  s.kind = ModelKind::X2;
  s.n = n;
  s.m = m;
  s.alphas = small_alphas;
  while (s.alphas.size() < n) s.alphas.emplace_back(1);
  s.normal_block = std::move(normal);
  return s;
}

void ModelSpec::validate() const {
  if (n == 0) throw SpecInvalid("n must be positive");
  if (alphas.size() != n) throw SpecInvalid("expected " + std::to_string(n) + " alphas, got " + std::to_string(alphas.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar& a = alphas[i];
    if (!a.is_real() || a.real_sign() <= 0 || real_less(Scalar(1), a)) throw SpecInvalid("alpha " + a.str() + " is outside (0,1]");
    if (i > 0 && real_less(a, alphas[i - 1])) throw SpecInvalid("alphas must be ascending");
  }
  if (kind == ModelKind::X1) {
    if (m != 0) throw SpecInvalid("X1 takes no m");
    for (const auto& a : alphas) {
      if (!Scalar::near(a, Scalar(1), 1e-12)) throw SpecInvalid("X1 requires every alpha = 1");
    }
  } else {
    if (m == 0 || m > n) throw SpecInvalid("X2 requires 1 <= m <= n");
    if (!real_less(alphas[m - 1], Scalar(1))) throw SpecInvalid("X2 requires alpha_m < 1");
    for (std::size_t i = m; i < n; ++i) {
      if (real_less(alphas[i], Scalar(1))) throw SpecInvalid("X2 requires alpha_i = 1 for i > m");
    }
  }
  require_normal(normal_block);
}

std::string ModelSpec::key() const {
  std::ostringstream os;
  if (kind == ModelKind::X1) {
    os << "x1:" << n;
  } else {
    os << "x2:" << n << "," << m;
    for (std::size_t i = 0; i < m && i < alphas.size(); ++i) os << "," << alphas[i].str();
  }
  return os.str();
}

ModelSpec ModelSpec::parse_key(const std::string& key, FinMatrix normal) {
  const auto colon = key.find(':');
  if (colon == std::string::npos) throw SpecInvalid("model key must look like x1:N or x2:N,M,ALPHAS");
  const std::string head = key.substr(0, colon);
  std::vector<std::string> parts;
  std::stringstream ss(key.substr(colon + 1));
  for (std::string tok; std::getline(ss, tok, ',');) parts.push_back(tok);
  auto to_size = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used != s.size() || v < 0) throw SpecInvalid("bad integer '" + s + "' in model key");
      return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
      throw SpecInvalid("bad integer '" + s + "' in model key");
    }
  };
  if (head == "x1") {
    if (parts.size() != 1) throw SpecInvalid("x1 key takes exactly one integer");
    return x1(to_size(parts[0]), std::move(normal));
  }
  if (head != "x2") throw SpecInvalid("unknown model kind '" + head + "'");
  if (parts.size() < 2) throw SpecInvalid("x2 key needs n and m");
  const std::size_t n = to_size(parts[0]), m = to_size(parts[1]);
  std::vector<Scalar> al;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    auto q = exactnum::parse_rational(parts[i]);
    if (!q) throw SpecInvalid("bad alpha '" + parts[i] + "' in model key");
    al.emplace_back(*q);
  }
  if (al.size() == 1 && m > 1) al.assign(m, al[0]);
  if (al.size() != m) throw SpecInvalid("x2 key lists " + std::to_string(al.size()) + " alphas for m = " + std::to_string(m));
  return x2(n, m, al, std::move(normal));
}

FinMatrix build_D(const std::vector<Scalar>& alphas, Mode mode) {
  FinVector d;
  for (const auto& a : alphas) {
    if (!a.is_real() || a.real_sign() <= 0 || real_less(Scalar(1), a)) throw OutOfRange("alpha " + a.str() + " is outside (0,1]");
    const Scalar c = Scalar(1) - a;
    if (mode == Mode::Float) {
      d.push_back(c.to_float().sqrt_or_float());
      continue;
    }
    auto r = c.exact_sqrt();
    if (!r) throw NotPerfectSquare("1 - " + a.str() + " is not the square of a rational");
    d.push_back(*r);
  }
  return FinMatrix::diagonal(d);
}

FinMatrix build_Dtilde(const std::vector<Scalar>& alphas, std::size_t n, Mode mode) {
  const std::size_t m = alphas.size();
  if (n < m) throw OutOfRange("Dtilde needs n >= m");
  const FinMatrix d = build_D(alphas, mode);
  FinMatrix out(n, m, mode);
  for (std::size_t i = 0; i < m; ++i) out(i, i) = d(i, i);
  return out;
}

StructuredOperator build_X1(const ModelSpec& spec) {
  if (spec.kind != ModelKind::X1) throw SpecInvalid("build_X1 needs an X1 spec");
  spec.validate();
  const SpaceShape sh{spec.n, spec.normal_block.rows()};
  StructuredOperator t = opcore::shift(sh);
  if (sh.q) t = opcore::add(t, opcore::tail_block(sh, spec.normal_block));
  t.tag = opcore::ConstructionTag{"X1", sh.q == 0, sh.q == 0, spec.key(), "shift of multiplicity n plus a normal block"};
  return t;
}

StructuredOperator build_X2(const ModelSpec& spec) {
  if (spec.kind != ModelKind::X2) throw SpecInvalid("build_X2 needs an X2 spec");
  spec.validate();
  const std::size_t n = spec.n, m = spec.m;
  const SpaceShape sh{n + m, spec.normal_block.rows()};
  const std::vector<Scalar> small(spec.alphas.begin(), spec.alphas.begin() + static_cast<std::ptrdiff_t>(m));
  const FinMatrix d = build_D(small, spec.alphas[0].mode());
  StructuredOperator t(sh, sh);
  FinMatrix up(sh.p, sh.p), down(sh.p, sh.p);
  for (std::size_t i = 0; i < n; ++i) up(i, i) = Scalar(1);
  for (std::size_t j = 0; j < m; ++j) down(n + j, n + j) = d(j, j);
  t.symbol.coeffs[1] = up;
  t.symbol.coeffs[-1] = down;
  t.kernel.n_out = 1;
  t.kernel.n_in = 1;
  t.kernel.block = FinMatrix(sh.dim(1), sh.dim(1));
  for (std::size_t j = 0; j < m; ++j) t.kernel.block(j, n + j) = d(j, j);
  for (std::size_t r = 0; r < sh.q; ++r) {
    for (std::size_t c = 0; c < sh.q; ++c) t.kernel.block(sh.p + r, sh.p + c) = spec.normal_block(r, c);
  }
  t.canonicalize();
  t.tag = opcore::ConstructionTag{"X2", sh.q == 0, false, spec.key(), "two-part model with defect weights"};
  return t;
}

StructuredOperator build_model(const ModelSpec& spec) { return spec.kind == ModelKind::X1 ? build_X1(spec) : build_X2(spec); }

StructuredOperator build_shift_coshift(std::size_t s_mult, const StructuredOperator& x) {
  const SpaceShape h{s_mult, 0};
  if (x.shape_in != h || x.shape_out != h) throw opcore::ShapeMismatch("build_shift_coshift: X must act on " + h.str());
  return opcore::block_compose({{opcore::shift(h), x}, {opcore::zero_operator(h, h), opcore::adjoint_shift(h)}});
}

}  // namespace shiftlab::models
