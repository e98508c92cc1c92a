#include <cstdio>
#include <variant>

#include "shiftlab/cli/dsl.hpp"

namespace shiftlab::cli {

namespace {

using Value = std::variant<Scalar, StructuredOperator>;

StructuredOperator to_float(StructuredOperator t) {
  for (auto& [k, m] : t.symbol.coeffs) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = m(i, j).to_float();
    }
  }
  for (std::size_t i = 0; i < t.kernel.block.rows(); ++i) {
    for (std::size_t j = 0; j < t.kernel.block.cols(); ++j) t.kernel.block(i, j) = t.kernel.block(i, j).to_float();
  }
  return t;
}

class Evaluator {
 public:
  Evaluator(Evaluated& env, Mode mode) : env_(env), mode_(mode) {}

  void declare(const std::string& name, SpaceShape shape) {
    env_.spaces[name] = shape;
    current_ = name;
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Number: {
        Scalar s = e.imaginary ? Scalar::complex(0, e.value) : Scalar(e.value);
        return mode_ == Mode::Float ? s.to_float() : s;
      }
      case ExprKind::Shift:
        return opcore::shift(space(e.name));
      case ExprKind::AdjointShift:
        return opcore::adjoint_shift(space(e.name));
      case ExprKind::Identity:
        return opcore::identity(space(e.name));
      case ExprKind::RankOne: {
        const SpaceShape l = space(e.left.space), r = space(e.right.space);
        check_coord(l, e.left.coord);
        check_coord(r, e.right.coord);
        return opcore::outer(opcore::FinSupportVector::basis(l, e.left.coord), opcore::FinSupportVector::basis(r, e.right.coord));
      }
      case ExprKind::Mat:
      case ExprKind::Sym: {
        const SpaceShape sh = space(e.name);
        const FinMatrix m = scalar_grid(e.grid);
        if (e.kind == ExprKind::Mat) {
          if (m.rows() != sh.q || m.cols() != sh.q) throw ShapeError("mat[] must be " + dims(sh.q) + " on " + sh.str());
          return opcore::tail_block(sh, m);
        }
        if (m.rows() != sh.p || m.cols() != sh.p) throw ShapeError("sym[] must be " + dims(sh.p) + " on " + sh.str());
        return opcore::strand_constant(sh, m);
      }
      case ExprKind::Block:
        return block(e.grid);
      case ExprKind::Ref: {
        if (auto it = env_.operators.find(e.name); it != env_.operators.end()) return it->second;
        if (auto it = env_.scalars.find(e.name); it != env_.scalars.end()) return it->second;
        throw ShapeError("unbound identifier " + e.name);
      }
      case ExprKind::Adjoint: {
        Value v = eval(*e.a);
        if (auto* s = std::get_if<Scalar>(&v)) return s->conj();
        return opcore::adjoint(std::get<StructuredOperator>(v));
      }
      case ExprKind::Neg: {
        Value v = eval(*e.a);
        if (auto* s = std::get_if<Scalar>(&v)) return -*s;
        return opcore::scale(Scalar(-1), std::get<StructuredOperator>(v));
      }
      case ExprKind::Add:
      case ExprKind::Sub:
        return add(eval(*e.a), eval(*e.b), e.kind == ExprKind::Sub);
      case ExprKind::Mul:
        return mul(eval(*e.a), eval(*e.b));
      case ExprKind::Pow: {
        Value v = eval(*e.a);
        if (auto* s = std::get_if<Scalar>(&v)) {
          Scalar r = Scalar::one(s->mode());
          for (std::size_t k = 0; k < e.exponent; ++k) r *= *s;
          return r;
        }
        const auto& t = std::get<StructuredOperator>(v);
        if (!t.is_square()) throw ShapeError("power of a non-square operator");
        return opcore::power(t, e.exponent);
      }
    }
    throw ShapeError("unknown expression");
  }

 private:
  Evaluated& env_;
  Mode mode_;
  std::string current_;

  static std::string dims(std::size_t n) { return std::to_string(n) + "x" + std::to_string(n); }

  SpaceShape space(const std::string& name) {
    const std::string& key = name.empty() ? current_ : name;
    if (key.empty()) throw ShapeError("no space declared");
    auto it = env_.spaces.find(key);
    if (it == env_.spaces.end()) throw ShapeError("unknown space " + key);
    return it->second;
  }

  static void check_coord(SpaceShape sh, const Coord& c) {
    if (c.tail ? c.index >= sh.q : c.index >= sh.p) throw ShapeError("coordinate " + c.str() + " outside " + sh.str());
  }

  FinMatrix scalar_grid(const std::vector<std::vector<ExprPtr>>& g) {
    const std::size_t cols = g.front().size();
    FinMatrix m(g.size(), cols);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i].size() != cols) throw ShapeError("ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) {
        Value v = eval(*g[i][j]);
        if (!std::holds_alternative<Scalar>(v)) throw ShapeError("matrix entries must be scalars");
        m(i, j) = std::get<Scalar>(v);
      }
    }
    return m;
  }

  StructuredOperator block(const std::vector<std::vector<ExprPtr>>& g) {
    const std::size_t rows = g.size(), cols = g.front().size();
    std::vector<std::vector<Value>> vals(rows);
    std::vector<std::optional<SpaceShape>> out(rows), in(cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (g[i].size() != cols) throw ShapeError("ragged block rows");
      for (std::size_t j = 0; j < cols; ++j) {
        vals[i].push_back(eval(*g[i][j]));
        if (auto* t = std::get_if<StructuredOperator>(&vals[i][j])) {
          if (out[i] && *out[i] != t->shape_out) throw ShapeError("block row " + std::to_string(i) + " mixes output shapes");
          if (in[j] && *in[j] != t->shape_in) throw ShapeError("block column " + std::to_string(j) + " mixes input shapes");
          out[i] = t->shape_out;
          in[j] = t->shape_in;
        }
      }
    }
    std::vector<std::vector<StructuredOperator>> grid(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (auto* t = std::get_if<StructuredOperator>(&vals[i][j])) {
          grid[i].push_back(*t);
          continue;
        }
        if (!out[i] || !in[j]) throw ShapeError("cannot infer the shape of scalar block cell (" + std::to_string(i) + "," + std::to_string(j) + ")");
        const Scalar& c = std::get<Scalar>(vals[i][j]);
        if (c.is_zero()) {
          grid[i].push_back(opcore::zero_operator(*out[i], *in[j]));
        } else {
          if (*out[i] != *in[j]) throw ShapeError("nonzero scalar block cell must sit on a square block");
          grid[i].push_back(opcore::scale(c, opcore::identity(*in[j])));
        }
      }
    }
    return opcore::block_compose(grid);
  }

  static Value add(Value x, Value y, bool subtract) {
    auto* sx = std::get_if<Scalar>(&x);
    auto* sy = std::get_if<Scalar>(&y);
    if (sx && sy) return subtract ? *sx - *sy : *sx + *sy;
    auto lift = [](const Value& v, const SpaceShape& sh) {
      if (auto* s = std::get_if<Scalar>(&v)) return opcore::scale(*s, opcore::identity(sh));
      return std::get<StructuredOperator>(v);
    };
    const StructuredOperator& ref = sx ? std::get<StructuredOperator>(y) : std::get<StructuredOperator>(x);
    if ((sx || sy) && !ref.is_square()) throw ShapeError("scalar added to a non-square operator");
    const StructuredOperator a = lift(x, ref.shape_in), b = lift(y, ref.shape_in);
    if (a.shape_in != b.shape_in || a.shape_out != b.shape_out) {
      throw ShapeError("sum of " + a.shape_out.str() + "<-" + a.shape_in.str() + " and " + b.shape_out.str() + "<-" + b.shape_in.str());
    }
    return subtract ? opcore::subtract(a, b) : opcore::add(a, b);
  }

  static Value mul(Value x, Value y) {
    auto* sx = std::get_if<Scalar>(&x);
    auto* sy = std::get_if<Scalar>(&y);
    if (sx && sy) return *sx * *sy;
    if (sx) return opcore::scale(*sx, std::get<StructuredOperator>(y));
    if (sy) return opcore::scale(*sy, std::get<StructuredOperator>(x));
    const auto& a = std::get<StructuredOperator>(x);
    const auto& b = std::get<StructuredOperator>(y);
    if (a.shape_in != b.shape_out) throw ShapeError("product of " + a.shape_out.str() + "<-" + a.shape_in.str() + " and " + b.shape_out.str() + "<-" + b.shape_in.str());
    return opcore::multiply(a, b);
  }
};

}  // namespace

Evaluated evaluate(const Program& program, std::optional<Mode> override_mode, Mode fallback) {
  Evaluated env;
  env.mode = fallback;
  for (const auto& s : program.statements) {
    if (s.kind != Statement::Kind::Directive) continue;
    if (s.name == "mode") env.mode = s.value == "float" ? Mode::Float : Mode::Exact;
    if (s.name == "tol") env.tol.rank_tol = env.tol.psd_tol = std::stod(s.value);
    if (s.name == "depth") env.depth = std::stoull(s.value);
  }
  if (override_mode) env.mode = *override_mode;
  Evaluator ev(env, env.mode);
  for (const auto& s : program.statements) {
    if (s.kind == Statement::Kind::Space) {
      ev.declare(s.name, s.shape);
      continue;
    }
    if (s.kind != Statement::Kind::Binding) continue;
    try {
      auto v = ev.eval(*s.expr);
      env.operators.erase(s.name);
      env.scalars.erase(s.name);
      if (auto* t = std::get_if<StructuredOperator>(&v)) {
        StructuredOperator op = env.mode == Mode::Float ? to_float(*t) : *t;
        op.canonicalize();
        env.operators[s.name] = std::move(op);
      } else {
        env.scalars[s.name] = std::get<Scalar>(v);
      }
    } catch (const ShapeError& e) {
      std::vector<std::string> trace = e.trace();
      trace.push_back("binding " + s.name);
      throw ShapeError(e.detail(), trace);
    } catch (const opcore::ShapeMismatch& e) {
      throw ShapeError(e.what(), {"binding " + s.name});
    } catch (const exactnum::ShapeError& e) {
      throw ShapeError(e.what(), {"binding " + s.name});
    }
  }
  return env;
}

Scalar parse_scalar(const std::string& text, Mode mode) {
  Evaluated env;
  Evaluator ev(env, mode);
  auto v = ev.eval(*parse_expr(text));
  if (!std::holds_alternative<Scalar>(v)) throw ShapeError("'" + text + "' is not a scalar");
  return std::get<Scalar>(v);
}

FinMatrix parse_matrix(const std::string& text, Mode mode) {
  std::string body = text;
  while (!body.empty() && body.front() == ' ') body.erase(0, 1);
  const ExprPtr e = parse_expr(body.rfind("mat", 0) == 0 ? body : body.front() == '[' ? "mat" + body : "mat[" + body + "]");
  if (e->kind != ExprKind::Mat) throw ShapeError("'" + text + "' is not a matrix");
  FinMatrix m(e->grid.size(), e->grid.front().size());
  for (std::size_t i = 0; i < e->grid.size(); ++i) {
    if (e->grid[i].size() != m.cols()) throw ShapeError("ragged matrix rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = parse_scalar(print_expr(*e->grid[i][j]), mode);
  }
  return m;
}

Program operator_program(const StructuredOperator& t, const std::string& space, const std::string& name) {
  if (!t.is_square()) throw ShapeError("operator_program needs a square operator");
  const SpaceShape sh = t.shape_in;
  std::vector<ExprPtr> terms;
  auto grid_of = [](const FinMatrix& m) {
    std::vector<std::vector<ExprPtr>> g(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) g[i].push_back(Expr::scalar(m(i, j)));
    }
    return g;
  };
  for (const auto& [k, m] : t.symbol.coeffs) {
    ExprPtr base;
    if (k != 0) {
      base = Expr::primitive(k > 0 ? ExprKind::Shift : ExprKind::AdjointShift);
      const std::size_t n = static_cast<std::size_t>(k > 0 ? k : -k);
      if (n > 1) base = Expr::power(base, n);
    }
    const bool unit = m == FinMatrix::identity(sh.p, m.mode());
    if (unit && base) {
      terms.push_back(base);
    } else {
      ExprPtr c = Expr::matrix(ExprKind::Sym, grid_of(m));
      terms.push_back(base ? Expr::binary(ExprKind::Mul, base, c) : c);
    }
  }
  const std::size_t rows = sh.dim(t.kernel.n_out), cols = sh.dim(t.kernel.n_in);
  auto coord_at = [&](std::size_t idx, std::size_t levels) {
    return idx < levels * sh.p ? Coord::strand(idx % sh.p, idx / sh.p) : Coord::tail_at(idx - levels * sh.p);
  };
  FinMatrix tail(sh.q, sh.q);
  bool tail_nonzero = false;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Scalar& v = t.kernel.block(r, c);
      if (v.is_zero()) continue;
      const Coord rc = coord_at(r, t.kernel.n_out), cc = coord_at(c, t.kernel.n_in);
      if (rc.tail && cc.tail) {
        tail(rc.index, cc.index) = v;
        tail_nonzero = true;
        continue;
      }
      ExprPtr r1 = Expr::rank_one({rc, {}}, {cc, {}});
      if (v == Scalar(1)) {
        terms.push_back(r1);
      } else {
        terms.push_back(Expr::binary(ExprKind::Mul, Expr::scalar(v), r1));
      }
    }
  }
  if (tail_nonzero) terms.push_back(Expr::matrix(ExprKind::Mat, grid_of(tail)));
  ExprPtr body;
  for (auto& term : terms) body = body ? Expr::binary(ExprKind::Add, body, term) : term;
  if (!body) body = Expr::binary(ExprKind::Mul, Expr::number(0), Expr::primitive(ExprKind::Identity));

  Program p;
  if (t.mode() == Mode::Float) {
    Statement d;
    d.kind = Statement::Kind::Directive;
    d.name = "mode";
    d.value = "float";
    p.statements.push_back(d);
  }
  Statement s;
  s.kind = Statement::Kind::Space;
  s.name = space;
  s.shape = sh;
  p.statements.push_back(s);
  Statement b;
  b.kind = Statement::Kind::Binding;
  b.name = name;
  b.expr = body;
  p.statements.push_back(b);
  return p;
}

std::string digest(const Program& program) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : print_dsl(program)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace shiftlab::cli
