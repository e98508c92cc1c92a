#include <cctype>
#include <set>
#include <sstream>

#include "shiftlab/cli/dsl.hpp"

namespace shiftlab::cli {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

const std::set<std::string>& reserved() {
  static const std::set<std::string> r{"space", "S", "I", "e", "mat", "sym", "block", "adj", "l2", "C"};
  return r;
}

struct Token {
  enum class Kind { Ident, Number, AdjShift, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    const std::size_t start = i;
    if (digit(c) || (c == '.' && i + 1 < src.size() && digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && digit(src[k])) {
          j = k;
          while (j < src.size() && digit(src[j])) ++j;
        }
      }
      if (j + 1 < src.size() && src[j] == '/' && digit(src[j + 1])) {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && src[j] == 'i' && (j + 1 >= src.size() || !ident_char(src[j + 1]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = src.substr(start, j - start);
      advance(j - start);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(start, j - start);
      if (t.text == "S" && j < src.size() && src[j] == '*') {
        // "S*" is the adjoint shift unless an operand starts right after the star ("S*S", "S*(x)", "S*-1").
        const std::size_t k = j + 1;
        const bool factor_follows = k < src.size() && (ident_char(src[k]) || src[k] == '(' || src[k] == '.' || src[k] == '-');
        if (!factor_follows) {
          t.kind = Token::Kind::AdjShift;
          t.text = "S*";
          ++j;
        }
      }
      advance(j - start);
    } else if (std::string("=+-*^()[],;@:#").find(c) != std::string::npos) {
      t.kind = Token::Kind::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(line, col, {"token"}, std::string(1, c));
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

std::string describe(const Token& t) { return t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'"; }

std::optional<mpq_class> number_value(std::string text, bool& imaginary) {
  imaginary = !text.empty() && text.back() == 'i';
  if (imaginary) text.pop_back();
  return exactnum::parse_rational(text);
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (!at_end()) p.statements.push_back(statement());
    return p;
  }

  ExprPtr lone_expr() {
    ExprPtr e = expr();
    if (!at_end()) fail({"end of input"});
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is_punct(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Token::Kind::Punct && peek(k).text == s; }
  bool is_ident(const std::string& s, std::size_t k = 0) const { return peek(k).kind == Token::Kind::Ident && peek(k).text == s; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().line, peek().col, std::move(expected), describe(peek()));
  }
  void expect_punct(const std::string& s) {
    if (!is_punct(s)) fail({"'" + s + "'"});
    ++pos_;
  }
  void expect_ident(const std::string& s) {
    if (!is_ident(s)) fail({"'" + s + "'"});
    ++pos_;
  }
  std::string name() {
    if (peek().kind != Token::Kind::Ident) fail({"identifier"});
    return toks_[pos_++].text;
  }
  std::size_t integer() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Number || t.text.find_first_not_of("0123456789") != std::string::npos) fail({"integer"});
    ++pos_;
    return static_cast<std::size_t>(std::stoull(t.text));
  }

  Statement statement() {
    Statement s;
    if (is_punct("#")) {
      ++pos_;
      s.kind = Statement::Kind::Directive;
      if (!(is_ident("mode") || is_ident("tol") || is_ident("depth"))) fail({"'mode'", "'tol'", "'depth'"});
      s.name = toks_[pos_++].text;
      if (s.name == "mode") {
        if (!(is_ident("exact") || is_ident("float"))) fail({"'exact'", "'float'"});
        s.value = toks_[pos_++].text;
      } else if (s.name == "depth") {
        s.value = std::to_string(integer());
      } else {
        if (peek().kind != Token::Kind::Number || peek().text.back() == 'i') fail({"number"});
        const double v = std::stod(toks_[pos_++].text);
        s.value = exactnum::render_double(v);
      }
      return s;
    }
    if (is_ident("space")) {
      ++pos_;
      s.kind = Statement::Kind::Space;
      s.name = name();
      expect_punct("=");
      if (is_ident("C")) {
        ++pos_;
        expect_punct("(");
        s.shape.q = integer();
        expect_punct(")");
        return s;
      }
      expect_ident("l2");
      expect_punct("(");
      s.shape.p = integer();
      expect_punct(")");
      if (is_punct("(") && is_punct("+", 1)) {
        pos_ += 2;
        expect_punct(")");
        expect_ident("C");
        expect_punct("(");
        s.shape.q = integer();
        expect_punct(")");
      }
      return s;
    }
    if (peek().kind != Token::Kind::Ident) fail({"'space'", "'#'", "identifier"});
    s.kind = Statement::Kind::Binding;
    s.name = name();
    if (reserved().count(s.name)) {
      --pos_;
      fail({"binding name"});
    }
    expect_punct("=");
    s.expr = expr();
    return s;
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (is_punct("+") || is_punct("-")) {
      const ExprKind k = peek().text == "+" ? ExprKind::Add : ExprKind::Sub;
      ++pos_;
      e = Expr::binary(k, e, term());
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = unary();
    while (is_punct("*")) {
      ++pos_;
      e = Expr::binary(ExprKind::Mul, e, unary());
    }
    return e;
  }

  ExprPtr unary() {
    if (is_punct("-")) {
      ++pos_;
      return Expr::unary(ExprKind::Neg, unary());
    }
    ExprPtr e = atom();
    while (is_punct("^")) {
      ++pos_;
      e = Expr::power(e, integer());
    }
    return e;
  }

  std::string qualifier() {
    if (!is_punct("@")) return {};
    ++pos_;
    return name();
  }

  CoordRef coord() {
    CoordRef c;
    if (peek().kind == Token::Kind::Ident && is_punct(":", 1)) {
      c.space = name();
      ++pos_;
    }
    if (peek().kind == Token::Kind::Ident) {
      const std::string t = peek().text;
      if (t.size() < 2 || t[0] != 't' || t.find_first_not_of("0123456789", 1) != std::string::npos) fail({"tail coordinate tK", "strand,level"});
      ++pos_;
      c.coord = Coord::tail_at(std::stoull(t.substr(1)));
      return c;
    }
    const std::size_t s = integer();
    expect_punct(",");
    c.coord = Coord::strand(s, integer());
    return c;
  }

  std::vector<std::vector<ExprPtr>> grid() {
    expect_punct("[");
    std::vector<std::vector<ExprPtr>> rows(1);
    if (is_punct("]")) fail({"entry"});
    while (true) {
      rows.back().push_back(expr());
      if (is_punct(",")) {
        ++pos_;
      } else if (is_punct(";")) {
        ++pos_;
        rows.emplace_back();
      } else if (is_punct("]")) {
        ++pos_;
        break;
      } else {
        fail({"','", "';'", "']'"});
      }
    }
    return rows;
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      bool im = false;
      auto v = number_value(t.text, im);
      if (!v) fail({"number"});
      ++pos_;
      return Expr::number(*v, im);
    }
    if (t.kind == Token::Kind::AdjShift) {
      ++pos_;
      return Expr::primitive(ExprKind::AdjointShift, qualifier());
    }
    if (is_punct("(")) {
      ++pos_;
      ExprPtr e = expr();
      expect_punct(")");
      return e;
    }
    if (t.kind != Token::Kind::Ident) fail({"number", "identifier", "'('", "'S'", "'I'", "'e'", "'mat'", "'sym'", "'block'", "'adj'"});
    if (t.text == "S") {
      ++pos_;
      return Expr::primitive(ExprKind::Shift, qualifier());
    }
    if (t.text == "I") {
      ++pos_;
      return Expr::primitive(ExprKind::Identity, qualifier());
    }
    if (t.text == "e" && is_punct("(", 1)) {
      pos_ += 2;
      CoordRef l = coord();
      expect_punct(")");
      expect_punct("(");
      expect_ident("x");
      expect_punct(")");
      expect_ident("e");
      expect_punct("(");
      CoordRef r = coord();
      expect_punct(")");
      return Expr::rank_one(l, r);
    }
    if (t.text == "mat" || t.text == "sym") {
      const ExprKind k = t.text == "mat" ? ExprKind::Mat : ExprKind::Sym;
      ++pos_;
      auto g = grid();
      return Expr::matrix(k, std::move(g), qualifier());
    }
    if (t.text == "block") {
      ++pos_;
      return Expr::matrix(ExprKind::Block, grid());
    }
    if (t.text == "adj") {
      ++pos_;
      expect_punct("(");
      ExprPtr e = expr();
      expect_punct(")");
      return Expr::unary(ExprKind::Adjoint, e);
    }
    if (reserved().count(t.text)) fail({"operand"});
    ++pos_;
    return Expr::ref(t.text);
  }
};

int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string print_coord(const CoordRef& c) {
  std::string s = c.space.empty() ? "" : c.space + ":";
  if (c.coord.tail) return s + "t" + std::to_string(c.coord.index);
  return s + std::to_string(c.coord.index) + "," + std::to_string(c.coord.level);
}

std::string print_at(const Expr& e, int ctx);

std::string print_grid(const std::vector<std::vector<ExprPtr>>& g) {
  std::vector<std::string> rows;
  for (const auto& r : g) {
    std::vector<std::string> cells;
    for (const auto& c : r) cells.push_back(print_at(*c, 1));
    rows.push_back(join(cells, ", "));
  }
  return "[" + join(rows, "; ") + "]";
}

std::string print_at(const Expr& e, int ctx) {
  const std::string q = e.name.empty() ? "" : "@" + e.name;
  std::string s;
  switch (e.kind) {
    case ExprKind::Number:
      s = exactnum::render_rational(e.value) + (e.imaginary ? "i" : "");
      break;
    case ExprKind::Shift:
      s = "S" + q;
      break;
    case ExprKind::AdjointShift:
      s = "S*" + q;
      break;
    case ExprKind::Identity:
      s = "I" + q;
      break;
    case ExprKind::RankOne:
      s = "e(" + print_coord(e.left) + ")(x)e(" + print_coord(e.right) + ")";
      break;
    case ExprKind::Mat:
      s = "mat" + print_grid(e.grid) + q;
      break;
    case ExprKind::Sym:
      s = "sym" + print_grid(e.grid) + q;
      break;
    case ExprKind::Block:
      s = "block" + print_grid(e.grid);
      break;
    case ExprKind::Ref:
      s = e.name;
      break;
    case ExprKind::Adjoint:
      s = "adj(" + print_at(*e.a, 0) + ")";
      break;
    case ExprKind::Neg:
      s = "-" + print_at(*e.a, 3);
      break;
    case ExprKind::Add:
      s = print_at(*e.a, 1) + " + " + print_at(*e.b, 2);
      break;
    case ExprKind::Sub:
      s = print_at(*e.a, 1) + " - " + print_at(*e.b, 2);
      break;
    case ExprKind::Mul:
      s = print_at(*e.a, 2) + " * " + print_at(*e.b, 3);
      break;
    case ExprKind::Pow:
      s = print_at(*e.a, 5) + "^" + std::to_string(e.exponent);
      break;
  }
  return precedence(e.kind) < ctx ? "(" + s + ")" : s;
}

bool same_ptr(const ExprPtr& x, const ExprPtr& y) {
  if (!x || !y) return !x && !y;
  return *x == *y;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, const std::string& found)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " +
                         join(expected, " or ") + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

ShapeError::ShapeError(const std::string& what, std::vector<std::string> trace)
    : std::runtime_error(trace.empty() ? what : what + " (in " + join(trace, " <- ") + ")"), detail_(what), trace_(std::move(trace)) {}

ExprPtr Expr::number(const mpq_class& v, bool imaginary) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Number;
  e->value = v;
  e->imaginary = imaginary;
  return e;
}

ExprPtr Expr::primitive(ExprKind kind, std::string space) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->name = std::move(space);
  return e;
}

ExprPtr Expr::rank_one(CoordRef left, CoordRef right) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::RankOne;
  e->left = std::move(left);
  e->right = std::move(right);
  return e;
}

ExprPtr Expr::matrix(ExprKind kind, std::vector<std::vector<ExprPtr>> grid, std::string space) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->grid = std::move(grid);
  e->name = std::move(space);
  return e;
}

ExprPtr Expr::ref(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Ref;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::unary(ExprKind kind, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->a = std::move(a);
  return e;
}

ExprPtr Expr::binary(ExprKind kind, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::power(ExprPtr a, std::size_t k) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Pow;
  e->a = std::move(a);
  e->exponent = k;
  return e;
}

ExprPtr Expr::scalar(const Scalar& s) {
  auto shortest = [](double d) {
    auto q = exactnum::parse_rational(exactnum::render_double(d));
    return q ? *q : mpq_class(d);
  };
  const Scalar x = s.is_exact() ? s : Scalar::complex(shortest(s.to_complex().real()), shortest(s.to_complex().imag()));
  auto signed_number = [](const mpq_class& v, bool im) {
    return sgn(v) < 0 ? Expr::unary(ExprKind::Neg, Expr::number(-v, im)) : Expr::number(v, im);
  };
  if (sgn(x.im()) == 0) return signed_number(x.re(), false);
  if (sgn(x.re()) == 0) return signed_number(x.im(), true);
  const ExprKind k = sgn(x.im()) < 0 ? ExprKind::Sub : ExprKind::Add;
  return Expr::binary(k, signed_number(x.re(), false), Expr::number(abs(x.im()), true));
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.kind != y.kind || x.value != y.value || x.imaginary != y.imaginary || x.name != y.name || x.left != y.left ||
      x.right != y.right || x.exponent != y.exponent || x.grid.size() != y.grid.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.grid.size(); ++i) {
    if (x.grid[i].size() != y.grid[i].size()) return false;
    for (std::size_t j = 0; j < x.grid[i].size(); ++j) {
      if (!same_ptr(x.grid[i][j], y.grid[i][j])) return false;
    }
  }
  return same_ptr(x.a, y.a) && same_ptr(x.b, y.b);
}

bool operator==(const Statement& x, const Statement& y) {
  return x.kind == y.kind && x.name == y.name && x.shape == y.shape && x.value == y.value && same_ptr(x.expr, y.expr);
}

Program parse_dsl(const std::string& text) { return Parser(text).program(); }

std::string print_expr(const Expr& e) { return print_at(e, 0); }

std::string print_dsl(const Program& program) {
  std::ostringstream os;
  for (const auto& s : program.statements) {
    switch (s.kind) {
      case Statement::Kind::Directive:
        os << "#" << s.name << " " << s.value << "\n";
        break;
      case Statement::Kind::Space:
        os << "space " << s.name << " = ";
        if (s.shape.p == 0) {
          os << "C(" << s.shape.q << ")\n";
        } else {
          os << "l2(" << s.shape.p << ")";
          if (s.shape.q) os << " (+) C(" << s.shape.q << ")";
          os << "\n";
        }
        break;
      case Statement::Kind::Binding:
        os << s.name << " = " << print_expr(*s.expr) << "\n";
        break;
    }
  }
  return os.str();
}

ExprPtr parse_expr(const std::string& text) { return Parser(text).lone_expr(); }

}  // namespace shiftlab::cli
