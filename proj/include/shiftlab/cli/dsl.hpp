#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftlab/opcore/algebra.hpp"

namespace shiftlab::cli {

using opcore::Coord;
using opcore::FinMatrix;
using opcore::Mode;
using opcore::Scalar;
using opcore::SpaceShape;
using opcore::StructuredOperator;
using opcore::TolerancePolicy;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected, const std::string& found);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

class ShapeError : public std::runtime_error {
 public:
  ShapeError(const std::string& what, std::vector<std::string> trace = {});
  const std::vector<std::string>& trace() const { return trace_; }
  std::string detail() const { return detail_; }

 private:
  std::string detail_;
  std::vector<std::string> trace_;
};

/// A basis coordinate, optionally qualified by a space name ("H:0,1", "K:t0").
struct CoordRef {
  Coord coord;
  std::string space;
  friend bool operator==(const CoordRef&, const CoordRef&) = default;
};

enum class ExprKind { Number, Shift, AdjointShift, Identity, RankOne, Mat, Sym, Block, Ref, Adjoint, Neg, Add, Sub, Mul, Pow };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::Number;
  /// Number: the literal value, times i when imaginary.
  mpq_class value;
  bool imaginary = false;
  /// Ref: the binding; primitives: the "@SPACE" qualifier (may be empty).
  std::string name;
  CoordRef left;
  CoordRef right;
  /// Mat, Sym: scalar entries; Block: operator cells. Row-major.
  std::vector<std::vector<ExprPtr>> grid;
  ExprPtr a;
  ExprPtr b;
  std::size_t exponent = 0;

  static ExprPtr number(const mpq_class& v, bool imaginary = false);
  static ExprPtr primitive(ExprKind kind, std::string space = {});
  static ExprPtr rank_one(CoordRef left, CoordRef right);
  static ExprPtr matrix(ExprKind kind, std::vector<std::vector<ExprPtr>> grid, std::string space = {});
  static ExprPtr ref(std::string name);
  static ExprPtr unary(ExprKind kind, ExprPtr a);
  static ExprPtr binary(ExprKind kind, ExprPtr a, ExprPtr b);
  static ExprPtr power(ExprPtr a, std::size_t k);
  /// Literal for a scalar value: a number, its negation, or a sum of real and imaginary parts.
  static ExprPtr scalar(const Scalar& s);
};

bool operator==(const Expr& x, const Expr& y);

struct Statement {
  enum class Kind { Space, Binding, Directive };
  Kind kind = Kind::Binding;
  /// Space or binding name; for directives one of mode, tol, depth.
  std::string name;
  SpaceShape shape;
  ExprPtr expr;
  /// Directive argument in canonical form.
  std::string value;
};

bool operator==(const Statement& x, const Statement& y);

struct Program {
  std::vector<Statement> statements;
  friend bool operator==(const Program&, const Program&) = default;
};

Program parse_dsl(const std::string& text);
std::string print_dsl(const Program& program);
std::string print_expr(const Expr& e);
/// Parses a single expression; the whole text must be consumed.
ExprPtr parse_expr(const std::string& text);

/// Parses a lone scalar expression such as "1/2", "-0.7" or "3/10+2/5i".
Scalar parse_scalar(const std::string& text, Mode mode = Mode::Exact);
/// Parses "a, b; c, d" (or with surrounding brackets) into a matrix of scalars.
FinMatrix parse_matrix(const std::string& text, Mode mode = Mode::Exact);

struct Evaluated {
  Mode mode = Mode::Exact;
  TolerancePolicy tol;
  std::optional<std::size_t> depth;
  std::map<std::string, SpaceShape> spaces;
  std::map<std::string, StructuredOperator> operators;
  std::map<std::string, Scalar> scalars;
};

/// Evaluates every binding in order. The mode comes from the override, else a #mode directive, else fallback.
Evaluated evaluate(const Program& program, std::optional<Mode> override_mode = std::nullopt, Mode fallback = Mode::Exact);

/// Single-space program "space SPACE = ...; NAME = ..." denoting t.
Program operator_program(const StructuredOperator& t, const std::string& space = "H", const std::string& name = "T");

/// FNV-1a (64-bit, hex) of the canonical program text.
std::string digest(const Program& program);

}  // namespace shiftlab::cli
