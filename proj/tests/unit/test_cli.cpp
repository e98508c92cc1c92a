#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "shiftlab/cli/app.hpp"
#include "shiftlab/cli/dsl.hpp"
#include "shiftlab/cli/report.hpp"
#include "shiftlab/models/fixtures.hpp"

using namespace shiftlab::cli;
namespace fs = std::filesystem;

namespace {

Scalar q(long a, long b = 1) { return Scalar::rational(a, b); }

class RandomAst {
 public:
  explicit RandomAst(std::uint64_t seed) : rng_(seed) {}

  Program program() {
    Program p;
    if (pick(2)) p.statements.push_back(directive("mode", pick(2) ? "exact" : "float"));
    if (pick(3) == 0) p.statements.push_back(directive("depth", std::to_string(1 + pick(40))));
    const std::size_t n = 1 + pick(4);
    for (std::size_t i = 0; i < n; ++i) {
      Statement s;
      if (pick(3) == 0) {
        s.kind = Statement::Kind::Space;
        s.name = name();
        s.shape = SpaceShape{pick(3), pick(3)};
      } else {
        s.kind = Statement::Kind::Binding;
        s.name = name();
        s.expr = expr(3);
      }
      p.statements.push_back(s);
    }
    return p;
  }

 private:
  std::mt19937_64 rng_;

  std::size_t pick(std::size_t n) { return rng_() % n; }

  static Statement directive(const std::string& n, const std::string& v) {
    Statement s;
    s.kind = Statement::Kind::Directive;
    s.name = n;
    s.value = v;
    return s;
  }

  std::string name() {
    static const char* names[] = {"A", "B2", "T", "X_1", "foo", "K", "Hx"};
    return names[pick(7)];
  }

  std::string space() { return pick(2) ? "" : name(); }

  CoordRef coord() {
    CoordRef c;
    c.coord = pick(3) ? Coord::strand(pick(3), pick(4)) : Coord::tail_at(pick(3));
    c.space = pick(3) ? "" : name();
    return c;
  }

  ExprPtr number() {
    mpq_class v(static_cast<long>(pick(9)), static_cast<long>(1 + pick(5)));
    v.canonicalize();
    return Expr::number(v, pick(4) == 0);
  }

  std::vector<std::vector<ExprPtr>> grid(bool scalars, int depth) {
    const std::size_t r = 1 + pick(3), c = 1 + pick(3);
    std::vector<std::vector<ExprPtr>> g(r);
    for (auto& row : g) {
      for (std::size_t j = 0; j < c; ++j) row.push_back(scalars ? (pick(4) ? number() : Expr::unary(ExprKind::Neg, number())) : expr(depth));
    }
    return g;
  }

  ExprPtr expr(int depth) {
    if (depth <= 0) {
      switch (pick(7)) {
        case 0:
          return number();
        case 1:
          return Expr::primitive(ExprKind::Shift, space());
        case 2:
          return Expr::primitive(ExprKind::AdjointShift, space());
        case 3:
          return Expr::primitive(ExprKind::Identity, space());
        case 4:
          return Expr::rank_one(coord(), coord());
        case 5:
          return Expr::matrix(pick(2) ? ExprKind::Mat : ExprKind::Sym, grid(true, 0), space());
        default:
          return Expr::ref(name());
      }
    }
    switch (pick(8)) {
      case 0:
        return Expr::unary(ExprKind::Adjoint, expr(depth - 1));
      case 1:
        return Expr::unary(ExprKind::Neg, expr(depth - 1));
      case 2:
        return Expr::binary(ExprKind::Add, expr(depth - 1), expr(depth - 1));
      case 3:
        return Expr::binary(ExprKind::Sub, expr(depth - 1), expr(depth - 1));
      case 4:
        return Expr::binary(ExprKind::Mul, expr(depth - 1), expr(depth - 1));
      case 5:
        return Expr::power(expr(depth - 1), 1 + pick(3));
      case 6:
        return Expr::matrix(ExprKind::Block, grid(false, depth - 2));
      default:
        return expr(0);
    }
  }
};

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("shiftlab_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StructuredOperator eval_one(const std::string& src, const std::string& name = "T") {
  return evaluate(parse_dsl(src)).operators.at(name);
}

}  // namespace

TEST_CASE("parse a shift binding") {
  const Program p = parse_dsl("space H = l2(1)\nT = S");
  REQUIRE(p.statements.size() == 2);
  CHECK(p.statements[0].kind == Statement::Kind::Space);
  CHECK(p.statements[0].shape == SpaceShape{1, 0});
  CHECK(p.statements[1].name == "T");
  CHECK(*p.statements[1].expr == *Expr::primitive(ExprKind::Shift));
  CHECK(shiftlab::opcore::equals(eval_one("space H = l2(1)\nT = S"), shiftlab::opcore::shift({1, 0})));
}

TEST_CASE("parse errors are positioned") {
  try {
    parse_dsl("space H = l2(1)\nT = S + ");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
    CHECK(!e.expected().empty());
  }
  try {
    parse_dsl("space H = l2(1)\nT = S $ S\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_dsl("space = l2(1)"), ParseError);
  CHECK_THROWS_AS(parse_dsl("space H = l2(1)\nS = I"), ParseError);
  CHECK_THROWS_AS(parse_dsl("#mode fast"), ParseError);
  CHECK_THROWS_AS(parse_dsl("space H = l2(1)\nT = S^"), ParseError);
}

TEST_CASE("shape errors carry the binding trace") {
  try {
    evaluate(parse_dsl("space H = l2(1)\nspace K = l2(2)\nA = S@H\nT = A + S@K\n"));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    REQUIRE(!e.trace().empty());
    CHECK(e.trace().back() == "binding T");
  }
  CHECK_THROWS_AS(evaluate(parse_dsl("space H = l2(1)\nT = U\n")), ShapeError);
  CHECK_THROWS_AS(evaluate(parse_dsl("space H = l2(1) (+) C(1)\nT = mat[1, 2; 3, 4]\n")), ShapeError);
  CHECK_THROWS_AS(evaluate(parse_dsl("T = S\n")), ShapeError);
}

TEST_CASE("evaluation semantics") {
  using namespace shiftlab::opcore;
  const SpaceShape h{1, 0};
  // An operand glued to the star makes it a product; otherwise "S*" is the adjoint shift.
  CHECK(equals(eval_one("space H = l2(1)\nT = S*S"), power(shift(h), 2)));
  CHECK(equals(eval_one("space H = l2(1)\nT = S*-1"), scale(q(-1), shift(h))));
  CHECK(equals(eval_one("space H = l2(1)\nT = S* - 1"), subtract(adjoint_shift(h), identity(h))));
  CHECK_THROWS_AS(parse_dsl("space H = l2(1)\nT = S* S"), ParseError);
  CHECK(equals(eval_one("space H = l2(1)\nT = S* * S"), identity(h)));
  CHECK(equals(eval_one("space H = l2(1)\nT = adj(S)"), adjoint_shift(h)));
  CHECK(equals(eval_one("space H = l2(1)\nT = S + 1/2"), add(shift(h), scale(q(1, 2), identity(h)))));
  CHECK(equals(eval_one("space H = l2(1)\nT = 0.25 * S"), scale(q(1, 4), shift(h))));
  CHECK(equals(eval_one("space H = l2(1)\nT = 1/2i * S"), scale(Scalar(0, mpq_class(1, 2)), shift(h))));
  CHECK(equals(eval_one("space H = l2(1)\nc = 3/4\nT = c * I"), scale(q(3, 4), identity(h))));
  const auto blk = eval_one("space H = l2(1)\nT = block[S, 0; 0, S*]");
  CHECK(equals(blk, block_compose({{shift(h), zero_operator(h, h)}, {zero_operator(h, h), adjoint_shift(h)}})));
  const auto r1 = eval_one("space H = l2(2) (+) C(1)\nT = e(1,0)(x)e(t0)");
  CHECK(equals(r1, basis_rank_one({2, 1}, Coord::strand(1, 0), Coord::tail_at(0))));
  const auto cross = eval_one("space H = l2(1)\nspace K = C(2)\nT = e(H:0,0)(x)e(K:t1)");
  CHECK(cross.shape_out == h);
  CHECK(cross.shape_in == SpaceShape{0, 2});
  const auto sym = eval_one("space H = l2(2)\nT = S * sym[1, 0; 0, 1/2]");
  CHECK(sym.symbol.coeff(1) == FinMatrix::diagonal({q(1), q(1, 2)}));
  const auto fl = evaluate(parse_dsl("#mode float\nspace H = l2(1)\nT = 1/3 * S"));
  CHECK(fl.mode == Mode::Float);
  CHECK(fl.operators.at("T").mode() == Mode::Float);
  CHECK(evaluate(parse_dsl("#mode float\nspace H = l2(1)\nT = S"), Mode::Exact).mode == Mode::Exact);
  CHECK(evaluate(parse_dsl("space H = l2(1)\nT = S"), std::nullopt, Mode::Float).mode == Mode::Float);
  const auto tol = evaluate(parse_dsl("#tol 1e-6\n#depth 12\nspace H = l2(1)\nT = S"));
  CHECK(tol.tol.psd_tol == 1e-6);
  CHECK(tol.depth == std::size_t{12});
}

TEST_CASE("scalar and matrix literals") {
  CHECK(parse_scalar("3/10+2/5i") == Scalar::complex(mpq_class(3, 10), mpq_class(2, 5)));
  CHECK(parse_scalar("-0.7") == q(-7, 10));
  CHECK(parse_scalar("1e-2") == q(1, 100));
  CHECK(parse_matrix("1/3, 0; 0, -1") == FinMatrix::diagonal({q(1, 3), q(-1)}));
  CHECK(parse_matrix("[1/3]") == FinMatrix::diagonal({q(1, 3)}));
  CHECK_THROWS_AS(parse_scalar("S"), ShapeError);
  CHECK_THROWS_AS(parse_matrix("1, 2; 3"), ShapeError);
}

TEST_CASE("parse/print round-trip on fixtures") {
  using namespace shiftlab::models;
  for (auto id : all_fixtures()) {
    const auto f = fixture(id);
    const Program p = operator_program(f.op);
    const std::string text = print_dsl(p);
    CAPTURE(text);
    const Program back = parse_dsl(text);
    CHECK(back == p);
    CHECK(print_dsl(back) == text);
    CHECK(shiftlab::opcore::equals(evaluate(back).operators.at("T"), f.op));
  }
}

TEST_CASE("parse/print round-trip on random programs") {
  RandomAst gen(7);
  for (int i = 0; i < 200; ++i) {
    const Program p = gen.program();
    const std::string text = print_dsl(p);
    CAPTURE(text);
    Program back;
    REQUIRE_NOTHROW(back = parse_dsl(text));
    CHECK(back == p);
    CHECK(print_dsl(back) == text);
  }
}

TEST_CASE("shipped fixture files denote the fixtures") {
  using namespace shiftlab::models;
  for (auto id : all_fixtures()) {
    const auto f = fixture(id);
    const std::string path = std::string(SHIFTLAB_FIXTURE_DIR) + "/" + f.name + ".op";
    CAPTURE(path);
    REQUIRE(fs::exists(path));
    const auto env = evaluate(parse_dsl(read(path)));
    CHECK(shiftlab::opcore::equals(env.operators.at("T"), f.op));
  }
}

TEST_CASE("digest tracks the canonical text") {
  const Program a = parse_dsl("space H = l2(1)\nT = S   +  1/2 // comment\n");
  const Program b = parse_dsl("space H = l2(1)\nT = S + 0.5\n");
  const Program c = parse_dsl("space H = l2(1)\nT = S + 1/3\n");
  CHECK(digest(a) == digest(b));
  CHECK(digest(a) != digest(c));
  CHECK(digest(a).size() == 16);
}

TEST_CASE("json rendering") {
  CHECK(to_json(q(3, 4)) == "3/4");
  CHECK(to_json(q(-2)) == "-2");
  CHECK(to_json(Scalar::from_double(0.1)) == "0.1");
  const Json j = {{"b", 1}, {"a", 2}};
  CHECK(render(j) == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST_CASE("classify command") {
  const auto r = cli({"classify", std::string(SHIFTLAB_FIXTURE_DIR) + "/example-6.4.op", "--op", "T"});
  REQUIRE(r.code == Success);
  const Json j = Json::parse(r.out);
  const Json& c = j["classification"];
  CHECK(c["finite_isometry"] == true);
  CHECK(c["self_commutator"]["alphas"] == Json::array({"1/4", "3/4", "1"}));
  CHECK(c["certificates"][0]["kind"] == "pure_finite_isometry");
  CHECK(c["certificates"][0]["conclusion"].get<std::string>().find("analytic shift") != std::string::npos);
  CHECK(j["fixtures"] == Json::array({"example-6.4"}));
  CHECK(j["mode"] == "exact");
  CHECK(!j.contains("timing"));
  CHECK(cli({"classify", std::string(SHIFTLAB_FIXTURE_DIR) + "/example-6.4.op", "--timing"}).out.find("\"timing\"") !=
        std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const std::string name : {"example-6.1", "example-6.4", "prop-2.2"}) {
    const std::string path = std::string(SHIFTLAB_FIXTURE_DIR) + "/" + name + ".op";
    CHECK(cli({"classify", path}).out == cli({"classify", path}).out);
  }
  const std::string x2 = std::string(SHIFTLAB_FIXTURE_DIR) + "/model-x2-n1-m1.op";
  CHECK(cli({"verify", x2, "--against-model", "x2:1,1,3/4", "--depth", "16"}).out ==
        cli({"verify", x2, "--against-model", "x2:1,1,3/4", "--depth", "16"}).out);
}

TEST_CASE("model command round-trips through the DSL") {
  TempDir tmp;
  const std::string dsl = (tmp.path / "x2.op").string();
  const auto r = cli({"model", "--x2", "--n", "1", "--m", "1", "--alpha", "3/4", "--dsl", dsl});
  REQUIRE(r.code == Success);
  const Json j = Json::parse(r.out);
  CHECK(j["dsl"] == read(dsl));
  const auto c = shiftlab::analysis::classify(evaluate(parse_dsl(read(dsl))).operators.at("T"));
  REQUIRE(c.n_finite);
  CHECK(c.n_finite->n == 1);
  CHECK(c.n_finite->alphas == std::vector<Scalar>{q(3, 4)});
  CHECK(j["classification"]["n_finite"]["alphas"] == Json::array({"3/4"}));

  const auto v = cli({"verify", dsl, "--op", "T", "--against-model", "x2:1,1,3/4", "--depth", "64"});
  REQUIRE(v.code == Success);
  const Json vj = Json::parse(v.out);
  CHECK(vj["residual"]["zero"] == true);
  CHECK(vj["residual"]["max_residual"] == 0.0);
  CHECK(vj["residual"]["labels_checked"] == 128);

  const auto x1 = cli({"model", "--x1", "--n", "2", "--normal", "1/3", "--dsl", (tmp.path / "x1.op").string()});
  REQUIRE(x1.code == Success);
  const auto v1 = cli({"verify", (tmp.path / "x1.op").string(), "--against-model", "x1:2", "--normal", "1/3", "--depth", "16"});
  CHECK(v1.code == Success);
  CHECK(Json::parse(v1.out)["residual"]["zero"] == true);
}

TEST_CASE("decompose and shimorin commands") {
  const std::string path = std::string(SHIFTLAB_FIXTURE_DIR) + "/example-6.4.op";
  const auto d = cli({"decompose", path});
  REQUIRE(d.code == Success);
  const Json dj = Json::parse(d.out);
  CHECK(dj["reassembly_equal"] == true);
  CHECK(dj["triangular_certificate"]["issued"] == true);

  const auto s = cli({"shimorin", path, "--depth", "16", "--points", "0,1/2,3/10+2/5i"});
  REQUIRE(s.code == Success);
  const Json sj = Json::parse(s.out);
  CHECK(sj["left_inverse_law"] == true);
  CHECK(sj["coefficient_shift_violation"].is_null());
  CHECK(sj["model_data"]["gram_psd"] == true);
  CHECK(sj["model_data"]["sample_points"] == Json::array({"0", "1/2", "3/10+2/5i"}));
  CHECK(sj["model_data"]["left_inverse_choice"] == "L = (T*T)^-1 T*");
}

TEST_CASE("fixtures command") {
  const auto l = cli({"fixtures", "--list"});
  CHECK(l.code == Success);
  CHECK(l.out.find("example-6.4") != std::string::npos);
  const auto e = cli({"fixtures", "--emit", "example-6.4"});
  CHECK(e.code == Success);
  CHECK(e.out == read(std::string(SHIFTLAB_FIXTURE_DIR) + "/example-6.4.op"));
  CHECK(cli({"fixtures", "--emit", "example-9.9"}).code == BadInput);
  CHECK(cli({"fixtures"}).code == BadInput);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  const std::string bad = tmp.write("bad.op", "space H = l2(1)\nT = S + \n");
  const std::string shape = tmp.write("shape.op", "space H = l2(1)\nT = S + I@K\n");
  const std::string big = tmp.write("big.op", "space H = l2(1)\nT = 2 * S\n");
  const std::string adj = tmp.write("adj.op", "space H = l2(1)\nT = S*\n");
  const std::string fx = std::string(SHIFTLAB_FIXTURE_DIR);

  CHECK(cli({"classify", bad}).code == BadInput);
  CHECK(cli({"classify", shape}).code == BadInput);
  CHECK(cli({"classify", fx + "/example-6.4.op", "--op", "Nope"}).code == BadInput);
  CHECK(cli({"classify", (tmp.path / "missing.op").string()}).code == BadInput);
  CHECK(cli({}).code == BadInput);
  CHECK(cli({"frobnicate"}).code == BadInput);
  CHECK(cli({"classify", fx + "/example-6.4.op", "--mode", "fast"}).code == BadInput);

  // Verdicts, including Refuted and Unknown, are not errors.
  CHECK(cli({"classify", big}).code == Success);
  CHECK(cli({"classify", adj}).code == Success);

  CHECK(cli({"decompose", big}).code == Precondition);
  CHECK(cli({"decompose", fx + "/example-6.2.op"}).code == Precondition);
  CHECK(cli({"shimorin", adj}).code == Precondition);
  CHECK(cli({"verify", fx + "/model-x2-n1-m1.op", "--against-model", "x1:1", "--depth", "4"}).code == Precondition);
  CHECK(cli({"model", "--x2", "--n", "1", "--m", "1", "--alpha", "1/4"}).code == Precondition);
  CHECK(cli({"model", "--x2", "--n", "1", "--m", "1", "--alpha", "1"}).code == Precondition);
  CHECK(cli({"verify", fx + "/model-x2-n1-m1.op", "--against-model", "y3", "--depth", "4"}).code == BadInput);
  CHECK(cli({"--help"}).code == Success);
}

TEST_CASE("mode precedence: flag, then file, then environment") {
  TempDir tmp;
  const std::string plain = tmp.write("plain.op", "space H = l2(1)\nT = S\n");
  const std::string exact = tmp.write("exact.op", "#mode exact\nspace H = l2(1)\nT = S\n");
  auto mode_of = [](const Run& r) { return Json::parse(r.out)["mode"].get<std::string>(); };
  setenv("SHIFTLAB_MODE", "float", 1);
  CHECK(mode_of(cli({"classify", plain})) == "float");
  CHECK(mode_of(cli({"classify", exact})) == "exact");
  CHECK(mode_of(cli({"classify", exact, "--mode", "float"})) == "float");
  const auto fl = Json::parse(cli({"classify", plain}).out);
  CHECK(!fl["adaptation_notes"].empty());
  setenv("SHIFTLAB_MODE", "sideways", 1);
  CHECK(cli({"classify", plain}).code == BadInput);
  unsetenv("SHIFTLAB_MODE");
  CHECK(mode_of(cli({"classify", plain})) == "exact");
}

TEST_CASE("installed binary honours the exit-code contract") {
  const std::string bin = SHIFTLAB_BINARY;
  const std::string fx = SHIFTLAB_FIXTURE_DIR;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(bin + " classify " + fx + "/example-6.4.op") == 0);
  CHECK(status(bin + " classify " + fx + "/does-not-exist.op") == 2);
  CHECK(status(bin + " decompose " + fx + "/example-6.2.op") == 3);
}
