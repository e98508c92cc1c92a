#include "shiftlab/cli/app.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "shiftlab/cli/dsl.hpp"
#include "shiftlab/cli/report.hpp"
#include "shiftlab/models/fixtures.hpp"

namespace shiftlab::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string file;
  std::string op = "T";
  std::string mode;
  std::string json_path;
  bool timing = false;
};

struct Loaded {
  Program program;
  Evaluated env;
  StructuredOperator op;
};

std::optional<Mode> parse_mode(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  if (s == "exact") return Mode::Exact;
  if (s == "float") return Mode::Float;
  throw UsageError(where + ": mode must be exact or float, got '" + s + "'");
}

Mode env_mode() {
  const char* v = std::getenv("SHIFTLAB_MODE");
  return parse_mode(v ? v : "", "SHIFTLAB_MODE").value_or(Mode::Exact);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw UsageError("cannot write " + path);
  o << text;
}

Loaded load(const Common& c) {
  Loaded l;
  l.program = parse_dsl(read_file(c.file));
  l.env = evaluate(l.program, parse_mode(c.mode, "--mode"), env_mode());
  auto it = l.env.operators.find(c.op);
  if (it == l.env.operators.end()) throw UsageError("no operator named '" + c.op + "' in " + c.file);
  l.op = it->second;
  return l;
}

std::string mode_name(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

/// Shared report fields; each fixture equal to the operator contributes its adaptation note.
Json base_report(const std::string& command, const Loaded& l, const std::string& op_name) {
  Json j;
  j["command"] = command;
  j["operator"] = op_name;
  j["input_digest"] = digest(l.program);
  j["mode"] = mode_name(l.env.mode);
  j["tolerance"] = to_json(l.env.tol);
  Json notes = Json::array();
  Json matched = Json::array();
  for (auto id : models::all_fixtures()) {
    const auto f = models::fixture(id);
    if (f.op.shape_in != l.op.shape_in || f.op.shape_out != l.op.shape_out) continue;
    if (!opcore::equals(f.op, l.op, l.env.tol)) continue;
    matched.push_back(f.name);
    if (!f.adaptation_note.empty()) notes.push_back(f.name + ": " + f.adaptation_note);
  }
  if (l.env.mode == Mode::Float) {
    notes.push_back("float mode: rank and positivity decisions use rank_tol and psd_tol; verdicts are float-derived");
  }
  j["fixtures"] = std::move(matched);
  j["adaptation_notes"] = std::move(notes);
  return j;
}

void emit(const Json& report, const Common& c, std::ostream& out, const std::string& summary) {
  if (c.json_path.empty()) {
    out << render(report);
  } else {
    write_file(c.json_path, render(report));
    out << summary;
  }
}

analysis::ClassifyOptions classify_options(const Evaluated& env) {
  analysis::ClassifyOptions o;
  o.tol = env.tol;
  if (env.depth) o.purity_window = *env.depth;
  return o;
}

using Clock = std::chrono::steady_clock;

void add_timing(Json& j, bool on, Clock::time_point start) {
  if (on) j["timing"] = {{"seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

int cmd_classify(const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  Loaded l = load(c);
  const auto cls = analysis::classify(l.op, classify_options(l.env));
  Json j = base_report("classify", l, c.op);
  j["classification"] = to_json(cls);
  add_timing(j, c.timing, start);
  std::ostringstream s;
  s << c.op << ": contraction " << analysis::to_string(cls.contraction.verdict) << ", hyponormal "
    << analysis::to_string(cls.hyponormal.verdict) << ", finite_isometry " << (cls.finite_isometry ? "true" : "false")
    << ", certificates " << cls.certificates.size() << "\n";
  emit(j, c, out, s.str());
  return Success;
}

int cmd_decompose(const Common& c, bool allow_normal, std::ostream& out) {
  const auto start = Clock::now();
  Loaded l = load(c);
  const auto cls = analysis::classify_core(l.op, classify_options(l.env));
  analysis::DecomposeOptions o;
  o.tol = l.env.tol;
  o.allow_normal_summand = allow_normal;
  const auto d = analysis::decompose_triangular(l.op, cls.purity, o);
  Json j = base_report("decompose", l, c.op);
  j["purity"] = to_json(cls.purity);
  j["decomposition"] = to_json(d);
  bool reassembled = false;
  for (const auto& ch : d.checks) {
    if (ch.name.rfind("reassembly", 0) == 0) reassembled = ch.verdict == analysis::Verdict::Certified;
  }
  j["reassembly_equal"] = reassembled;
  j["triangular_certificate"] = to_json(analysis::certify_triangular(d.s, d.a, d.b, l.env.tol));
  add_timing(j, c.timing, start);
  emit(j, c, out, c.op + ": reassembly " + (reassembled ? "equal" : "not equal") + "\n");
  return Success;
}

struct ModelArgs {
  bool x1 = false;
  bool x2 = false;
  std::size_t n = 1;
  std::size_t m = 0;
  std::string alpha;
  std::string normal;
  std::string dsl_path;
};

models::ModelSpec model_spec(const ModelArgs& a) {
  if (a.x1 == a.x2) throw UsageError("model: exactly one of --x1 and --x2 is required");
  const FinMatrix normal = a.normal.empty() ? FinMatrix() : parse_matrix(a.normal);
  if (a.x1) return models::ModelSpec::x1(a.n, normal);
  std::vector<Scalar> alphas;
  for (const auto& s : split_list(a.alpha)) alphas.push_back(parse_scalar(s));
  if (alphas.size() == 1 && a.m > 1) alphas.assign(a.m, alphas.front());
  return models::ModelSpec::x2(a.n, a.m, alphas, normal);
}

int cmd_model(const ModelArgs& a, const Common& c, std::ostream& out) {
  const auto start = Clock::now();
  const auto spec = model_spec(a);
  spec.validate();
  const auto x = models::build_model(spec);
  Loaded l;
  l.program = operator_program(x);
  const std::string text = print_dsl(l.program);
  // Classify what the emitted text denotes, not the in-memory model.
  l.env = evaluate(parse_dsl(text), parse_mode(c.mode, "--mode"), env_mode());
  l.op = l.env.operators.at("T");
  if (!a.dsl_path.empty()) write_file(a.dsl_path, text);
  Json j = base_report("model", l, "T");
  j["model"] = spec.key();
  j["normal"] = to_json(spec.normal_block);
  j["dsl"] = text;
  j["classification"] = to_json(analysis::classify(l.op, classify_options(l.env)));
  add_timing(j, c.timing, start);
  emit(j, c, out, text);
  return Success;
}

int cmd_verify(const Common& c, const std::string& key, std::size_t depth, const std::string& normal, std::ostream& out) {
  const auto start = Clock::now();
  Loaded l = load(c);
  models::ModelSpec spec;
  try {
    spec = models::ModelSpec::parse_key(key, normal.empty() ? FinMatrix() : parse_matrix(normal));
  } catch (const models::SpecInvalid& e) {
    throw UsageError(std::string("--against-model: ") + e.what());
  }
  spec.validate();
  const auto cls = analysis::classify_core(l.op, classify_options(l.env));
  analysis::DecomposeOptions o;
  o.tol = l.env.tol;
  o.allow_normal_summand = true;
  const auto d = analysis::decompose_triangular(l.op, cls.purity, o);
  const auto u = equivalence::model_unitary(l.op, d, spec, depth, l.env.tol);
  const auto x = models::build_model(spec);
  const auto r = equivalence::verify_intertwine(u, l.op, x, depth, l.env.tol);
  Json j = base_report("verify", l, c.op);
  j["model"] = spec.key();
  j["normal"] = to_json(spec.normal_block);
  j["residual"] = to_json(r);
  j["verified_depth"] = u.verified_depth();
  add_timing(j, c.timing, start);
  emit(j, c, out, std::string("residual ") + (r.zero ? "zero" : "nonzero") + "\n");
  return Success;
}

int cmd_shimorin(const Common& c, std::optional<std::size_t> depth, const std::string& points, std::ostream& out) {
  const auto start = Clock::now();
  Loaded l = load(c);
  equivalence::ShimorinOptions o;
  o.tol = l.env.tol;
  o.depth = depth.value_or(l.env.depth.value_or(32));
  for (const auto& p : split_list(points)) o.samples.push_back(parse_scalar(p, l.env.mode));
  const auto d = equivalence::shimorin_model(l.op, o);
  Json j = base_report("shimorin", l, c.op);
  j["model_data"] = to_json(d);
  j["left_inverse_law"] = opcore::equals(opcore::multiply(d.left_inverse, l.op), opcore::identity(l.op.shape_in), l.env.tol);
  const long v = equivalence::coefficient_shift_violation(l.op, d, l.env.tol);
  j["coefficient_shift_violation"] = v < 0 ? Json(nullptr) : Json(v);
  add_timing(j, c.timing, start);
  emit(j, c, out, std::string("gram ") + (d.gram_psd ? "psd" : "not psd") + "\n");
  return Success;
}

std::string fixture_text(const models::Fixture& f) {
  std::string head = "// " + f.name + ": " + f.description + "\n";
  if (!f.adaptation_note.empty()) head += "// adaptation: " + f.adaptation_note + "\n";
  return head + print_dsl(operator_program(f.op));
}

int cmd_fixtures(bool list, const std::string& id, const std::string& path, std::ostream& out) {
  if (list == !id.empty()) throw UsageError("fixtures: give exactly one of --list and --emit ID");
  if (list) {
    for (auto fid : models::all_fixtures()) {
      const auto f = models::fixture(fid);
      out << f.name << "\t" << f.description << (f.adaptation_note.empty() ? "" : " [adapted]") << "\n";
    }
    return Success;
  }
  const auto fid = models::fixture_from_name(id);
  if (!fid) throw UsageError("unknown fixture '" + id + "'");
  const std::string text = fixture_text(models::fixture(*fid));
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
  return Success;
}

void add_common(CLI::App* sub, Common& c, bool with_file = true) {
  if (with_file) {
    sub->add_option("FILE", c.file, "operator program (.op)")->required();
    sub->add_option("--op", c.op, "binding to analyse")->capture_default_str();
  }
  sub->add_option("--mode", c.mode, "exact or float; overrides #mode and SHIFTLAB_MODE");
  sub->add_option("--json", c.json_path, "write the JSON report here and print a summary");
  sub->add_flag("--timing", c.timing, "include wall-clock timing in the report");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"shiftlab: exact analysis of shift-plus-finite-rank operators"};
  app.name("shiftlab");
  app.require_subcommand(1);

  Common c;
  auto* classify = app.add_subcommand("classify", "classification report");
  add_common(classify, c);

  bool allow_normal = false;
  auto* decompose = app.add_subcommand("decompose", "triangular decomposition [[S, A], [0, B]] with reassembly check");
  add_common(decompose, c);
  decompose->add_flag("--allow-normal-summand", allow_normal, "decompose even when a normal summand was found");

  ModelArgs ma;
  auto* model = app.add_subcommand("model", "emit a model operator as DSL plus its classification");
  add_common(model, c, false);
  model->add_flag("--x1", ma.x1, "model with every alpha equal to 1");
  model->add_flag("--x2", ma.x2, "model with m alphas below 1 (needs --m and --alpha)");
  model->add_option("--n", ma.n)->required();
  model->add_option("--m", ma.m);
  model->add_option("--alpha", ma.alpha, "comma-separated small alphas (one value is repeated m times)");
  model->add_option("--normal", ma.normal, "normal block, e.g. \"1/3\" or \"1/3, 0; 0, 1/2\"");
  model->add_option("--dsl", ma.dsl_path, "also write the DSL text here");

  std::string key, normal;
  std::size_t depth = 64;
  auto* verify = app.add_subcommand("verify", "intertwiner residual against a model");
  add_common(verify, c);
  verify->add_option("--against-model", key, "model key, e.g. x1:2 or x2:1,1,3/4")->required();
  verify->add_option("--depth", depth, "levels of basis labels to verify")->capture_default_str();
  verify->add_option("--normal", normal, "normal block of the model");

  std::optional<std::size_t> sdepth;
  std::string points;
  auto* shimorin = app.add_subcommand("shimorin", "left-inverse model data export");
  add_common(shimorin, c);
  shimorin->add_option("--depth", sdepth, "coefficient depth (default: #depth or 32)");
  shimorin->add_option("--points", points, "comma-separated disc points (default: the eight standard points)");

  bool list = false;
  std::string emit_id, emit_path;
  auto* fixtures = app.add_subcommand("fixtures", "list or emit the shipped example operators");
  fixtures->add_flag("--list", list, "print every fixture id with a description");
  fixtures->add_option("--emit", emit_id, "fixture id to print as DSL");
  fixtures->add_option("--out", emit_path, "write the emitted DSL here");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Success;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return Success;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return BadInput;
  }

  try {
    if (classify->parsed()) return cmd_classify(c, out);
    if (decompose->parsed()) return cmd_decompose(c, allow_normal, out);
    if (model->parsed()) return cmd_model(ma, c, out);
    if (verify->parsed()) return cmd_verify(c, key, depth, normal, out);
    if (shimorin->parsed()) return cmd_shimorin(c, sdepth, points, out);
    if (fixtures->parsed()) return cmd_fixtures(list, emit_id, emit_path, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return BadInput;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return BadInput;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return BadInput;
  } catch (const opcore::ShapeMismatch& e) {
    err << "shape error: " << e.what() << "\n";
    return BadInput;
  } catch (const analysis::NotCertifiedHyponormalContraction& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const analysis::DefectNotFinite& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const analysis::PreconditionFailed& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const equivalence::SpecMismatch& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const equivalence::NotLeftInvertible& e) {
    err << "precondition failed: " << e.what() << " (witness " << e.witness().str() << ")\n";
    return Precondition;
  } catch (const equivalence::KernelNotFinitelySupported& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const models::SpecInvalid& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const models::NotPerfectSquare& e) {
    err << "precondition failed: " << e.what() << "\n";
    return Precondition;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return Internal;
  }
  return BadInput;
}

}  // namespace shiftlab::cli
