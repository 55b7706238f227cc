#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chabauty/group.hpp"
#include "chabauty/laurent.hpp"
#include "chabauty/padic_functions.hpp"
#include "chabauty/tables.hpp"
#include "chabauty/tree.hpp"

using namespace chabauty;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  json data = json::object();
  std::ostringstream text;
  int exit_code = kExitPass;
};

struct Globals {
  long p = 5;
  int precision = 32;
  unsigned long long seed = 1;
  std::string format = "text";
  std::string out;
  bool timings = false;
};

Context make_context(const Globals& g) {
  if (!is_prime(g.p)) throw InputError("--p must be a prime, got " + std::to_string(g.p));
  if (g.precision < 1) throw InputError("--precision must be positive");
  return PrimeContext::make(g.p, g.precision);
}

json matrix_json(const PMatrix& m) { return m.to_strings(); }

json subspace_json(const Subspace& s) {
  json basis = json::array();
  for (const auto& m : s.basis_matrices()) basis.push_back(matrix_json(m));
  return basis;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed document");
  }
}

std::string scalar_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError(where + ": entries must be strings or integers");
}

std::vector<std::vector<std::string>> string_grid(const json& g, const std::string& where) {
  if (!g.is_array() || g.empty()) throw InputError(where + ": expected a non-empty array of rows");
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < g.size(); ++i) {
    if (!g[i].is_array() || g[i].size() != g.size())
      throw InputError(where + ": row " + std::to_string(i + 1) + " must have " + std::to_string(g.size()) + " entries");
    std::vector<std::string> row;
    for (size_t j = 0; j < g[i].size(); ++j)
      row.push_back(scalar_text(g[i][j], where + " entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Inline "a,b;c,d" or a file holding a JSON grid (optionally under "matrix").
PMatrix load_matrix(const Context& ctx, const std::string& inline_text, const std::string& path) {
  if (inline_text.empty() == path.empty()) throw InputError("give exactly one of --matrix or a matrix file");
  std::vector<std::vector<std::string>> rows;
  if (!inline_text.empty()) {
    std::stringstream rs(inline_text);
    std::string row;
    while (std::getline(rs, row, ';')) {
      std::vector<std::string> cells;
      std::stringstream cs(row);
      std::string cell;
      while (std::getline(cs, cell, ',')) cells.push_back(cell);
      rows.push_back(std::move(cells));
    }
  } else {
    json doc = parse_json(read_file(path), path);
    if (doc.is_object()) {
      if (!doc.contains("matrix")) throw InputError(path + ": missing field 'matrix'");
      doc = doc["matrix"];
    }
    rows = string_grid(doc, path);
  }
  return PMatrix::parse(ctx, rows);
}

// NAME or NAME:PARAM, e.g. "sl3-Nalpha:2".
LimitFamilySpec spec_from_arg(const std::string& arg) {
  const auto colon = arg.find(':');
  if (colon == std::string::npos) return preset(arg);
  mpq_class param;
  if (param.set_str(arg.substr(colon + 1), 10) != 0) throw InputError("bad parameter in '" + arg + "'");
  param.canonicalize();
  return preset(arg.substr(0, colon), param);
}

void require(bool cond, Output& out) {
  if (!cond) out.exit_code = kExitCheckFailed;
}

// ------------------------------------------------------------------ commands

void cmd_qk(const Globals& g, long k, Output& out) {
  if (!is_prime(g.p)) throw InputError("--p must be a prime");
  const long count = count_power_classes(g.p, k);
  out.data["p"] = g.p;
  out.data["k"] = k;
  out.data["count"] = count;
  out.text << count << "\n";
}

struct LimitArgs {
  std::string file;
  std::string preset_name;
  std::string param;
  long min_digits = 20;
};

void cmd_limit(Globals g, const LimitArgs& a, Output& out) {
  std::optional<Subspace> expected;
  Context ctx;
  AlgebraFamily af;
  std::string label;
  if (a.file.empty() == a.preset_name.empty()) throw InputError("give exactly one of a family file or --preset");
  if (!a.preset_name.empty()) {
    ctx = make_context(g);
    const LimitFamilySpec spec = spec_from_arg(a.param.empty() ? a.preset_name : a.preset_name + ":" + a.param);
    af = family_limit_problem(ctx, spec);
    expected = family_algebra(ctx, spec);
    label = spec.name;
  } else {
    const json doc = parse_json(read_file(a.file), a.file);
    if (!doc.is_object()) throw InputError(a.file + ": expected an object");
    if (doc.contains("prime")) g.p = doc["prime"].get<long>();
    if (doc.contains("precision")) g.precision = doc["precision"].get<int>();
    ctx = make_context(g);
    if (!doc.contains("conjugator")) throw InputError(a.file + ": missing field 'conjugator'");
    const auto grid = string_grid(doc["conjugator"], a.file + " conjugator");
    const int n = static_cast<int>(grid.size());
    if (doc.contains("n") && doc["n"].get<int>() != n) throw InputError(a.file + ": 'n' does not match the conjugator");
    Subspace base = cartan_algebra(ctx, n);
    if (doc.contains("base") && !(doc["base"].is_string() && doc["base"] == "cartan")) {
      if (!doc["base"].is_array()) throw InputError(a.file + ": 'base' must be \"cartan\" or a list of matrices");
      std::vector<PMatrix> mats;
      for (size_t i = 0; i < doc["base"].size(); ++i)
        mats.push_back(PMatrix::parse(ctx, string_grid(doc["base"][i], a.file + " base[" + std::to_string(i) + "]")));
      base = Subspace::span(mats, Coords::TraceZero);
    }
    af = conjugate_family(base, LaurentFamily::parse(ctx, grid));
    label = a.file;
  }

  const Subspace lim = grassmann_limit(af);
  const bool abelian = is_abelian_algebra(lim);
  out.data["family"] = label;
  out.data["p"] = ctx->prime();
  out.data["precision"] = ctx->precision();
  out.data["limit"] = subspace_json(lim);
  json verify = json::object();
  verify["dimension"] = lim.dim();
  verify["base_dimension"] = af.base.dim();
  verify["abelian"] = abelian;
  require(lim.dim() == af.base.dim(), out);
  if (af.base.dim() > 0) {
    try {
      const OracleResult orc = numeric_limit_oracle(af, {6, 7, 8, 9, 10});
      const long agree = std::min<long>(lim.agreement(orc.limit), ctx->precision());
      verify["oracle_digits"] = orc.certified_digits;
      verify["oracle_agreement"] = agree;
      const bool ok = agree >= std::min(a.min_digits, orc.certified_digits);
      verify["oracle_ok"] = ok;
      require(ok, out);
    } catch (const Error& e) {
      if (e.code() != Errc::NotStabilized && e.code() != Errc::NonConvergent) throw;
      verify["oracle_ok"] = false;
      verify["oracle_error"] = e.what();
      out.exit_code = kExitCheckFailed;
    }
  }
  if (af.base.equals(cartan_algebra(ctx, af.base.n()))) require(abelian, out);
  if (expected) {
    verify["matches_family_algebra"] = lim.equals(*expected);
    require(lim.equals(*expected), out);
  }
  out.data["verification"] = verify;

  out.text << "limit of " << label << " (p=" << ctx->prime() << ", dim " << lim.dim() << "):\n";
  for (const auto& m : lim.basis_matrices()) out.text << "  " << m.to_string() << "\n";
  for (const auto& [k, v] : verify.items()) out.text << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

void cmd_tables(const Globals& g, int n, int samples, unsigned threads, Output& out) {
  if (g.precision < 8) throw InputError("tables need --precision >= 8");
  const Context ctx = make_context(g);
  TableOptions opts;
  opts.seed = g.seed;
  opts.samples = samples;
  opts.threads = threads;
  const TableReport rep = verify_table(ctx, n, opts);
  out.data["n"] = n;
  out.data["p"] = rep.p;
  out.data["precision"] = rep.precision;
  json fams = json::array();
  for (size_t i = 0; i < rep.families.size(); ++i) {
    const auto& f = rep.families[i];
    json j;
    j["name"] = f.name;
    j["stem"] = f.stem;
    j["provenance"] = f.provenance;
    if (!f.parameter_label.empty()) j["parameter_class"] = f.parameter_label;
    j["dimension"] = f.dimension;
    j["abelian"] = f.abelian;
    j["closed"] = f.closed;
    j["limit_matches"] = f.limit_matches;
    j["oracle_digits"] = f.oracle_digits;
    j["oracle_agreement"] = f.oracle_agreement;
    j["blocks"] = f.blocks;
    j["flatness_defect"] = f.flatness;
    j["signature"] = f.signature.to_string();
    j["passed"] = f.passed;
    if (!f.error.empty()) j["error"] = f.error;
    if (g.timings) j["seconds"] = rep.seconds[i];
    fams.push_back(j);
    out.text << (f.passed ? "ok   " : "FAIL ") << f.name << "  blocks " << f.blocks << "  oracle " << f.oracle_agreement
             << " digits  flat " << f.flatness;
    if (!f.parameter_label.empty()) out.text << "  class " << f.parameter_label;
    if (!f.error.empty()) out.text << "  error: " << f.error;
    if (g.timings) out.text << "  " << rep.seconds[i] << "s";
    out.text << "\n";
  }
  out.data["families"] = fams;
  out.data["classes"] = rep.classes;
  out.data["expected_classes"] = rep.expected_classes;
  if (rep.upper_bound) out.data["upper_bound"] = rep.upper_bound;
  out.data["formula"] = rep.formula;
  out.data["separated"] = rep.separated;
  out.data["passed"] = rep.passed;
  out.text << rep.classes << " classes verified (" << rep.formula << " = " << rep.expected_classes;
  if (rep.upper_bound) out.text << ", at most " << rep.upper_bound;
  out.text << ")\n";
  require(rep.passed, out);
}

void cmd_classify(const Globals& g, const std::string& inline_m, const std::string& file, Output& out) {
  const Context ctx = make_context(g);
  const PMatrix m = load_matrix(ctx, inline_m, file);
  const Isometry kind = classify_isometry(m);
  json slopes = json::array();
  for (const auto& s : newton_slopes(m).slopes()) slopes.push_back(s.get_str());
  out.data["classification"] = to_string(kind);
  out.data["slopes"] = slopes;
  out.text << to_string(kind) << "\nslopes:";
  for (const auto& s : slopes) out.text << " " << s.get<std::string>();
  out.text << "\n";
}

void cmd_witness(const Globals& g, const std::string& inline_m, const std::string& file, Output& out) {
  const Context ctx = make_context(g);
  const PMatrix a = load_matrix(ctx, inline_m, file);
  try {
    const HyperbolicWitness w = hyperbolic_witness(a);
    const bool member = gr_membership(GrGroup::from_algebra(generated_algebra(a)), w.h);
    out.data["witness_needed"] = true;
    out.data["lambda"] = w.lambda.to_string();
    out.data["exponent"] = w.exponent;
    out.data["diagonal_index"] = w.diagonal_index + 1;
    out.data["h"] = matrix_json(w.h);
    out.data["classification"] = to_string(classify_isometry(w.h));
    out.data["in_group"] = member;
    out.text << "lambda = " << w.lambda.to_string() << "\nh = " << w.h.to_string() << "\n|h_" << w.diagonal_index + 1
             << w.diagonal_index + 1 << "| > 1, " << to_string(classify_isometry(w.h)) << ", in group: "
             << (member ? "yes" : "no") << "\n";
    require(member && classify_isometry(w.h) == Isometry::Hyperbolic, out);
  } catch (const Error& e) {
    if (e.code() != Errc::NoWitnessNeeded) throw;
    out.data["witness_needed"] = false;
    out.data["reason"] = e.what();
    out.text << "no witness needed: " << e.what() << "\n";
  }
}

void cmd_invariant(const Globals& g, const std::string& first, const std::string& second, Output& out) {
  const Context ctx = make_context(g);
  const LimitFamilySpec a = spec_from_arg(first), b = spec_from_arg(second);
  const InvariantResult r = conjugacy_invariant(ctx, a, b);
  out.data["first"] = a.name;
  out.data["second"] = b.name;
  out.data["verdict"] = to_string(r.verdict);
  out.data["reason"] = r.reason;
  if (r.label1) out.data["class_first"] = r.label1->to_string();
  if (r.label2) out.data["class_second"] = r.label2->to_string();
  if (r.conjugator) {
    out.data["conjugator"] = matrix_json(*r.conjugator);
    out.data["conjugator_verified"] = r.conjugator_verified;
  }
  out.text << a.name << " vs " << b.name << ": " << to_string(r.verdict) << " (" << r.reason << ")\n";
  if (r.conjugator)
    out.text << "conjugator " << r.conjugator->to_string() << (r.conjugator_verified ? " verified" : " NOT verified")
             << "\n";
  if (r.conjugator) require(r.conjugator_verified, out);
}

void cmd_tree_length(const Globals& g, const std::string& inline_m, const std::string& file, Output& out) {
  const Context ctx = make_context(g);
  const PMatrix m = load_matrix(ctx, inline_m, file);
  const long slope_len = translation_length(m);
  const long ball_len = translation_length_by_ball(m);
  out.data["translation_length"] = slope_len;
  out.data["ball_oracle"] = ball_len;
  out.data["classification"] = to_string(classify_isometry(m));
  out.text << slope_len << "\nball oracle: " << ball_len << "\n";
  require(slope_len == ball_len, out);
}

void cmd_tree_act(const Globals& g, const std::string& inline_m, const std::string& file, long ray, Output& out) {
  const Context ctx = make_context(g);
  const PMatrix m = load_matrix(ctx, inline_m, file);
  const LatticeVertex v = LatticeVertex::ray_point(ctx, ray);
  const LatticeVertex w = act(m, v);
  out.data["vertex"] = v.to_string();
  out.data["image"] = w.to_string();
  out.data["distance"] = distance(v, w);
  out.data["stabilizes"] = stabilizer_membership(m, v);
  out.text << v.to_string() << " -> " << w.to_string() << "\ndistance " << distance(v, w) << "\n";
}

void cmd_tree_ray(const Globals& g, const std::vector<std::string>& xs, long depth, Output& out) {
  const Context ctx = make_context(g);
  std::vector<PMatrix> us;
  for (const auto& x : xs) {
    PMatrix u = PMatrix::identity(ctx, 2);
    u(0, 1) = PadicNumber::parse(ctx, x);
    us.push_back(u);
  }
  const ParahoricReport rep = parahoric_limit_check(us, depth);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    std::string bits;
    for (bool b : r.fixes) bits += b ? '1' : '0';
    rows.push_back({{"u12", r.element(0, 1).to_string()},
                    {"expected_onset", r.expected_first},
                    {"observed_onset", r.observed_first},
                    {"fixes", bits},
                    {"ok", r.ok}});
  }
  out.data["depth"] = depth;
  out.data["rows"] = rows;
  out.data["violations"] = rep.violations;
  out.data["passed"] = rep.passed;
  out.text << rep.to_string();
  require(rep.passed, out);
}

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::NotStabilized:
    case Errc::NonConvergent:
    case Errc::NotSubalgebra:
    case Errc::NotBlockConstant:
    case Errc::InsufficientSamples:
      return kExitCheckFailed;
    default:
      return kExitInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-adic Chabauty limits of Cartan subgroups"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--p", g.p, "prime")->capture_default_str();
  app.add_option("--precision", g.precision, "p-adic digits carried")->capture_default_str();
  app.add_option("--seed", g.seed, "sampling seed")->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "structured"}))->capture_default_str();
  app.add_option("--out", g.out, "write the report to a file");
  app.add_flag("--timings", g.timings, "include wall-clock timings");

  long k = 2;
  auto* qk = app.add_subcommand("qk", "number of classes of Q_p^* modulo k-th powers");
  qk->add_option("--k", k, "exponent")->required()->check(CLI::Range(2L, 1000L));

  LimitArgs la;
  auto* limit = app.add_subcommand("limit", "Grassmann limit of a conjugated algebra family");
  limit->add_option("file", la.file, "family file");
  limit->add_option("--preset", la.preset_name, "built-in family, e.g. sl3-Nalpha");
  limit->add_option("--param", la.param, "family parameter (rational)");
  limit->add_option("--min-digits", la.min_digits, "required oracle agreement")->capture_default_str();

  int n = 3, samples = 50;
  unsigned threads = 0;
  auto* tables = app.add_subcommand("tables", "verify the SL(n) classification table");
  tables->add_option("--n", n, "matrix size")->required()->check(CLI::IsMember({2, 3, 4}));
  tables->add_option("--samples", samples, "group samples per family")->capture_default_str();
  tables->add_option("--threads", threads, "worker threads, 0 for all cores");

  std::string matrix, mfile;
  auto add_matrix = [&](CLI::App* sub) {
    sub->add_option("--matrix", matrix, "inline matrix 'a,b;c,d'");
    sub->add_option("file", mfile, "matrix file");
  };
  auto* classify = app.add_subcommand("classify", "elliptic or hyperbolic");
  add_matrix(classify);
  auto* witness = app.add_subcommand("witness", "hyperbolic element of <a, Id> for triangular a");
  add_matrix(witness);

  std::string first, second;
  auto* invariant = app.add_subcommand("invariant", "conjugacy of two table families (NAME[:PARAM])");
  invariant->add_option("first", first)->required();
  invariant->add_option("second", second)->required();

  auto* tree = app.add_subcommand("tree", "Bruhat-Tits tree of SL(2, Q_p)");
  tree->require_subcommand(1);
  auto* tlen = tree->add_subcommand("translation-length", "translation length with ball cross-check");
  add_matrix(tlen);
  long ray = 0;
  auto* tact = tree->add_subcommand("act", "image of a ray point");
  add_matrix(tact);
  tact->add_option("--ray", ray, "ray index l of diag(1, p^l)")->capture_default_str();
  std::vector<std::string> xs;
  long depth = 12;
  auto* tray = tree->add_subcommand("ray-check", "eventual fixing of ray points by [[1,x],[0,1]]");
  tray->add_option("--x", xs, "upper-right entries")->required();
  tray->add_option("--depth", depth, "ray depth")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }

  Output out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*qk) cmd_qk(g, k, out);
    else if (*limit) cmd_limit(g, la, out);
    else if (*tables) cmd_tables(g, n, samples, threads, out);
    else if (*classify) cmd_classify(g, matrix, mfile, out);
    else if (*witness) cmd_witness(g, matrix, mfile, out);
    else if (*invariant) cmd_invariant(g, first, second, out);
    else if (*tlen) cmd_tree_length(g, matrix, mfile, out);
    else if (*tact) cmd_tree_act(g, matrix, mfile, ray, out);
    else if (*tray) cmd_tree_ray(g, xs, depth, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::string rendered;
  if (g.format == "structured") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = app.get_subcommands().front()->get_name();
    doc["status"] = out.exit_code == kExitPass ? "pass" : "check_failed";
    doc["result"] = out.data;
    if (g.timings)
      doc["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rendered = doc.dump(2) + "\n";
  } else {
    rendered = out.text.str();
    if (g.timings)
      rendered += "elapsed " + std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + "s\n";
  }
  if (g.out.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream f(g.out);
    if (!f) {
      std::cerr << "error: cannot write '" << g.out << "'\n";
      return kExitInputError;
    }
    f << rendered;
  }
  return out.exit_code;
}
