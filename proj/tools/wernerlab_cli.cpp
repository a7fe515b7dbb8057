// wernerlab: evaluate partial-trace forms, run property suites, search for
// violations, estimate positivity boundaries and sweep (p, gamma).
//
// Exit codes: 0 success, 1 a verification suite failed, 2 usage / input / I/O
// error, 3 violation found under --expect-positive.

#include "wernerlab/wernerlab.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace wernerlab;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "inf" || s == "infinity") return kOperatorNorm;
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return x;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw UsageError("not an integer list: '" + s + "'");
    }
    if (used != part.size()) throw UsageError("not an integer list: '" + s + "'");
    out.push_back(x);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

/// "a:b:step" (inclusive) or "x,y,z".
std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError("range must be start:stop:step, got '" + s + "'");
    const double a = parse_double(parts[0]), b = parse_double(parts[1]), h = parse_double(parts[2]);
    if (!(h > 0.0) || !(b >= a) || !std::isfinite(b)) throw UsageError("invalid range '" + s + "'");
    const long count = std::lround(std::floor((b - a) / h + 1e-9)) + 1;
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part));
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::uint64_t default_seed(std::uint64_t fallback, std::string& source) {
  if (const char* env = std::getenv("WERNERLAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto s = std::stoull(env, &used);
      if (used == std::string(env).size()) {
        source = "WERNERLAB_SEED";
        return s;
      }
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("WERNERLAB_SEED is not an unsigned integer: '") + env + "'");
  }
  source = "default";
  return fallback;
}

void emit(const json& j, const std::string& format, const std::string& text) {
  if (format == "text")
    std::cout << text;
  else
    std::cout << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct SearchFlags {
  std::string v = "1,1";
  std::string dims = "2,2";
  int rank = 2;
  std::string p = "2";
  double gamma = 2.0;
  std::string field = "complex";
  std::optional<std::uint64_t> seed;
  int restarts = SearchOptions{}.restarts;
  int max_iters = SearchOptions{}.max_iters;
  unsigned threads = 0;
  double fd_step = SearchOptions{}.fd_step;
  std::string format = "json";

  void attach(CLI::App* app, bool exponents = true) {
    app->add_option("--v", v, "sign vector, e.g. 1,1")->capture_default_str();
    app->add_option("--dims", dims, "local dimensions, e.g. 2,2")->capture_default_str();
    app->add_option("--rank", rank, "rank bound r")->capture_default_str();
    if (exponents) {
      app->add_option("--p", p, "Schatten index (>= 1 or inf)")->capture_default_str();
      app->add_option("--gamma", gamma, "norm exponent (>= 1)")->capture_default_str();
    }
    app->add_option("--field", field, "real|complex")->capture_default_str();
    app->add_option("--seed", seed, "master seed (default 1, or WERNERLAB_SEED)");
    app->add_option("--restarts", restarts, "random restarts per search")->capture_default_str();
    app->add_option("--max-iters", max_iters, "descent iterations per restart")->capture_default_str();
    app->add_option("--threads", threads, "worker threads (0: all cores)")->capture_default_str();
    app->add_option("--fd-step", fd_step, "relative central-difference step")->capture_default_str();
    app->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  }

  SearchOptions options(json& settings) const {
    SearchOptions o;
    std::string source = "flag";
    o.seed = seed ? *seed : default_seed(1, source);
    o.restarts = restarts;
    o.max_iters = max_iters;
    o.threads = threads;
    o.fd_step = fd_step;
    o.field = parse_field(field);
    settings = {{"seed", o.seed},
                {"seed_source", source},
                {"restarts", o.restarts},
                {"max_iters", o.max_iters},
                {"threads", o.threads},
                {"fd_step", o.fd_step},
                {"field", field},
                {"violation_threshold", kViolationThreshold}};
    return o;
  }
};

// ---------------------------------------------------------------------------

struct EvalFlags {
  std::string input;
  std::string builder;
  std::string dims;
  std::string v;
  std::string p = "2";
  double gamma = 2.0;
  double alpha = 0.0;
  int n = 2;
  int d = 2;
  double eps = 0.1;
  double werner_alpha = 0.0;
  int rank = 2;
  std::optional<std::uint64_t> seed;
  std::string field = "complex";
  std::string format = "json";
  std::string save;
};

MultipartiteMatrix build_matrix(const EvalFlags& f, json& source) {
  if (!f.input.empty()) {
    source = {{"input", f.input}};
    return load_matrix(f.input);
  }
  const std::string& b = f.builder;
  source = {{"builder", b}};
  if (b == "identity") {
    const Dims dims = f.dims.empty() ? Dims{f.d, f.d} : parse_int_list(f.dims);
    source["dims"] = dims;
    return MultipartiteMatrix::identity(dims);
  }
  if (b == "flip") {
    source["d"] = f.d;
    return flip(f.d);
  }
  if (b == "werner") {
    source["d"] = f.d;
    source["werner_alpha"] = f.werner_alpha;
    return werner_state({f.d, f.werner_alpha});
  }
  if (b == "appendix") {
    source["n"] = f.n;
    source["d"] = f.d;
    return appendix_matrix(f.n, f.d);
  }
  if (b == "structured") {
    const Dims dims = f.dims.empty() ? Dims{f.d, f.d} : parse_int_list(f.dims);
    std::string seed_source = "flag";
    const auto seed = f.seed ? *f.seed : default_seed(1, seed_source);
    source["dims"] = dims;
    source["rank"] = f.rank;
    source["seed"] = seed;
    source["seed_source"] = seed_source;
    source["field"] = f.field;
    return random_matrix(MatrixKind::structured_rank1_plus_normal, dims, f.rank, parse_field(f.field), seed);
  }
  if (b == "rank1-counterexample") {
    // |e0><e0| (x) |e0><e1|
    const auto left = MultipartiteMatrix::outer({2}, basis_vector(2, 0), basis_vector(2, 0));
    const auto right = MultipartiteMatrix::outer({2}, basis_vector(2, 0), basis_vector(2, 1));
    return kron(left, right);
  }
  throw UsageError("unknown builder '" + b + "'");
}

int cmd_eval(const EvalFlags& f) {
  if (f.input.empty() == f.builder.empty()) throw UsageError("eval needs exactly one of --input or --builder");
  json source;
  const auto c = build_matrix(f, source);
  FormSpec spec;
  spec.v = f.v.empty() ? std::vector<int>(c.subsystems(), 1) : parse_int_list(f.v);
  spec.p = parse_double(f.p);
  spec.gamma = f.gamma;
  spec.alpha = f.alpha;
  const auto terms = q_form_breakdown(spec, c);
  double q = 0.0;
  json breakdown = json::array();
  std::ostringstream text;
  for (const auto& t : terms) {
    const double contrib = t.contribution(spec.gamma);
    q += contrib;
    breakdown.push_back({{"traced", t.traced.to_string()},
                         {"members", t.traced.members()},
                         {"norm", t.norm},
                         {"coefficient", t.coefficient},
                         {"contribution", contrib}});
    text << "  J=" << t.traced.to_string() << " norm=" << format_number(t.norm)
         << " coefficient=" << format_number(t.coefficient) << " contribution=" << format_number(contrib) << '\n';
  }
  if (!f.save.empty()) save_matrix(c, f.save);
  json out{{"command", "eval"}, {"source", source}, {"dims", c.dims()}, {"spec", to_json(spec)},
           {"q", q},            {"breakdown", breakdown}};
  if (!f.save.empty()) out["saved"] = f.save;
  emit(out, f.format, "q = " + format_number(q) + "\n" + text.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyFlags {
  std::string suite = "all";
  int trials = 0;
  std::optional<std::uint64_t> seed;
  int n_max = SuiteOptions{}.n_max;
  std::string format = "json";
};

int cmd_verify(const VerifyFlags& f) {
  SuiteOptions opts;
  std::string source = "flag";
  opts.seed = f.seed ? *f.seed : default_seed(SuiteOptions{}.seed, source);
  opts.trials = f.trials;
  opts.n_max = f.n_max;
  if (f.trials < 0) throw UsageError("--trials must be non-negative");
  const auto results = run_suites(f.suite, opts);
  bool ok = true;
  json suites = json::array();
  std::ostringstream text;
  for (const auto& r : results) {
    ok = ok && r.passed();
    json checks = json::array();
    text << (r.passed() ? "PASS " : "FAIL ") << r.suite << '\n';
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed()},
                        {"trials", c.trials},
                        {"failures", c.failures},
                        {"worst_margin", c.worst},
                        {"floor", c.floor}});
      text << "  " << (c.passed() ? "ok   " : "FAIL ") << c.name << "  trials=" << c.trials
           << " failures=" << c.failures << " worst=" << format_number(c.worst) << '\n';
    }
    suites.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"failures", r.failures()}, {"checks", checks}});
  }
  json out{{"command", "verify"},
           {"suite", f.suite},
           {"passed", ok},
           {"settings",
            {{"seed", opts.seed}, {"seed_source", source}, {"trials", f.trials == 0 ? json("suite default") : json(f.trials)},
             {"n_max", opts.n_max}}},
           {"suites", suites}};
  emit(out, f.format, text.str());
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SearchCmd {
  SearchFlags s;
  double alpha = -0.55;
  std::string out;
  bool expect_positive = false;
};

int cmd_search(const SearchCmd& c) {
  json settings;
  const auto opt = c.s.options(settings);
  const FormSpec spec{parse_int_list(c.s.v), parse_double(c.s.p), c.s.gamma, c.alpha};
  const auto rep = minimize_form(spec, parse_int_list(c.s.dims), c.s.rank, opt);
  json j = to_json(rep);
  j["command"] = "search";
  j["settings"] = settings;
  const bool violation = rep.best_value < kViolationThreshold;
  j["violation_found"] = violation;
  if (!c.out.empty()) write_json_file(j, c.out);
  std::ostringstream text;
  text << "best_value = " << format_number(rep.best_value) << "\nviolation_found = " << (violation ? "true" : "false")
       << "\nbest_restart = " << rep.best_restart << '\n';
  emit(j, c.s.format, text.str());
  return (c.expect_positive && violation) ? 3 : 0;
}

struct AlphaCmd {
  SearchFlags s;
  double tol = 0.01;
};

int cmd_alpha(const AlphaCmd& c) {
  json settings;
  const auto opt = c.s.options(settings);
  settings["tol"] = c.tol;
  const auto est = alpha_opt_estimate(parse_int_list(c.s.v), parse_double(c.s.p), c.s.gamma, c.s.rank,
                                      parse_int_list(c.s.dims), c.tol, opt);
  json j = to_json(est);
  j["command"] = "alpha";
  j["v"] = parse_int_list(c.s.v);
  j["dims"] = parse_int_list(c.s.dims);
  j["rank"] = c.s.rank;
  j["p"] = c.s.p;
  j["gamma"] = c.s.gamma;
  j["settings"] = settings;
  std::ostringstream text;
  text << "estimate = " << format_number(est.estimate) << "\nproven_lower = "
       << (est.proven_lower ? format_number(*est.proven_lower) : std::string("none")) << '\n';
  emit(j, c.s.format, text.str());
  return 0;
}

struct SweepCmd {
  SearchFlags s;
  std::string p_grid = "1:4:0.5";
  std::string gamma_grid = "1:4:0.5";
  double tol = 0.01;
  std::string out;
};

int cmd_sweep(const SweepCmd& c) {
  json settings;
  const auto opt = c.s.options(settings);
  settings["tol"] = c.tol;
  settings["p"] = c.p_grid;
  settings["gamma"] = c.gamma_grid;
  const auto rows = sweep_grid(parse_int_list(c.s.v), parse_grid(c.p_grid), parse_grid(c.gamma_grid), c.s.rank,
                               parse_int_list(c.s.dims), c.tol, opt);
  if (c.out.empty()) {
    std::cout << format_sweep_csv(rows);
  } else {
    write_sweep_csv(rows, c.out);
    settings["out"] = c.out;
  }
  settings["command"] = "sweep";
  settings["rows"] = rows.size();
  std::cerr << settings.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial-trace quadratic forms and Werner-state distillability"};
  app.require_subcommand(1);

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "evaluate q_v on a matrix");
  eval->add_option("--input", ef.input, "matrix JSON file");
  eval->add_option("--builder", ef.builder, "identity|flip|werner|appendix|structured|rank1-counterexample");
  eval->add_option("--dims", ef.dims, "local dimensions (identity, structured)");
  eval->add_option("--v", ef.v, "sign vector (default all ones)");
  eval->add_option("--p", ef.p, "Schatten index (>= 1 or inf)")->capture_default_str();
  eval->add_option("--gamma", ef.gamma, "norm exponent")->capture_default_str();
  eval->add_option("--alpha", ef.alpha, "form parameter")->capture_default_str();
  eval->add_option("--n", ef.n, "copies (appendix)")->capture_default_str();
  eval->add_option("--d", ef.d, "local dimension")->capture_default_str();
  eval->add_option("--eps", ef.eps, "appendix offset; alpha defaults to -1/2-eps")->capture_default_str();
  eval->add_option("--werner-alpha", ef.werner_alpha, "Werner parameter (werner)")->capture_default_str();
  eval->add_option("--rank", ef.rank, "rank (structured)")->capture_default_str();
  eval->add_option("--seed", ef.seed, "seed (structured)");
  eval->add_option("--field", ef.field, "real|complex (structured)")->capture_default_str();
  eval->add_option("--format", ef.format, "json|text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  eval->add_option("--save", ef.save, "write the matrix as JSON");

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "run seeded property suites");
  verify->add_option("--suite", vf.suite, "suite name or all")->capture_default_str();
  verify->add_option("--trials", vf.trials, "trials per suite (0: suite default)")->capture_default_str();
  verify->add_option("--seed", vf.seed, "seed (default 7, or WERNERLAB_SEED)");
  verify->add_option("--n-max", vf.n_max, "largest even n for lemma-a1")->capture_default_str();
  verify->add_option("--format", vf.format, "json|text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  verify->add_flag_callback("--list", [] {
    for (const auto& n : suite_names()) std::cout << n << '\n';
    throw CLI::Success();
  }, "list suite names");

  SearchCmd sc;
  auto* search = app.add_subcommand("search", "minimise q_v over rank-r matrices");
  sc.s.attach(search);
  search->add_option("--alpha", sc.alpha, "form parameter")->capture_default_str();
  search->add_option("--out", sc.out, "also write the JSON report here");
  search->add_flag("--expect-positive", sc.expect_positive, "exit 3 if a violation is found");

  AlphaCmd ac;
  auto* alpha = app.add_subcommand("alpha", "bisect for the positivity boundary in alpha");
  ac.s.attach(alpha);
  alpha->add_option("--tol", ac.tol, "bisection tolerance")->capture_default_str();

  SweepCmd swc;
  swc.s.field = "real";
  auto* sweep = app.add_subcommand("sweep", "alpha estimates over a (p, gamma) grid, as CSV");
  swc.s.attach(sweep, false);
  sweep->add_option("--p", swc.p_grid, "p grid, start:stop:step or a list")->capture_default_str();
  sweep->add_option("--gamma", swc.gamma_grid, "gamma grid")->capture_default_str();
  sweep->add_option("--tol", swc.tol, "bisection tolerance")->capture_default_str();
  sweep->add_option("--out", swc.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (eval->parsed()) {
      if (ef.builder == "appendix" && eval->count("--alpha") == 0) ef.alpha = -0.5 - ef.eps;
      return cmd_eval(ef);
    }
    if (verify->parsed()) return cmd_verify(vf);
    if (search->parsed()) return cmd_search(sc);
    if (alpha->parsed()) return cmd_alpha(ac);
    if (sweep->parsed()) return cmd_sweep(swc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
