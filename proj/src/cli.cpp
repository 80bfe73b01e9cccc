#include "morreymax/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "morreymax/errors.hpp"
#include "morreymax/format.hpp"
#include "morreymax/morrey.hpp"
#include "morreymax/operators.hpp"
#include "morreymax/spec_io.hpp"
#include "morreymax/verify.hpp"

namespace morreymax::cli {

namespace {

using nlohmann::json;

struct SearchFlags {
  std::string config_path;
  std::optional<int> ppd;
  std::optional<int> levels;
  std::optional<double> tol;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with SupSearchConfig fields");
    cmd->add_option("--ppd", ppd, "grid points per decade");
    cmd->add_option("--levels", levels, "grid refinement levels");
    cmd->add_option("--tol", tol, "bisection tolerance, in (0, 1e-4]");
  }

  SupSearchConfig resolve() const {
    SupSearchConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidInput("cannot open config '" + config_path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw SpecError(config_path, std::string("malformed JSON: ") + e.what());
      }
      if (!doc.is_object()) throw SpecError(config_path, "config must be a JSON object");
      for (const auto& [key, value] : doc.items()) {
        const std::string path = config_path + ":/" + key;
        if (!value.is_number()) throw SpecError(path, "expected a number");
        if (key == "points_per_decade") cfg.points_per_decade = value.get<int>();
        else if (key == "refinement_levels") cfg.refinement_levels = value.get<int>();
        else if (key == "bisection_tol") cfg.bisection_tol = value.get<double>();
        else if (key == "max_refine_delta") cfg.max_refine_delta = value.get<double>();
        else if (key == "max_grid_anchors") cfg.max_grid_anchors = value.get<int>();
        else throw SpecError(path, "unknown field");
      }
    }
    if (ppd) cfg.points_per_decade = *ppd;
    if (levels) cfg.refinement_levels = *levels;
    if (tol) cfg.bisection_tol = *tol;
    cfg.validate();
    return cfg;
  }
};

class Output {
public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidInput("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InvalidInput(flag + ": cannot parse '" + item + "'");
    if (!std::isfinite(v)) throw InvalidInput(flag + ": values must be finite");
    out.push_back(v);
  }
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<std::int64_t> out;
  for (double v : parse_list(text, flag)) {
    if (v != std::floor(v) || std::abs(v) > 9e15) throw InvalidInput(flag + ": expected integers");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

struct NormArgs {
  std::string fn;
  std::string functional = "direct";
  double lambda = 0.5;
  int n = 1;
  double p = 1.0;
  std::string out;
  std::string format = "csv";
  SearchFlags search;
};

int cmd_norm(const NormArgs& a, std::ostream& out) {
  const auto cfg = a.search.resolve();
  const auto fn = resolve_function(a.fn);
  const auto params = MorreyParams::make(a.p, a.lambda, a.n);
  NormResult result;
  if (a.functional == "direct") {
    result = morrey_norm_direct_1d(fn, params, cfg);
  } else {
    const RadialProfile profile(fn, a.n);
    result = a.functional == "reduced" ? reduced_functional(profile, params, cfg)
                                       : log_functional(profile, params, cfg);
  }
  Output sink(a.out, out);
  if (a.format == "json") {
    json j{{"functional", result.functional},
           {"value", number_json(result.value)},
           {"argmax", result.argmax_text()},
           {"refine_delta", result.refine_delta},
           {"divergent", result.divergent}};
    *sink << j.dump(2) << '\n';
  } else {
    write_norm_csv(*sink, std::span<const NormResult>(&result, 1));
  }
  return kPass;
}

struct MaximalArgs {
  std::string fn;
  std::string points;
  std::string out;
};

int cmd_maximal(const MaximalArgs& a, std::ostream& out) {
  const auto fn = resolve_function(a.fn);
  if (!fn.is_piecewise_constant()) throw InvalidInput("--fn: maximal needs beta = 0 on every piece");
  if (!fn.has_compact_support()) throw InvalidInput("--fn: maximal needs a zero tail");
  const auto xs = parse_list(a.points, "--points");
  std::vector<MaximalEvaluation> rows;
  if (!xs.empty() && !fn.is_zero()) {
    const MaximalEvaluator mf(fn);
    for (double x : xs) rows.push_back(mf.evaluate(x));
  } else {
    for (double x : xs) rows.push_back(maximal_1d(fn, x));
  }
  Output sink(a.out, out);
  write_maximal_csv(*sink, rows);
  return kPass;
}

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 42;
  int count = 100;
  std::string lambdas = "0.5";
  int n = 1;
  std::string kind = "steps";
  int steps = 100;
  std::string K;
  std::string ps = "1.5,2,4";
  std::string points;
  std::string out;
  SearchFlags search;
};

std::filesystem::path report_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return ".";
}

void write_files(const std::filesystem::path& dir, const std::string& suite,
                 const std::function<void(std::ostream&)>& csv, const json& summary) {
  std::filesystem::create_directories(dir);
  std::ofstream c(dir / (suite + ".csv"));
  std::ofstream j(dir / (suite + ".json"));
  if (!c || !j) throw InvalidInput("cannot write reports into '" + dir.string() + "'");
  csv(c);
  j << summary.dump(2) << '\n';
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto cfg = a.search.resolve();
  const auto lambdas = parse_list(a.lambdas, "--lambda");
  if (lambdas.empty()) throw InvalidInput("--lambda: at least one value required");
  const auto dir = report_dir(a.out);

  if (a.suite == "counterexample") {
    const auto Ks = a.K.empty() ? std::vector<std::int64_t>{1, 10, 100, 1000} : parse_int_list(a.K, "--K");
    const auto report = run_counterexample(Ks, lambdas.front(), cfg);
    const auto summary = counterexample_summary(report);
    write_files(dir, a.suite, [&](std::ostream& s) { write_counterexample_csv(s, report); }, summary);
    write_counterexample_csv(out, report);
    for (const auto& f : report.failures) out << "FAIL " << f << '\n';
    return report.pass() ? kPass : kAssertionFailed;
  }

  EquivalenceReport report;
  auto trains = [&](std::vector<std::int64_t> fallback) {
    std::vector<FamilyMember> members{{"block:a=0,b=1", PiecewisePowerFn::block(0.0, 1.0)}};
    for (auto K : a.K.empty() ? fallback : parse_int_list(a.K, "--K")) {
      members.push_back({"train:K=" + std::to_string(K), make_indicator_train(K), false});
    }
    return members;
  };
  if (a.suite == "weaktype") {
    report = check_weak_type(trains({10, 100}), lambdas.front(), cfg);
  } else if (a.suite == "strongtype") {
    report = check_strong_type_p(trains({50}), parse_list(a.ps, "--p"), lambdas.front(), cfg);
  } else if (a.suite == "decay") {
    report = check_remark_decay(trains({2}), parse_list(a.points, "--points"));
  } else {
    TestFamily family;
    family.seed = a.seed;
    family.count = a.count;
    family.kind = parse_profile_kind(a.kind);
    family.n = a.n;
    family.lambdas = lambdas;
    family.steps = a.steps;
    if (!a.K.empty()) family.train_sizes = parse_int_list(a.K, "--K");
    if (a.suite == "lemma1") report = check_lemma1_equivalence(family, cfg);
    else if (a.suite == "corollary1") report = check_corollary1(family, cfg);
    else if (a.suite == "lemma5") report = check_lemma5_inequality(family, cfg);
    else if (a.suite == "theorem") report = check_theorem_boundedness(family, cfg);
    else throw InvalidInput("unknown suite '" + a.suite + "'");
  }
  const auto summary = report_summary(report);
  write_files(dir, a.suite, [&](std::ostream& s) { write_report_csv(s, report); }, summary);
  out << summary.dump(2) << '\n';
  return report.pass() ? kPass : kAssertionFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Maximal operators and Morrey-norm functionals on piecewise power-law functions",
               "morreymax");
  app.require_subcommand(1);

  NormArgs norm;
  auto* norm_cmd = app.add_subcommand("norm", "evaluate a norm functional");
  norm_cmd->add_option("--fn", norm.fn, "builtin name or JSON spec path")->required();
  norm_cmd->add_option("--functional", norm.functional)
      ->check(CLI::IsMember({"direct", "reduced", "log"}));
  norm_cmd->add_option("--lambda", norm.lambda);
  norm_cmd->add_option("--n", norm.n);
  norm_cmd->add_option("--p", norm.p);
  norm_cmd->add_option("--out", norm.out, "output file (default stdout)");
  norm_cmd->add_option("--format", norm.format)->check(CLI::IsMember({"csv", "json"}));
  norm.search.attach(norm_cmd);

  MaximalArgs maximal;
  auto* max_cmd = app.add_subcommand("maximal", "evaluate Mf at a list of points");
  max_cmd->add_option("--fn", maximal.fn, "builtin name or JSON spec path")->required();
  max_cmd->add_option("--points", maximal.points, "comma-separated points");
  max_cmd->add_option("--out", maximal.out, "output file (default stdout)");

  VerifyArgs verify;
  auto* ver_cmd = app.add_subcommand("verify", "run a verification suite");
  ver_cmd->add_option("suite", verify.suite)
      ->required()
      ->check(CLI::IsMember({"lemma1", "corollary1", "lemma5", "theorem", "counterexample",
                             "weaktype", "strongtype", "decay"}));
  ver_cmd->add_option("--seed", verify.seed);
  ver_cmd->add_option("--count", verify.count);
  ver_cmd->add_option("--lambda", verify.lambdas, "comma-separated lambda values");
  ver_cmd->add_option("--n", verify.n);
  ver_cmd->add_option("--kind", verify.kind)->check(CLI::IsMember({"steps", "power", "mixed", "trains"}));
  ver_cmd->add_option("--steps", verify.steps);
  ver_cmd->add_option("--K", verify.K, "comma-separated train sizes");
  ver_cmd->add_option("--p", verify.ps, "comma-separated p values (strongtype)");
  ver_cmd->add_option("--points", verify.points, "comma-separated x values (decay)");
  ver_cmd->add_option("--out", verify.out, "report directory (default $MORREYMAX_OUT_DIR or .)");
  verify.search.attach(ver_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (norm_cmd->parsed()) return cmd_norm(norm, out);
    if (max_cmd->parsed()) return cmd_maximal(maximal, out);
    return cmd_verify(verify, out);
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << '\n';
    return kNonConvergence;
  }
}

}  // namespace morreymax::cli
