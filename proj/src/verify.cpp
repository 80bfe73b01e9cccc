#include "morreymax/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "morreymax/errors.hpp"
#include "morreymax/format.hpp"
#include "morreymax/operators.hpp"

namespace morreymax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t member_seed(std::uint64_t seed, std::size_t index) {
  return splitmix(seed ^ splitmix(static_cast<std::uint64_t>(index) + 1));
}

template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Slot {
  InstanceResult result;
  std::optional<std::string> failure;
};

struct Job {
  std::size_t member;
  double lambda;
};

std::vector<Job> jobs_for(std::size_t members, const std::vector<double>& lambdas) {
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < members; ++m) {
    for (double l : lambdas) jobs.push_back({m, l});
  }
  return jobs;
}

void collect(EquivalenceReport& report, std::vector<Slot>& slots) {
  for (auto& s : slots) {
    if (s.failure) report.failures.push_back({s.result.label, s.result.lambda, *s.failure});
    report.instances.push_back(std::move(s.result));
  }
  report.summarize();
}

InstanceResult skipped(const std::string& label, double lambda, std::string note) {
  InstanceResult r;
  r.label = label;
  r.lambda = lambda;
  r.skipped = true;
  r.note = std::move(note);
  return r;
}

void echo_family(EquivalenceReport& report, const TestFamily& family) {
  std::string lambdas;
  for (double l : family.lambdas) lambdas += (lambdas.empty() ? "" : ";") + format_number(l);
  report.config.emplace_back("seed", std::to_string(family.seed));
  report.config.emplace_back("count", std::to_string(family.count));
  report.config.emplace_back("kind", to_string(family.kind));
  report.config.emplace_back("n", std::to_string(family.n));
  report.config.emplace_back("lambdas", lambdas);
  report.config.emplace_back("steps", std::to_string(family.steps));
}

void echo_cfg(EquivalenceReport& report, const SupSearchConfig& cfg) {
  report.config.emplace_back("points_per_decade", std::to_string(cfg.points_per_decade));
  report.config.emplace_back("refinement_levels", std::to_string(cfg.refinement_levels));
  report.config.emplace_back("bisection_tol", format_number(cfg.bisection_tol));
  report.config.emplace_back("max_refine_delta", format_number(cfg.max_refine_delta));
}

void check_lambdas(const std::vector<double>& lambdas, int n, bool allow_zero) {
  if (lambdas.empty()) throw InvalidInput("lambda list is empty");
  for (double l : lambdas) {
    const bool low_ok = allow_zero ? l >= 0.0 : l > 0.0;
    if (!low_ok || !(l < n)) {
      throw InvalidInput("lambda = " + format_number(l) + " must satisfy " +
                         (allow_zero ? "0 <= " : "0 < ") + "lambda < n = " + std::to_string(n));
    }
  }
}

bool is_compact_step(const PiecewisePowerFn& f) {
  return f.is_piecewise_constant() && f.has_compact_support();
}

double relative_gap(double a, double b) {
  if (a == b) return 0.0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

void spread_check(EquivalenceReport& report, double lambda, double max_spread) {
  double lo = kInf;
  double hi = 0.0;
  for (const auto& r : report.instances) {
    if (r.skipped || r.lambda != lambda) continue;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  if (hi == 0.0) return;
  const double spread = hi / lo;
  report.notes.push_back("lambda=" + format_number(lambda) + ": window [" + format_number(lo) + ", " +
                         format_number(hi) + "], spread " + format_number(spread));
  if (!(spread <= max_spread)) {
    report.failures.push_back({"family", lambda,
                               "ratio spread " + format_number(spread) + " exceeds " +
                                   format_number(max_spread)});
  }
}

}  // namespace

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Steps: return "steps";
    case ProfileKind::PowerLaw: return "power";
    case ProfileKind::Mixed: return "mixed";
    case ProfileKind::IndicatorTrains: return "trains";
  }
  return "steps";
}

ProfileKind parse_profile_kind(const std::string& text) {
  if (text == "steps") return ProfileKind::Steps;
  if (text == "power") return ProfileKind::PowerLaw;
  if (text == "mixed") return ProfileKind::Mixed;
  if (text == "trains") return ProfileKind::IndicatorTrains;
  throw InvalidInput("unknown profile kind '" + text + "' (steps | power | mixed | trains)");
}

PiecewisePowerFn random_step_profile(std::uint64_t seed, int steps) {
  if (steps < 1) throw InvalidInput("random step profile needs at least one step");
  std::mt19937_64 rng(seed);
  std::vector<double> bps;
  bps.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i < steps; ++i) bps.push_back(std::pow(10.0, -2.0 + 4.0 * uniform01(rng)));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  bps.insert(bps.begin(), 0.0);

  const std::size_t m = bps.size() - 1;
  std::vector<double> increments(m);
  for (auto& d : increments) d = 0.05 + 0.95 * uniform01(rng);
  std::vector<PowerPiece> pieces(m);
  double level = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    level += increments[i];
    pieces[i] = PowerPiece{level, 0.0};
  }
  return PiecewisePowerFn(std::move(bps), std::move(pieces));
}

PiecewisePowerFn random_step_function(std::uint64_t seed, int steps) {
  if (steps < 1) throw InvalidInput("random step function needs at least one step");
  std::mt19937_64 rng(seed);
  std::vector<double> bps;
  for (int i = 0; i <= steps; ++i) bps.push_back(-5.0 + 10.0 * uniform01(rng));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<PowerPiece> pieces(bps.size() - 1);
  for (auto& p : pieces) {
    const double u = uniform01(rng);
    p.coeff = u < 0.2 ? 0.0 : uniform01(rng) * 3.0;
  }
  return PiecewisePowerFn(std::move(bps), std::move(pieces)).canonical();
}

std::vector<FamilyMember> generate_family(const TestFamily& family) {
  if (family.n < 1) throw InvalidInput("family dimension must be >= 1");
  std::vector<FamilyMember> out;
  if (family.kind == ProfileKind::IndicatorTrains) {
    for (auto K : family.train_sizes) {
      out.push_back({"train:K=" + std::to_string(K), make_indicator_train(K), false});
    }
    return out;
  }
  if (family.count < 0) throw InvalidInput("family count must be >= 0");
  double beta_cap = static_cast<double>(family.n);
  for (double l : family.lambdas) {
    if (l > 0.0) beta_cap = std::min(beta_cap, l);
  }
  out.reserve(static_cast<std::size_t>(family.count));
  for (int i = 0; i < family.count; ++i) {
    const auto seed = member_seed(family.seed, static_cast<std::size_t>(i));
    const std::string label = to_string(family.kind) + "#" + std::to_string(i);
    if (family.kind == ProfileKind::Steps) {
      out.push_back({label, random_step_profile(seed, family.steps)});
      continue;
    }
    std::mt19937_64 rng(seed);
    const double beta0 = 0.95 * beta_cap * uniform01(rng);
    const double c0 = std::pow(10.0, uniform01(rng) - 0.5);
    if (family.kind == ProfileKind::PowerLaw) {
      const double R = std::pow(10.0, 2.0 * uniform01(rng) - 1.0);
      out.push_back({label, PiecewisePowerFn({0.0, R}, {PowerPiece{c0, beta0}})});
      continue;
    }
    const int m = std::max(2, family.steps / 4);
    std::vector<double> bps;
    for (int k = 0; k < m; ++k) bps.push_back(std::pow(10.0, -2.0 + 4.0 * uniform01(rng)));
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    bps.insert(bps.begin(), 0.0);
    std::vector<PowerPiece> pieces{PowerPiece{c0, beta0}};
    const double beta_max = std::min(2.0, static_cast<double>(family.n));
    for (std::size_t k = 1; k + 1 < bps.size(); ++k) {
      const double left = pieces.back().at(bps[k]);
      const double beta = 0.95 * beta_max * uniform01(rng);
      const double value = left * (0.2 + 0.8 * uniform01(rng));
      pieces.push_back(PowerPiece{value * std::pow(bps[k], beta), beta});
    }
    out.push_back({label, PiecewisePowerFn(std::move(bps), std::move(pieces))});
  }
  return out;
}

void EquivalenceReport::summarize() {
  min_ratio = kInf;
  max_ratio = -kInf;
  witness.clear();
  for (const auto& r : instances) {
    if (r.skipped) continue;
    min_ratio = std::min(min_ratio, r.ratio);
    if (r.ratio > max_ratio) {
      max_ratio = r.ratio;
      witness = r.label + (r.note.empty() ? "" : " (" + r.note + ")");
    }
  }
  if (max_ratio == -kInf) {
    min_ratio = 0.0;
    max_ratio = 0.0;
  }
}

void write_report_csv(std::ostream& out, const EquivalenceReport& report) {
  out << "label,lambda,lhs,rhs,ratio,status,note\n";
  std::map<std::pair<std::string, double>, bool> failed;
  for (const auto& f : report.failures) failed[{f.label, f.lambda}] = true;
  for (const auto& r : report.instances) {
    const char* status = r.skipped ? "skipped" : failed.count({r.label, r.lambda}) ? "fail" : "ok";
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    out << r.label << ',' << format_number(r.lambda) << ',' << format_number(r.lhs) << ','
        << format_number(r.rhs) << ',' << format_number(r.ratio) << ',' << status << ',' << note
        << '\n';
  }
}

nlohmann::json report_summary(const EquivalenceReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["pass"] = report.pass();
  j["min_ratio"] = report.min_ratio;
  j["max_ratio"] = report.max_ratio;
  j["witness"] = report.witness;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back({{"label", f.label}, {"lambda", f.lambda}, {"reason", f.reason}});
  }
  j["notes"] = report.notes;
  j["config"] = nlohmann::json::object();
  for (const auto& [k, v] : report.config) j["config"][k] = v;
  return j;
}

// ---------------------------------------------------------------- lemma1

EquivalenceReport check_lemma1_equivalence(const std::vector<FamilyMember>& members, int n,
                                           const std::vector<double>& lambdas,
                                           const SupSearchConfig& cfg, double max_spread) {
  if (n != 1) throw InvalidInput("lemma1 suite needs n = 1 (the direct norm is one-dimensional)");
  check_lambdas(lambdas, n, false);
  cfg.validate();
  EquivalenceReport report;
  report.suite = "lemma1";
  echo_cfg(report, cfg);
  const auto jobs = jobs_for(members.size(), lambdas);
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& m = members[jobs[i].member];
    const double lambda = jobs[i].lambda;
    auto& s = slots[i];
    if (!m.radial_decreasing) {
      s.result = skipped(m.label, lambda, "not radial decreasing");
      return;
    }
    if (m.fn.is_zero()) {
      s.result = skipped(m.label, lambda, "degenerate: zero profile");
      return;
    }
    if (!is_compact_step(m.fn)) {
      s.result = skipped(m.label, lambda, "even extension needs a compactly supported step profile");
      return;
    }
    const auto params = MorreyParams::make(1.0, lambda, 1);
    const RadialProfile profile(m.fn, 1);
    const auto direct = morrey_norm_direct_1d(m.fn.even_extension(), params, cfg);
    const auto reduced = reduced_functional(profile, params, cfg);
    s.result.label = m.label;
    s.result.lambda = lambda;
    s.result.lhs = direct.value;
    s.result.rhs = reduced.value;
    s.result.ratio = direct.value / reduced.value;
    s.result.note = "witness " + direct.argmax_text();
    if (reduced.divergent) s.failure = "reduced functional diverges";
    else if (!(std::isfinite(s.result.ratio) && s.result.ratio > 0.0)) s.failure = "ratio not finite";
  });
  collect(report, slots);
  for (double l : lambdas) spread_check(report, l, max_spread);
  return report;
}

EquivalenceReport check_lemma1_equivalence(const TestFamily& family, const SupSearchConfig& cfg,
                                           double max_spread) {
  auto report = check_lemma1_equivalence(generate_family(family), family.n, family.lambdas, cfg,
                                         max_spread);
  echo_family(report, family);
  return report;
}

// ------------------------------------------------------------- corollary1

EquivalenceReport check_corollary1(const std::vector<FamilyMember>& members, int n,
                                   const std::vector<double>& lambdas, const SupSearchConfig& cfg,
                                   double tol, double mf_hf_bound) {
  check_lambdas(lambdas, n, false);
  cfg.validate();
  EquivalenceReport report;
  report.suite = "corollary1";
  echo_cfg(report, cfg);
  report.config.emplace_back("tol", format_number(tol));
  const auto jobs = jobs_for(members.size(), lambdas);
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& m = members[jobs[i].member];
    const double lambda = jobs[i].lambda;
    auto& s = slots[i];
    if (!m.radial_decreasing) {
      s.result = skipped(m.label, lambda, "not radial decreasing");
      return;
    }
    const auto params = MorreyParams::make(1.0, lambda, n);
    const RadialProfile profile(m.fn, n);
    s.result.label = m.label;
    s.result.lambda = lambda;
    if (m.fn.is_zero()) {
      s.result.ratio = 1.0;
      s.result.note = "zero profile";
      return;
    }
    const auto via_hardy = reduced_functional(HardyTransform(profile), params, cfg);
    const auto via_log = log_functional(profile, params, cfg);
    if (via_hardy.divergent && via_log.divergent) {
      s.result = skipped(m.label, lambda, "both paths diverge");
      return;
    }
    if (via_hardy.divergent != via_log.divergent) {
      s.failure = "only one path diverges";
      return;
    }
    s.result.lhs = via_hardy.value;
    s.result.rhs = n * via_log.value;
    s.result.ratio = s.result.lhs / s.result.rhs;
    const double gap = relative_gap(s.result.lhs, s.result.rhs);
    s.result.note = "rel gap " + format_number(gap);
    if (!(gap <= tol)) s.failure = "paths differ by " + format_number(gap);

    // Mf against Hf on the even extension, once per member.
    if (n != 1 || lambda != lambdas.front() || !is_compact_step(m.fn)) return;
    const MaximalEvaluator mf(m.fn.even_extension());
    const HardyTransform hardy(profile);
    double lo = kInf;
    double hi = 0.0;
    const auto bps = m.fn.breakpoints();
    std::vector<double> xs;
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) xs.push_back(0.5 * (bps[k] + bps[k + 1]));
    xs.push_back(2.0 * bps.back());
    xs.push_back(10.0 * bps.back());
    for (double x : xs) {
      const double q = mf(x) / hardy(x);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    s.result.note += "; Mf/Hf in [" + format_number(lo) + ", " + format_number(hi) + "]";
    if (lo < 1.0 - 1e-12 || hi > mf_hf_bound * (1.0 + 1e-12)) {
      s.failure = "Mf/Hf outside [1, " + format_number(mf_hf_bound) + "]";
    }
  });
  collect(report, slots);
  return report;
}

EquivalenceReport check_corollary1(const TestFamily& family, const SupSearchConfig& cfg, double tol,
                                   double mf_hf_bound) {
  auto report =
      check_corollary1(generate_family(family), family.n, family.lambdas, cfg, tol, mf_hf_bound);
  echo_family(report, family);
  return report;
}

// ----------------------------------------------------------------- lemma5

EquivalenceReport check_lemma5_inequality(const std::vector<FamilyMember>& members, int n,
                                          const std::vector<double>& lambdas,
                                          const SupSearchConfig& cfg) {
  check_lambdas(lambdas, n, false);
  cfg.validate();
  EquivalenceReport report;
  report.suite = "lemma5";
  echo_cfg(report, cfg);
  std::vector<FamilyMember> all = members;
  const std::size_t sharp_from = all.size();
  for (double l : lambdas) {
    all.push_back({"sharp:rho^-" + format_number(l), PiecewisePowerFn::power_law(1.0, l)});
  }
  std::vector<Job> jobs = jobs_for(sharp_from, lambdas);
  for (std::size_t k = 0; k < lambdas.size(); ++k) jobs.push_back({sharp_from + k, lambdas[k]});

  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& m = all[jobs[i].member];
    const double lambda = jobs[i].lambda;
    const bool sharp = jobs[i].member >= sharp_from;
    auto& s = slots[i];
    if (!m.radial_decreasing) {
      s.result = skipped(m.label, lambda, "not radial decreasing");
      return;
    }
    if (m.fn.is_zero()) {
      s.result = skipped(m.label, lambda, "degenerate: 0 <= 0");
      return;
    }
    const auto params = MorreyParams::make(1.0, lambda, n);
    const RadialProfile profile(m.fn, n);
    const auto reduced = reduced_functional(profile, params, cfg);
    const auto log = log_functional(profile, params, cfg);
    if (reduced.divergent || log.divergent) {
      s.result = skipped(m.label, lambda, "divergent functional");
      if (sharp) s.failure = "sharp profile reported divergent";
      return;
    }
    const double bound = reduced.value / (n - lambda);
    s.result.label = m.label;
    s.result.lambda = lambda;
    s.result.lhs = log.value;
    s.result.rhs = bound;
    s.result.ratio = log.value / reduced.value;
    const double gap = bound - log.value;
    s.result.note = "gap " + format_number(gap);
    if (log.value > bound + 1e-10 * std::max(1.0, bound)) {
      s.failure = "log functional exceeds reduced/(n-lambda) by " + format_number(-gap);
    } else if (sharp && gap > 1e-8 * bound) {
      s.failure = "sharp profile leaves gap " + format_number(gap);
    }
  });
  collect(report, slots);
  return report;
}

EquivalenceReport check_lemma5_inequality(const TestFamily& family, const SupSearchConfig& cfg) {
  auto report = check_lemma5_inequality(generate_family(family), family.n, family.lambdas, cfg);
  echo_family(report, family);
  return report;
}

// ---------------------------------------------------------------- theorem

EquivalenceReport check_theorem_boundedness(const std::vector<FamilyMember>& members, int n,
                                            const std::vector<double>& lambdas,
                                            const SupSearchConfig& cfg) {
  if (n != 1) throw InvalidInput("theorem suite needs n = 1");
  check_lambdas(lambdas, n, true);
  cfg.validate();
  EquivalenceReport report;
  report.suite = "theorem";
  echo_cfg(report, cfg);
  std::vector<double> active;
  for (double l : lambdas) {
    if (l == 0.0) report.notes.push_back("lambda=0 skipped: M is bounded on L_inf");
    else active.push_back(l);
  }
  if (active.empty()) return report;

  // Window of the norm equivalence on the same family.
  std::map<double, double> spread;
  const auto window = check_lemma1_equivalence(members, n, active, cfg, kInf);
  for (double l : active) {
    double lo = kInf;
    double hi = 0.0;
    for (const auto& r : window.instances) {
      if (r.skipped || r.lambda != l) continue;
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    spread[l] = hi > 0.0 ? hi / lo : 1.0;
    report.notes.push_back("lambda=" + format_number(l) + ": bound (1/(n-lambda))*spread = " +
                           format_number(spread[l] / (n - l)) + ", spread " +
                           format_number(spread[l]));
  }

  const auto jobs = jobs_for(members.size(), active);
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& m = members[jobs[i].member];
    const double lambda = jobs[i].lambda;
    auto& s = slots[i];
    if (!m.radial_decreasing) {
      s.result = skipped(m.label, lambda, "not radial decreasing");
      return;
    }
    if (m.fn.is_zero()) {
      s.result = skipped(m.label, lambda, "degenerate: zero profile");
      return;
    }
    const auto params = MorreyParams::make(1.0, lambda, n);
    const RadialProfile profile(m.fn, n);
    const auto reduced = reduced_functional(profile, params, cfg);
    const auto log = log_functional(profile, params, cfg);
    if (reduced.divergent || log.divergent) {
      s.result = skipped(m.label, lambda, "divergent functional");
      return;
    }
    s.result.label = m.label;
    s.result.lambda = lambda;
    s.result.lhs = log.value;
    s.result.rhs = reduced.value;
    s.result.ratio = log.value / reduced.value;
    const double bound = spread.at(lambda) / (n - lambda);
    if (s.result.ratio > bound * (1.0 + 1e-10)) {
      s.failure = "ratio " + format_number(s.result.ratio) + " exceeds composed bound " +
                  format_number(bound);
    }
  });
  collect(report, slots);
  return report;
}

EquivalenceReport check_theorem_boundedness(const TestFamily& family, const SupSearchConfig& cfg) {
  auto report = check_theorem_boundedness(generate_family(family), family.n, family.lambdas, cfg);
  echo_family(report, family);
  return report;
}

// --------------------------------------------------------- counterexample

double train_minorant(std::int64_t k) {
  if (k < 1) throw InvalidInput("minorant index k must be >= 1");
  double sum = 0.0;
  for (std::int64_t j = 2; j < k; ++j) sum += std::log(static_cast<double>(j));
  return sum / static_cast<double>(k);
}

CounterexampleReport run_counterexample(const std::vector<std::int64_t>& Ks, double lambda,
                                        const SupSearchConfig& cfg) {
  cfg.validate();
  if (Ks.empty()) throw InvalidInput("K list is empty");
  for (std::size_t i = 0; i < Ks.size(); ++i) {
    if (Ks[i] < 1) throw InvalidInput("K values must be >= 1");
    if (i > 0 && Ks[i] <= Ks[i - 1]) throw InvalidInput("K values must be increasing");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("counterexample needs 0 < lambda < 1");
  const auto params = MorreyParams::make(1.0, lambda, 1);

  CounterexampleReport report;
  report.lambda = lambda;
  report.rows.resize(Ks.size());
  parallel_for(Ks.size(), [&](std::size_t i) {
    const auto K = Ks[i];
    auto& row = report.rows[i];
    row.K = K;
    const auto train = make_indicator_train(K);
    const auto norm = morrey_norm_direct_1d(train, params, cfg);
    row.upper = norm.value;
    row.upper_a = norm.argmax;
    row.upper_b = norm.argmax_end;
    row.minorant = train_minorant(K);
    row.minorant_over_log = K > 1 ? row.minorant / std::log(static_cast<double>(K)) : 0.0;
    for (std::int64_t k = 1; k <= K; ++k) {
      const double k2 = static_cast<double>(k) * static_cast<double>(k);
      row.lower = std::max(row.lower, std::pow(k2, lambda - 1.0) * lower_bound_train_integral(K, k2));
    }
  });

  const double cap = std::sqrt(2.0) + 1e-6;
  for (const auto& row : report.rows) {
    if (row.upper > cap) {
      report.failures.push_back("K=" + std::to_string(row.K) + ": upper norm " +
                                format_number(row.upper) + " exceeds sqrt(2) + 1e-6");
    }
    if (row.K >= 100 && !(row.minorant_over_log >= 0.5 && row.minorant_over_log <= 1.5)) {
      report.failures.push_back("K=" + std::to_string(row.K) + ": minorant/ln K = " +
                                format_number(row.minorant_over_log) + " outside [0.5, 1.5]");
    }
  }
  // (1/k) Σ_{j<k} ln j must increase from k = 10 up to the largest K.
  const auto top = Ks.back();
  double sum = 0.0;
  double previous = -kInf;
  for (std::int64_t k = 1; k <= top; ++k) {
    const double value = sum / static_cast<double>(k);
    if (k > 10 && !(value > previous)) {
      report.failures.push_back("minorant not increasing at k=" + std::to_string(k));
      break;
    }
    previous = value;
    sum += std::log(static_cast<double>(k));
  }
  return report;
}

void write_counterexample_csv(std::ostream& out, const CounterexampleReport& report) {
  out << "K,upper,upper_a,upper_b,minorant,minorant_over_lnK,lower\n";
  for (const auto& r : report.rows) {
    out << r.K << ',' << format_number(r.upper) << ',' << format_number(r.upper_a) << ','
        << format_number(r.upper_b) << ',' << format_number(r.minorant) << ','
        << format_number(r.minorant_over_log) << ',' << format_number(r.lower) << '\n';
  }
}

nlohmann::json counterexample_summary(const CounterexampleReport& report) {
  nlohmann::json j;
  j["suite"] = "counterexample";
  j["pass"] = report.pass();
  double lo = kInf;
  double hi = 0.0;
  std::string witness;
  for (const auto& r : report.rows) {
    if (r.K < 2) continue;
    lo = std::min(lo, r.minorant_over_log);
    if (r.minorant_over_log > hi) {
      hi = r.minorant_over_log;
      witness = "K=" + std::to_string(r.K);
    }
  }
  j["min_ratio"] = hi > 0.0 ? lo : 0.0;
  j["max_ratio"] = hi;
  j["witness"] = witness;
  j["failures"] = report.failures;
  j["lambda"] = report.lambda;
  return j;
}

// --------------------------------------------------------------- weaktype

WeakTypeGrid default_weak_grid(const PiecewisePowerFn& f) {
  if (!is_compact_step(f) || f.is_zero()) {
    throw InvalidInput("weak-type grid needs a non-zero compactly supported step function");
  }
  WeakTypeGrid grid;
  double peak = 0.0;
  for (const auto& p : f.pieces()) peak = std::max(peak, p.coeff);
  for (double q : {0.99, 0.9, 0.75, 0.5, 0.25, 0.1, 0.05, 0.01}) grid.levels.push_back(q * peak);
  grid.levels.push_back(2.0 * peak);

  const auto bps = f.breakpoints();
  const double lo = bps.front();
  const double hi = bps.back();
  for (int k = 0; k <= 8; ++k) grid.centers.push_back(lo + (hi - lo) * k / 8.0);
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    if (f.segment_piece(i).coeff > 0.0) positive.push_back(i);
  }
  const std::size_t stride = std::max<std::size_t>(1, positive.size() / 64);
  for (std::size_t k = 0; k < positive.size(); k += stride) {
    const auto i = positive[k];
    grid.centers.push_back(0.5 * (bps[i] + bps[i + 1]));
  }
  std::sort(grid.centers.begin(), grid.centers.end());
  grid.centers.erase(std::unique(grid.centers.begin(), grid.centers.end()), grid.centers.end());

  double min_seg = kInf;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) min_seg = std::min(min_seg, bps[i + 1] - bps[i]);
  const double r0 = min_seg / 10.0;
  const double r1 = 2.0 * (hi - lo);
  const int count = std::max(2, static_cast<int>(std::ceil(4.0 * std::log10(r1 / r0))) + 1);
  for (int k = 0; k < count; ++k) {
    grid.radii.push_back(r0 * std::pow(r1 / r0, static_cast<double>(k) / (count - 1)));
  }
  return grid;
}

EquivalenceReport check_weak_type(const std::vector<FamilyMember>& members, double lambda,
                                  const SupSearchConfig& cfg, double max_spread, double stability) {
  cfg.validate();
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("weak-type suite needs 0 < lambda < 1");
  EquivalenceReport report;
  report.suite = "weaktype";
  echo_cfg(report, cfg);
  report.config.emplace_back("lambda", format_number(lambda));
  const auto params = MorreyParams::make(1.0, lambda, 1);
  std::vector<Slot> slots(members.size());
  parallel_for(members.size(), [&](std::size_t i) {
    const auto& m = members[i];
    auto& s = slots[i];
    if (m.fn.is_zero()) {
      s.result = skipped(m.label, lambda, "degenerate: zero function");
      return;
    }
    if (!is_compact_step(m.fn)) {
      s.result = skipped(m.label, lambda, "needs a compactly supported step function");
      s.failure = "precondition violated";
      return;
    }
    const auto grid = default_weak_grid(m.fn);
    const auto base = weak_type_sweep(m.fn, grid, params, cfg, 0);
    const auto finer = weak_type_sweep(m.fn, grid, params, cfg, 1);
    s.result.label = m.label;
    s.result.lambda = lambda;
    s.result.lhs = base.max_ratio;
    s.result.rhs = finer.max_ratio;
    s.result.ratio = finer.max_ratio;
    s.result.note = "t=" + format_number(finer.t) + " x0=" + format_number(finer.x0) +
                    " r=" + format_number(finer.r);
    const double moved = relative_gap(base.max_ratio, finer.max_ratio);
    if (!(moved <= stability)) s.failure = "max ratio moved by " + format_number(moved);
    if (!(finer.max_ratio > 0.0 && std::isfinite(finer.max_ratio))) s.failure = "ratio not positive";
  });
  collect(report, slots);
  spread_check(report, lambda, max_spread);
  return report;
}

// ------------------------------------------------------------- strongtype

namespace {

// Nodes at distances s((1+ε)^j - 1) from both ends of [u, v].
void graded_nodes(double u, double v, double scale, double eps, std::vector<double>& out) {
  const double half = 0.5 * (v - u);
  out.push_back(u);
  std::vector<double> right;
  for (int j = 1;; ++j) {
    const double d = scale * (std::pow(1.0 + eps, j) - 1.0);
    if (d >= half) break;
    out.push_back(u + d);
    right.push_back(v - d);
  }
  out.push_back(u + half);
  out.insert(out.end(), right.rbegin(), right.rend());
}

}  // namespace

StrongTypeBracket maximal_norm_bracket(const PiecewisePowerFn& f, const MorreyParams& params,
                                       const SupSearchConfig& cfg, double max_width) {
  if (!is_compact_step(f) || f.is_zero()) {
    throw InvalidInput("strong-type bracket needs a non-zero compactly supported step function");
  }
  const MaximalEvaluator mf(f);
  const auto bps = f.breakpoints();
  const double span = bps.back() - bps.front();
  const double pad = 4.0 * span;
  std::vector<double> coarse{bps.front() - pad};
  coarse.insert(coarse.end(), bps.begin(), bps.end());
  coarse.push_back(bps.back() + pad);
  double scale = kInf;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) scale = std::min(scale, bps[i + 1] - bps[i]);

  StrongTypeBracket out;
  for (int m = 4; m <= 128; m *= 2) {
    std::vector<double> nodes;
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
      graded_nodes(coarse[i], coarse[i + 1], scale, 1.0 / m, nodes);
    }
    nodes.push_back(coarse.back());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<PowerPiece> upper(nodes.size() - 1);
    std::vector<PowerPiece> lower(nodes.size() - 1);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double u = nodes[k];
      const double v = nodes[k + 1];
      const auto j = mf.cell_of(0.5 * (u + v));
      const double P = mf.plateau(j);
      upper[k].coeff = std::max({P, mf.falling(j, u), mf.rising(j, v)});
      lower[k].coeff = std::max({P, mf.falling(j, v), mf.rising(j, u)});
    }
    const PiecewisePowerFn up_fn = PiecewisePowerFn(nodes, std::move(upper)).canonical();
    const PiecewisePowerFn low_fn = PiecewisePowerFn(nodes, std::move(lower)).canonical();
    out.upper = morrey_norm_direct_1d(up_fn, params, cfg).value;
    out.lower = morrey_norm_direct_1d(low_fn, params, cfg).value;
    out.cells = nodes.size() - 1;
    if (out.width() <= max_width) break;
  }
  return out;
}

EquivalenceReport check_strong_type_p(const std::vector<FamilyMember>& members,
                                      const std::vector<double>& ps, double lambda,
                                      const SupSearchConfig& cfg, double max_spread) {
  cfg.validate();
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("strong-type suite needs 0 < lambda < 1");
  if (ps.empty()) throw InvalidInput("p list is empty");
  for (double p : ps) {
    if (!(p > 1.0)) throw InvalidInput("strong-type evidence needs p > 1");
  }
  EquivalenceReport report;
  report.suite = "strongtype";
  echo_cfg(report, cfg);
  report.config.emplace_back("lambda", format_number(lambda));
  // Jobs pair members with p values; p goes into the label.
  const auto jobs = jobs_for(members.size(), ps);
  std::vector<Slot> slots(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const auto& m = members[jobs[i].member];
    const double p = jobs[i].lambda;
    auto& s = slots[i];
    const std::string label = m.label + "@p=" + format_number(p);
    if (m.fn.is_zero()) {
      s.result = skipped(label, lambda, "degenerate: zero function");
      return;
    }
    if (!is_compact_step(m.fn)) {
      s.result = skipped(label, lambda, "needs a compactly supported step function");
      s.failure = "precondition violated";
      return;
    }
    const auto params = MorreyParams::make(p, lambda, 1);
    const double norm = morrey_norm_direct_1d(m.fn, params, cfg).value;
    const auto bracket = maximal_norm_bracket(m.fn, params, cfg);
    s.result.label = label;
    s.result.lambda = lambda;
    s.result.lhs = bracket.upper;
    s.result.rhs = norm;
    s.result.ratio = bracket.upper / norm;
    s.result.note = "bracket [" + format_number(bracket.lower / norm) + ", " +
                    format_number(s.result.ratio) + "] width " + format_number(bracket.width()) +
                    " cells " + std::to_string(bracket.cells);
    if (bracket.width() > 0.05) s.failure = "bracket too wide: " + format_number(bracket.width());
  });
  collect(report, slots);
  spread_check(report, lambda, max_spread);
  return report;
}

// ------------------------------------------------------------------ decay

EquivalenceReport check_remark_decay(const std::vector<FamilyMember>& members,
                                     std::vector<double> points) {
  EquivalenceReport report;
  report.suite = "decay";
  std::vector<Slot> slots(members.size());
  parallel_for(members.size(), [&](std::size_t i) {
    const auto& m = members[i];
    auto& s = slots[i];
    s.result.label = m.label;
    if (m.fn.is_zero() || !is_compact_step(m.fn)) {
      s.result = skipped(m.label, 0.0, "needs a non-zero compactly supported step function");
      s.failure = "precondition violated";
      return;
    }
    const double total = m.fn.line_integral();
    const auto bps = m.fn.breakpoints();
    const double radius = std::max(std::abs(bps.front()), std::abs(bps.back()));
    std::vector<double> xs = points;
    if (xs.empty()) xs = {1e2 * radius, 1e3 * radius, 1e4 * radius};
    const MaximalEvaluator mf(m.fn);
    double lo = kInf;
    double hi = 0.0;
    std::string samples;
    for (double x : xs) {
      const double v = x * mf(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      samples += (samples.empty() ? "" : " ") + format_number(x) + ":" + format_number(v);
      if (relative_gap(v, total) > 0.02) {
        s.failure = "x*Mf(x) = " + format_number(v) + " at x=" + format_number(x) +
                    " differs from integral " + format_number(total) + " by more than 2%";
      }
    }
    if (hi / lo - 1.0 > 0.02) s.failure = "x*Mf(x) samples disagree by more than 2%";
    s.result.lhs = xs.empty() ? 0.0 : xs.back() * mf(xs.back());
    s.result.rhs = total;
    s.result.ratio = s.result.lhs / total;
    s.result.note = samples;
  });
  collect(report, slots);
  return report;
}

}  // namespace morreymax
