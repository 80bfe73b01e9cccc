#pragma once

/**
 * @file verify.hpp
 * @brief Verification suites over generated test families.
 *
 * Each suite evaluates its instances (possibly concurrently, results are
 * stored by index) and returns an EquivalenceReport. Reports are
 * deterministic in (seed, config) and independent of the thread count.
 *
 * Random decreasing step profiles: `steps` breakpoints drawn log-uniformly
 * from [1e-2, 1e2], values formed as reversed cumulative sums of positive
 * uniform increments, so the profile steps down at every breakpoint and is
 * zero beyond the last one.
 */

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "morreymax/morrey.hpp"
#include "morreymax/profiles.hpp"

namespace morreymax {

enum class ProfileKind { Steps, PowerLaw, Mixed, IndicatorTrains };

std::string to_string(ProfileKind kind);
/// "steps" | "power" | "mixed" | "trains".
ProfileKind parse_profile_kind(const std::string& text);

struct TestFamily {
  std::uint64_t seed = 42;
  int count = 100;
  ProfileKind kind = ProfileKind::Steps;
  int n = 1;
  std::vector<double> lambdas{0.5};
  /// Breakpoints per random step profile.
  int steps = 100;
  /// Train sizes for ProfileKind::IndicatorTrains (count is ignored).
  std::vector<std::int64_t> train_sizes{1, 2, 10};
};

struct FamilyMember {
  std::string label;
  PiecewisePowerFn fn;
  /// False for indicator trains; radial suites skip those.
  bool radial_decreasing = true;
};

/// Random decreasing step profile, seeded per instance.
PiecewisePowerFn random_step_profile(std::uint64_t seed, int steps);
/// Random step function on ℝ with compact support (not monotone), for the
/// one-dimensional operator checks.
PiecewisePowerFn random_step_function(std::uint64_t seed, int steps);

/// Power-law members are c·ρ^{-β} on (0, R) with β below min(lambdas); mixed
/// members start with such a piece and continue with decreasing power
/// pieces of arbitrary β < n.
std::vector<FamilyMember> generate_family(const TestFamily& family);

struct InstanceResult {
  std::string label;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool skipped = false;
  std::string note;
};

struct Failure {
  std::string label;
  double lambda = 0.0;
  std::string reason;
};

struct EquivalenceReport {
  std::string suite;
  std::vector<InstanceResult> instances;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::vector<Failure> failures;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> notes;
  /// Label of the instance attaining max_ratio, with suite-specific detail.
  std::string witness;

  bool pass() const noexcept { return failures.empty(); }
  /// Recomputes min/max over non-skipped instances.
  void summarize();
};

/// CSV "label,lambda,lhs,rhs,ratio,status,note".
void write_report_csv(std::ostream& out, const EquivalenceReport& report);
/// {suite, pass, min_ratio, max_ratio, witness}, plus failures and notes.
nlohmann::json report_summary(const EquivalenceReport& report);

// The radial suites come in two forms: over a generated TestFamily (the
// family is echoed into the report config) and over an explicit member list.

/// direct norm of the even extension over reduced_functional, per λ.
/// Fails when max/min over the family exceeds `max_spread`.
EquivalenceReport check_lemma1_equivalence(const TestFamily& family, const SupSearchConfig& cfg = {},
                                           double max_spread = 4.0);
EquivalenceReport check_lemma1_equivalence(const std::vector<FamilyMember>& members, int n,
                                           const std::vector<double>& lambdas,
                                           const SupSearchConfig& cfg = {}, double max_spread = 4.0);

/// reduced_functional(Hφ) against n·log_functional(φ), to `tol` relative.
/// For n = 1 step profiles also samples Mf/Hf of the even extension and
/// records the observed constant; it must stay within [1, mf_hf_bound].
EquivalenceReport check_corollary1(const TestFamily& family, const SupSearchConfig& cfg = {},
                                   double tol = 1e-8, double mf_hf_bound = 3.0);
EquivalenceReport check_corollary1(const std::vector<FamilyMember>& members, int n,
                                   const std::vector<double>& lambdas, const SupSearchConfig& cfg = {},
                                   double tol = 1e-8, double mf_hf_bound = 3.0);

/// log ≤ reduced/(n-λ) + 1e-10·max(1, rhs) on every member, and zero gap (to
/// 1e-8) on the sharp profile ρ^{-λ}, which is always added.
EquivalenceReport check_lemma5_inequality(const TestFamily& family, const SupSearchConfig& cfg = {});
EquivalenceReport check_lemma5_inequality(const std::vector<FamilyMember>& members, int n,
                                          const std::vector<double>& lambdas,
                                          const SupSearchConfig& cfg = {});

/// log/reduced bounded by spread/(n-λ), spread being the lemma1 window
/// measured on the same family. λ = 0 entries are skipped.
EquivalenceReport check_theorem_boundedness(const TestFamily& family,
                                            const SupSearchConfig& cfg = {});
EquivalenceReport check_theorem_boundedness(const std::vector<FamilyMember>& members, int n,
                                            const std::vector<double>& lambdas,
                                            const SupSearchConfig& cfg = {});

struct CounterexampleRow {
  std::int64_t K = 0;
  double upper = 0.0;  ///< direct norm of the train
  double upper_a = 0.0;
  double upper_b = 0.0;
  double minorant = 0.0;  ///< (1/K) Σ_{j<K} ln j
  double minorant_over_log = 0.0;
  double lower = 0.0;  ///< sup_{k<=K} (k²)^{λ-1} ∫_0^{k²} of the explicit minorant of Mf
};

struct CounterexampleReport {
  double lambda = 0.5;
  std::vector<CounterexampleRow> rows;
  std::vector<std::string> failures;
  bool pass() const noexcept { return failures.empty(); }
};

/// (1/k) Σ_{j=1}^{k-1} ln j, summed in increasing j.
double train_minorant(std::int64_t k);

/// Growth table for the indicator trains. Checks upper ≤ √2 + 1e-6, the
/// minorant increasing for 10 ≤ k ≤ max K, and minorant/ln K ∈ [0.5, 1.5]
/// for K ≥ 100.
CounterexampleReport run_counterexample(const std::vector<std::int64_t>& Ks, double lambda = 0.5,
                                        const SupSearchConfig& cfg = {});

void write_counterexample_csv(std::ostream& out, const CounterexampleReport& report);
nlohmann::json counterexample_summary(const CounterexampleReport& report);

/// Default (t, x0, r) grid for f: t at fractions of sup f (plus one level
/// above it), centers spread over the support, radii geometric from a tenth
/// of the shortest segment to twice the support length.
WeakTypeGrid default_weak_grid(const PiecewisePowerFn& f);

/// Max weak-type ratio per member over its grid; fails when max/min of the
/// per-member maxima exceeds `max_spread` or the max moves by more than
/// `stability` under one extra refinement level.
EquivalenceReport check_weak_type(const std::vector<FamilyMember>& members, double lambda,
                                  const SupSearchConfig& cfg = {}, double max_spread = 4.0,
                                  double stability = 1e-3);

struct StrongTypeBracket {
  double lower = 0.0;  ///< norm of the piecewise-constant minorant of Mf
  double upper = 0.0;  ///< norm of the majorant
  double width() const { return upper > 0.0 ? (upper - lower) / upper : 0.0; }
  std::size_t cells = 0;
};

/// ‖Mf‖_{M_{p,λ}} bracketed by step minorants/majorants of Mf on
/// [support - pad, support + pad], pad = 4·(support length). Cells are
/// refined until the width drops below `max_width`.
StrongTypeBracket maximal_norm_bracket(const PiecewisePowerFn& f, const MorreyParams& params,
                                       const SupSearchConfig& cfg = {}, double max_width = 0.05);

EquivalenceReport check_strong_type_p(const std::vector<FamilyMember>& members,
                                      const std::vector<double>& ps, double lambda,
                                      const SupSearchConfig& cfg = {}, double max_spread = 4.0);

/// x·Mf(x) at the given points against ∫f (2% tolerance), and mutual
/// agreement of the samples. Empty `points` means {1e2, 1e3, 1e4} times the
/// support radius.
EquivalenceReport check_remark_decay(const std::vector<FamilyMember>& members,
                                     std::vector<double> points = {});

}  // namespace morreymax
